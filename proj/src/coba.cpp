// SPDX-License-Identifier: Apache-2.0
//
// cobalt: compressed Fourier-domain convolutional beamforming toolkit
// Copyright (C) 2026 The cobalt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cobalt/coba.hpp"
#include "cobalt/fft.hpp"

#include <cmath>

namespace cobalt {

ComplexRowMatrix root_magnitude(const ComplexRowMatrix &x)
{
    return x.unaryExpr([](const Complex &v) {
        const double a = std::abs(v);
        return a == 0.0 ? Complex(0.0) : v / std::sqrt(a);
    });
}

NormalizedFrame normalize(const ChannelFrame &delayed, const NormalizeOptions &opts)
{
    if (!delayed.delayed)
        throw InvalidState("normalization needs a delayed frame");
    NormalizedFrame nf;
    nf.geometry = delayed.geometry;
    nf.steering_angle = delayed.steering_angle;
    nf.sample_rate_hz = delayed.sample_rate_hz;
    nf.analytic = opts.analytic;
    nf.values.resize(delayed.num_channels(), delayed.num_samples());
    for (Index ch = 0; ch < delayed.num_channels(); ++ch) {
        const RealVector row = delayed.samples.row(ch).transpose();
        if (opts.analytic)
            nf.values.row(ch) = dsp::analytic_signal(row).transpose();
        else
            nf.values.row(ch) = row.cast<Complex>().transpose();
    }
    if (opts.root_magnitude)
        nf.values = root_magnitude(nf.values);
    return nf;
}

ComplexRowMatrix coarray_convolution(const ComplexRowMatrix &values, const ArrayGeometry &geom)
{
    if (values.rows() != geom.size())
        throw InvalidArgument("channel count does not match the geometry");
    const Index span = geom.max() - geom.min() + 1;
    const Index out_rows = 2 * span - 1;
    const auto L = static_cast<Index>(dsp::next_pow2(static_cast<std::size_t>(out_rows)));
    ComplexRowMatrix out(out_rows, values.cols());
    ComplexVector lane(L);
    for (Index p = 0; p < values.cols(); ++p) {
        lane.setZero();
        for (Index ch = 0; ch < values.rows(); ++ch)
            lane[geom.elements()[static_cast<std::size_t>(ch)] - geom.min()] = values(ch, p);
        const ComplexVector spec = dsp::fft(lane);
        out.col(p) = dsp::ifft(spec.cwiseProduct(spec)).head(out_rows);
    }
    return out;
}

ComplexVector coarray_sum(const ComplexRowMatrix &values, const ArrayGeometry &geom)
{
    return coarray_convolution(values, geom).colwise().sum().transpose();
}

BeamformedLine coba_beamform(const NormalizedFrame &nf)
{
    BeamformedLine line;
    line.samples = coarray_sum(nf.values, nf.geometry);
    line.steering_angle = nf.steering_angle;
    line.sample_rate_hz = nf.sample_rate_hz;
    line.method = Method::kCOBA;
    line.analytic = nf.analytic;
    return line;
}

} // namespace cobalt
