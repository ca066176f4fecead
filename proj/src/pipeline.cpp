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

#include "cobalt/pipeline.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace cobalt {

namespace {

SpectralFrame delayed_spectrum(const ChannelFrame &frame, const BandSpec &band,
                               const ImagingSetup &setup, const BeamformOptions &opts)
{
    const SpectralFrame sf = extract_coefficients(frame, band);
    const DistortionLUT lut = cached_distortion_lut(opts.lut_cache, frame.steering_angle, band,
                                                    frame.geometry, setup, opts.lut);
    return fd_delay(sf, lut);
}

BeamformedLine make_line(ComplexVector samples, const ChannelFrame &frame, Method m, bool analytic)
{
    BeamformedLine line;
    line.samples = std::move(samples);
    line.steering_angle = frame.steering_angle;
    line.sample_rate_hz = frame.sample_rate_hz;
    line.method = m;
    line.analytic = analytic;
    return line;
}

} // namespace

LineResult beamform_line(const ChannelFrame &frame, const ImagingSetup &setup,
                         const BeamformOptions &opts)
{
    if (frame.delayed)
        throw InvalidState("beamforming expects an undelayed frame");
    if (frame.num_samples() != setup.num_samples())
        throw ConfigError("frame length does not match the setup");
    const double theta = frame.steering_angle;
    const Index n = frame.num_samples();
    LineResult out;
    switch (opts.method) {
    case Method::kDAS:
        out.line = das_beamform(frame, theta, opts.kernel);
        break;
    case Method::kFDBF: {
        const SpectralFrame d = delayed_spectrum(frame, setup.band(), setup, opts);
        const RealVector x = spectrum_to_time(fd_beamform(d), n);
        out.line = make_line(x.cast<Complex>(), frame, Method::kFDBF, false);
        break;
    }
    case Method::kCOBA: {
        const ChannelFrame d = apply_dynamic_delay(frame, theta, opts.kernel);
        out.line = coba_beamform(normalize(d, opts.normalize));
        break;
    }
    case Method::kFCOBA: {
        const SpectralFrame d = delayed_spectrum(frame, setup.band(), setup, opts);
        ComplexRowMatrix y(d.num_channels(), n);
        for (Index ch = 0; ch < d.num_channels(); ++ch)
            y.row(ch) = band_to_time(d.coefficients.row(ch).transpose(), d.band, n).transpose();
        out.line = make_line(coarray_sum(y, d.geometry), frame, Method::kFCOBA, true);
        break;
    }
    case Method::kCFCOBA: {
        const BandSpec sub = setup.sub_band();
        const SpectralFrame d = delayed_spectrum(frame, sub, setup, opts);
        const CobaSpectrum spec = cfcoba_spectrum(d);
        if (sub == setup.band()) {
            out.line = make_line(band_to_time(spec.coefficients, spec.sumset_band, n), frame,
                                 Method::kCFCOBA, true);
        } else {
            const RecoveryModel model = build_recovery_model(setup.pulse, sub, setup, opts.recovery);
            RecoveryResult r = recover_line(spec, model, opts.solver);
            r.line.steering_angle = theta;
            out.line = std::move(r.line);
            out.diagnostics = r.diagnostics;
        }
        break;
    }
    }
    return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &f)
{
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!error)
                        error = std::current_exception();
                    failed = true;
                }
            }
        });
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace cobalt
