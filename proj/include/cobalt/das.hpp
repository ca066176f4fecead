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

#ifndef COBALT_DAS_HPP
#define COBALT_DAS_HPP

#include "cobalt/simulator.hpp"
#include "cobalt/types.hpp"

#include <cmath>
#include <string>

namespace cobalt {

enum class Method { kDAS, kFDBF, kCOBA, kFCOBA, kCFCOBA };

std::string to_string(Method m);
Method parse_method(const std::string &name);

struct BeamformedLine {
    ComplexVector samples; // real methods keep a zero imaginary part
    double steering_angle = 0.0;
    double sample_rate_hz = 0.0;
    Method method = Method::kDAS;
    bool analytic = false;
};

// tau_m(t; theta) = (t + sqrt(t^2 - 4 g t sin(theta) + 4 g^2)) / 2, g = delta_m / c.
double delay_map(double t, double theta, double delta_m, double c);

// Inverse of delay_map in t: (tau^2 - g^2) / (tau - g sin(theta)).
double inverse_delay_map(double tau, double theta, double delta_m, double c);

// Kaiser-windowed sinc for fractional-delay reads.
struct InterpolationKernel {
    int taps = 8;
    double kaiser_beta = 5.0;

    void validate() const;
    // Band-limited read of x at fractional sample position pos; zero outside.
    template <typename Vec>
    double sample(const Vec &x, double pos) const;
    double weight(double d) const;

private:
    double window(double d) const; // unnormalized Kaiser window
    double window_norm() const;
};

ChannelFrame apply_dynamic_delay(const ChannelFrame &frame, double theta,
                                 const InterpolationKernel &kernel = {});

BeamformedLine das_beamform(const ChannelFrame &frame, double theta,
                            const InterpolationKernel &kernel = {});

// Mean over channels of an already delayed frame.
BeamformedLine das_sum(const ChannelFrame &delayed);

template <typename Vec>
double InterpolationKernel::sample(const Vec &x, double pos) const
{
    const int half = taps / 2;
    const auto i0 = static_cast<Index>(std::floor(pos));
    const double frac = pos - static_cast<double>(i0);
    if (frac == 0.0)
        return i0 >= 0 && i0 < x.size() ? x[i0] : 0.0;
    // sin(pi (frac - j)) = (-1)^j sin(pi frac); 1 - frac is exact near 1 and
    // keeps the dominant tap accurate when pos sits an ulp below an integer.
    const double s = std::sin(kPi * (frac <= 0.5 ? frac : 1.0 - frac)) / kPi;
    const double norm = 1.0 / window_norm();
    double acc = 0.0;
    for (int j = -half + 1; j <= half; ++j) {
        const Index i = i0 + j;
        if (i < 0 || i >= x.size())
            continue;
        const double d = frac - j;
        const double sinc = ((j & 1) ? -s : s) / d;
        acc += x[i] * sinc * window(d) * norm;
    }
    return acc;
}

} // namespace cobalt

#endif
