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

#include "cobalt/das.hpp"

#include <unsupported/Eigen/SpecialFunctions>

#include <cmath>
#include <string>

namespace cobalt {

std::string to_string(Method m)
{
    switch (m) {
    case Method::kDAS: return "das";
    case Method::kFDBF: return "fdbf";
    case Method::kCOBA: return "coba";
    case Method::kFCOBA: return "fcoba";
    case Method::kCFCOBA: return "cfcoba";
    }
    return "unknown";
}

Method parse_method(const std::string &name)
{
    for (Method m : {Method::kDAS, Method::kFDBF, Method::kCOBA, Method::kFCOBA, Method::kCFCOBA})
        if (to_string(m) == name)
            return m;
    throw InvalidArgument("unknown beamforming method '" + name + "'");
}

double delay_map(double t, double theta, double delta_m, double c)
{
    if (!(t >= 0.0) || !std::isfinite(t) || !std::isfinite(theta) || !(c > 0.0))
        throw NumericalDomainError("delay map needs finite t >= 0 and c > 0");
    const double g = delta_m / c;
    // (t - 2 g sin)^2 + 4 g^2 cos^2: only rounding can push this below zero.
    const double disc = t * t - 4.0 * g * t * std::sin(theta) + 4.0 * g * g;
    if (disc < 0.0)
        throw NumericalDomainError("negative discriminant in delay map");
    return 0.5 * (t + std::sqrt(disc));
}

double inverse_delay_map(double tau, double theta, double delta_m, double c)
{
    const double g = delta_m / c;
    const double den = tau - g * std::sin(theta);
    if (den <= 0.0)
        throw NumericalDomainError("delay outside the range of the delay map");
    return (tau * tau - g * g) / den;
}

void InterpolationKernel::validate() const
{
    if (taps < 2 || taps % 2 != 0)
        throw InvalidArgument("interpolation kernel needs an even tap count >= 2");
    if (kaiser_beta < 0.0)
        throw InvalidArgument("Kaiser beta must be nonnegative");
}

double InterpolationKernel::window(double d) const
{
    const double r = d / (0.5 * taps);
    if (r <= -1.0 || r >= 1.0)
        return 0.0;
    return Eigen::numext::bessel_i0(kaiser_beta * std::sqrt(1.0 - r * r));
}

double InterpolationKernel::window_norm() const
{
    return Eigen::numext::bessel_i0(kaiser_beta);
}

double InterpolationKernel::weight(double d) const
{
    const double sinc = d == 0.0 ? 1.0 : std::sin(kPi * d) / (kPi * d);
    return sinc * window(d) / window_norm();
}

ChannelFrame apply_dynamic_delay(const ChannelFrame &frame, double theta,
                                 const InterpolationKernel &kernel)
{
    kernel.validate();
    if (frame.delayed)
        throw InvalidState("frame is already delayed");
    ChannelFrame out = frame;
    out.delayed = true;
    out.steering_angle = theta;
    const Index n = frame.num_samples();
    const double fs = frame.sample_rate_hz;
    const double T = static_cast<double>(n) / fs;
    for (Index ch = 0; ch < frame.num_channels(); ++ch) {
        const double delta =
            frame.geometry.position(frame.geometry.elements()[static_cast<std::size_t>(ch)]);
        const auto row = frame.samples.row(ch);
        const double g = delta / frame.speed_of_sound;
        const double s = std::sin(theta);
        for (Index p = 0; p < n; ++p) {
            const double t = static_cast<double>(p) / fs;
            // delay_map inlined; the discriminant is (t - 2 g s)^2 + 4 g^2 cos^2 >= 0.
            const double tau = 0.5 * (t + std::sqrt(t * t - 4.0 * g * t * s + 4.0 * g * g));
            out.samples(ch, p) = tau > T ? 0.0 : kernel.sample(row, tau * fs);
        }
    }
    return out;
}

BeamformedLine das_sum(const ChannelFrame &delayed)
{
    BeamformedLine line;
    line.samples = delayed.samples.colwise().mean().transpose().cast<Complex>();
    line.steering_angle = delayed.steering_angle;
    line.sample_rate_hz = delayed.sample_rate_hz;
    line.method = Method::kDAS;
    return line;
}

BeamformedLine das_beamform(const ChannelFrame &frame, double theta,
                            const InterpolationKernel &kernel)
{
    return das_sum(apply_dynamic_delay(frame, theta, kernel));
}

} // namespace cobalt
