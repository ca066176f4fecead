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

#include "cobalt/simulator.hpp"
#include "cobalt/das.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace cobalt {

ScattererScene::ScattererScene(std::vector<Scatterer> scatterers, double speed_of_sound,
                               double pulse_support_s)
    : scatterers_(std::move(scatterers)), speed_of_sound_(speed_of_sound),
      pulse_support_(pulse_support_s)
{
    if (!(speed_of_sound_ > 0.0))
        throw InvalidArgument("speed of sound must be positive");
    if (!(pulse_support_ > 0.0))
        throw InvalidArgument("pulse support must be positive");
    for (const Scatterer &s : scatterers_) {
        if (!std::isfinite(s.delay_s) || !std::isfinite(s.amplitude) ||
            !std::isfinite(s.angle_rad))
            throw InvalidArgument("scatterer parameters must be finite");
        if (s.delay_s < 10.0 * pulse_support_)
            throw InvalidArgument("scatterer delay " + std::to_string(s.delay_s) +
                                  " s is below ten pulse supports");
        if (!(std::abs(s.angle_rad) < kPi / 2))
            throw InvalidArgument("scatterer angle outside (-90, 90) degrees");
    }
    std::vector<double> d;
    for (const Scatterer &s : scatterers_)
        d.push_back(s.delay_s);
    std::sort(d.begin(), d.end());
    if (std::adjacent_find(d.begin(), d.end()) != d.end())
        throw InvalidArgument("scatterer delays must be distinct");
}

ScattererScene ScattererScene::merged(const ScattererScene &other) const
{
    std::vector<Scatterer> all(scatterers_);
    all.insert(all.end(), other.scatterers_.begin(), other.scatterers_.end());
    return ScattererScene(std::move(all), speed_of_sound_,
                          std::max(pulse_support_, other.pulse_support_));
}

double depth_to_delay(double depth_m, double speed_of_sound)
{
    return 2.0 * depth_m / speed_of_sound;
}

double channel_amplitude(double reflectivity) noexcept
{
    return std::copysign(std::sqrt(std::abs(reflectivity)), reflectivity);
}

ChannelFrame simulate_channels(const ScattererScene &scene, const Pulse &pulse,
                               const ImagingSetup &setup, const ArrayGeometry &geom,
                               double theta, const SimulationOptions &opts)
{
    pulse.validate();
    const Index n = setup.num_samples();
    const double fs = setup.sample_rate_hz;
    const double T = setup.period();
    const double c = setup.speed_of_sound;

    ChannelFrame frame;
    frame.samples = RealRowMatrix::Zero(geom.size(), n);
    frame.sample_rate_hz = fs;
    frame.speed_of_sound = c;
    frame.geometry = geom;
    frame.steering_angle = theta;

    for (const Scatterer &s : scene.scatterers())
        if (s.delay_s + pulse.support_s > T)
            throw OutOfRange("scatterer delay " + std::to_string(s.delay_s) +
                             " s exceeds the acquisition window");

    for (Index ch = 0; ch < geom.size(); ++ch) {
        const double delta = geom.position(geom.elements()[static_cast<std::size_t>(ch)]);
        const double gamma = delta / c;
        for (const Scatterer &s : scene.scatterers()) {
            const double a = channel_amplitude(s.amplitude);
            // tau is monotone in t, so the echo occupies [tau(t_s), tau(t_s + support)].
            const double lo = delay_map(s.delay_s, s.angle_rad, delta, c);
            const double hi = delay_map(s.delay_s + pulse.support_s, s.angle_rad, delta, c);
            const auto p0 = std::max<Index>(0, static_cast<Index>(std::floor(lo * fs)));
            const auto p1 = std::min<Index>(n - 1, static_cast<Index>(std::ceil(hi * fs)));
            const double sn = std::sin(s.angle_rad);
            for (Index p = p0; p <= p1; ++p) {
                const double tau = static_cast<double>(p) / fs;
                if (tau <= std::abs(gamma))
                    continue;
                const double t = (tau * tau - gamma * gamma) / (tau - gamma * sn);
                frame.samples(ch, p) += a * pulse(t - s.delay_s);
            }
        }
    }

    if (opts.snr_db) {
        const double power = frame.samples.squaredNorm() / static_cast<double>(frame.samples.size());
        if (power > 0.0) {
            const double sigma = std::sqrt(power / std::pow(10.0, *opts.snr_db / 10.0));
            std::mt19937_64 rng(opts.seed);
            std::normal_distribution<double> noise(0.0, sigma);
            for (Index i = 0; i < frame.samples.size(); ++i)
                frame.samples.data()[i] += noise(rng);
        }
    }
    return frame;
}

ChannelFrame select_channels(const ChannelFrame &frame, const ArrayGeometry &subset)
{
    ChannelFrame out = frame;
    out.geometry = subset;
    out.samples.resize(subset.size(), frame.num_samples());
    const auto &src = frame.geometry.elements();
    for (Index i = 0; i < subset.size(); ++i) {
        const int e = subset.elements()[static_cast<std::size_t>(i)];
        const auto it = std::lower_bound(src.begin(), src.end(), e);
        if (it == src.end() || *it != e)
            throw InvalidArgument("element " + std::to_string(e) + " missing from frame");
        out.samples.row(i) = frame.samples.row(it - src.begin());
    }
    return out;
}

} // namespace cobalt
