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

#ifndef COBALT_SIMULATOR_HPP
#define COBALT_SIMULATOR_HPP

#include "cobalt/geometry.hpp"
#include "cobalt/setup.hpp"
#include "cobalt/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cobalt {

struct Scatterer {
    double delay_s = 0.0;   // two-way time t_s
    double amplitude = 1.0; // reflectivity b_s
    double angle_rad = 0.0; // lateral direction theta_s
};

class ScattererScene {
public:
    ScattererScene() = default;
    // Rejects duplicate delays and delays below 10 pulse supports.
    ScattererScene(std::vector<Scatterer> scatterers, double speed_of_sound,
                   double pulse_support_s);

    const std::vector<Scatterer> &scatterers() const noexcept { return scatterers_; }
    double speed_of_sound() const noexcept { return speed_of_sound_; }
    double pulse_support() const noexcept { return pulse_support_; }
    bool empty() const noexcept { return scatterers_.empty(); }
    std::size_t size() const noexcept { return scatterers_.size(); }

    ScattererScene merged(const ScattererScene &other) const;

private:
    std::vector<Scatterer> scatterers_;
    double speed_of_sound_ = 1540.0;
    double pulse_support_ = 0.0;
};

double depth_to_delay(double depth_m, double speed_of_sound);

struct ChannelFrame {
    RealRowMatrix samples; // channels x samples, rows in geometry element order
    double sample_rate_hz = 0.0;
    double t0_s = 0.0;
    double speed_of_sound = 1540.0;
    ArrayGeometry geometry{{0}, 1.0, 0};
    double steering_angle = 0.0;
    bool delayed = false;

    Index num_channels() const noexcept { return samples.rows(); }
    Index num_samples() const noexcept { return samples.cols(); }
};

struct SimulationOptions {
    std::optional<double> snr_db; // additive white Gaussian noise, off when unset
    std::uint64_t seed = 0;
};

// Undelayed channel data phi_m such that applying the receive delay of
// steering angle theta to channel m yields sum_s a_s h(t - t_s) for
// scatterers on the beam (theta_s == theta), with a_s = sgn(b_s) sqrt(|b_s|).
ChannelFrame simulate_channels(const ScattererScene &scene, const Pulse &pulse,
                               const ImagingSetup &setup, const ArrayGeometry &geom,
                               double theta, const SimulationOptions &opts = {});

// Per-channel amplitude used by the simulator for reflectivity b.
double channel_amplitude(double reflectivity) noexcept;

// Rows of `frame` whose elements appear in `subset`. Geometry becomes
// `subset`; throws if an element is missing.
ChannelFrame select_channels(const ChannelFrame &frame, const ArrayGeometry &subset);

} // namespace cobalt

#endif
