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

#ifndef COBALT_SETUP_HPP
#define COBALT_SETUP_HPP

#include "cobalt/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cobalt {

// Gaussian-modulated cosine, hard-truncated to [0, support):
// h(t) = exp(-(t - support/2)^2 / (2 sigma^2)) cos(2 pi f0 t).
struct Pulse {
    double carrier_hz = 3.4e6;
    double envelope_sigma_s = 0.58e-6;
    double support_s = 8 * 0.58e-6;
    double sample_rate_hz = 16e6;

    void validate() const;
    double operator()(double t) const noexcept;
    double envelope(double t) const noexcept;
};

// Samples h at t0 + i / fs for i in [0, n).
RealVector render_pulse(const Pulse &p, Index n, double t0 = 0.0);

// Samples h at arbitrary times.
RealVector render_pulse(const Pulse &p, const RealVector &times);

// Consecutive Fourier-series indices [first, first + size) for a period.
struct BandSpec {
    Index first = 0;
    Index size = 0;
    double period_s = 0.0;

    Index last() const noexcept { return first + size - 1; }
    bool contains(Index k) const noexcept { return k >= first && k <= last(); }
    bool contains(const BandSpec &o) const noexcept
    {
        return o.size == 0 || (contains(o.first) && contains(o.last()));
    }
    std::vector<Index> indices() const;
    bool operator==(const BandSpec &o) const
    {
        return first == o.first && size == o.size && period_s == o.period_s;
    }
};

// {p + q : p, q in band}.
BandSpec sumset(const BandSpec &band);

// size / period.
double effective_nyquist(const BandSpec &band);

struct ImagingSetup {
    double speed_of_sound = 1540.0;
    double depth_time_s = 208e-6;
    double carrier_hz = 3.4e6;
    double sample_rate_hz = 16e6;
    std::vector<double> angles_rad{0.0};
    std::optional<Index> band_start; // centered on the carrier when unset
    Index band_size = 400;
    Index sub_band_size = 100;
    double blank_time_s = 10e-6;     // near-field dead zone excluded from the LUT support
    Pulse pulse{};

    Index num_samples() const;
    // Period of the sampled Fourier series, num_samples / fs.
    double period() const;
    double sample_period() const { return 1.0 / sample_rate_hz; }
    double wavelength() const { return speed_of_sound / carrier_hz; }

    BandSpec band() const;
    // Sub-band of size sub_band_size centered inside band().
    BandSpec sub_band() const;
    BandSpec full_band() const;

    void validate() const;
    std::vector<std::string> warnings() const;
};

// 64-channel phased array, 3.4 MHz, 16 MHz sampling, 3328 samples per line.
ImagingSetup ge_setup();
// 2.72 MHz, 10.8 MHz sampling, 1920 samples per line.
ImagingSetup verasonics_setup();

} // namespace cobalt

#endif
