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

#include "cobalt/setup.hpp"

#include <cmath>
#include <string>

namespace cobalt {

void Pulse::validate() const
{
    if (!(envelope_sigma_s > 0.0))
        throw InvalidArgument("pulse envelope sigma must be positive");
    if (!(support_s > 0.0))
        throw InvalidArgument("pulse support must be positive");
    if (!(carrier_hz >= 0.0))
        throw InvalidArgument("pulse carrier must be nonnegative");
    if (!(sample_rate_hz > 0.0))
        throw InvalidArgument("pulse sample rate must be positive");
}

double Pulse::envelope(double t) const noexcept
{
    if (t < 0.0 || t >= support_s)
        return 0.0;
    const double d = (t - 0.5 * support_s) / envelope_sigma_s;
    return std::exp(-0.5 * d * d);
}

double Pulse::operator()(double t) const noexcept
{
    if (t < 0.0 || t >= support_s)
        return 0.0;
    return envelope(t) * std::cos(2.0 * kPi * carrier_hz * t);
}

RealVector render_pulse(const Pulse &p, Index n, double t0)
{
    p.validate();
    RealVector out(n);
    for (Index i = 0; i < n; ++i)
        out[i] = p(t0 + static_cast<double>(i) / p.sample_rate_hz);
    return out;
}

RealVector render_pulse(const Pulse &p, const RealVector &times)
{
    p.validate();
    return times.unaryExpr([&p](double t) { return p(t); });
}

std::vector<Index> BandSpec::indices() const
{
    std::vector<Index> out(static_cast<std::size_t>(size));
    for (Index i = 0; i < size; ++i)
        out[static_cast<std::size_t>(i)] = first + i;
    return out;
}

BandSpec sumset(const BandSpec &band)
{
    if (band.size == 0)
        return BandSpec{2 * band.first, 0, band.period_s};
    return BandSpec{2 * band.first, 2 * band.size - 1, band.period_s};
}

double effective_nyquist(const BandSpec &band)
{
    if (!(band.period_s > 0.0))
        throw InvalidArgument("band period must be positive");
    return static_cast<double>(band.size) / band.period_s;
}

Index ImagingSetup::num_samples() const
{
    return static_cast<Index>(std::floor(depth_time_s * sample_rate_hz + 1e-9));
}

double ImagingSetup::period() const
{
    return static_cast<double>(num_samples()) / sample_rate_hz;
}

BandSpec ImagingSetup::band() const
{
    const double T = period();
    Index first;
    if (band_start)
        first = *band_start;
    else
        first = static_cast<Index>(std::lround(carrier_hz * T)) - band_size / 2;
    return BandSpec{first, band_size, T};
}

BandSpec ImagingSetup::sub_band() const
{
    const BandSpec b = band();
    return BandSpec{b.first + (b.size - sub_band_size) / 2, sub_band_size, b.period_s};
}

BandSpec ImagingSetup::full_band() const { return BandSpec{0, num_samples(), period()}; }

void ImagingSetup::validate() const
{
    if (!(speed_of_sound > 0.0))
        throw ConfigError("speed of sound must be positive");
    if (!(depth_time_s > 0.0))
        throw ConfigError("depth time must be positive");
    if (!(sample_rate_hz > 0.0))
        throw ConfigError("sample rate must be positive");
    if (!(carrier_hz > 0.0))
        throw ConfigError("carrier frequency must be positive");
    if (num_samples() < 2)
        throw ConfigError("acquisition grid has fewer than two samples");
    if (angles_rad.empty())
        throw ConfigError("angle grid is empty");
    for (double a : angles_rad)
        if (!(std::abs(a) < kPi / 2))
            throw ConfigError("steering angle outside (-90, 90) degrees");
    if (band_size < 1)
        throw ConfigError("band size must be positive");
    if (sub_band_size < 1 || sub_band_size > band_size)
        throw ConfigError("sub-band size must be in [1, band size]");
    const BandSpec b = band();
    if (b.first < 1 || b.last() >= (num_samples() + 1) / 2)
        throw ConfigError("band [" + std::to_string(b.first) + ", " + std::to_string(b.last()) +
                          "] does not fit strictly between DC and Nyquist");
    if (blank_time_s < 0.0 || blank_time_s >= depth_time_s)
        throw ConfigError("blank time must lie in [0, depth time)");
    try {
        pulse.validate();
    } catch (const InvalidArgument &e) {
        throw ConfigError(e.what());
    }
}

std::vector<std::string> ImagingSetup::warnings() const
{
    std::vector<std::string> w;
    if (sample_rate_hz <= 2.0 * carrier_hz)
        w.emplace_back("sample rate does not exceed twice the carrier frequency");
    if (pulse.sample_rate_hz != sample_rate_hz)
        w.emplace_back("pulse sample rate differs from the acquisition sample rate");
    return w;
}

namespace {

ImagingSetup make_setup(double f0, double fs, double depth_time)
{
    ImagingSetup s;
    s.carrier_hz = f0;
    s.sample_rate_hz = fs;
    s.depth_time_s = depth_time;
    s.pulse.carrier_hz = f0;
    s.pulse.sample_rate_hz = fs;
    return s;
}

} // namespace

ImagingSetup ge_setup()
{
    ImagingSetup s = make_setup(3.4e6, 16e6, 208e-6);
    s.band_size = 400;
    s.sub_band_size = 100;
    return s;
}

ImagingSetup verasonics_setup()
{
    ImagingSetup s = make_setup(2.72e6, 10.8e6, 1920 / 10.8e6);
    s.band_size = 480;
    s.sub_band_size = 230;
    // Gaussian width scaled with the wavelength.
    s.pulse.envelope_sigma_s = 0.58e-6 * 3.4 / 2.72;
    s.pulse.support_s = 8 * s.pulse.envelope_sigma_s;
    return s;
}

} // namespace cobalt
