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

#ifndef COBALT_FOURIER_HPP
#define COBALT_FOURIER_HPP

#include "cobalt/geometry.hpp"
#include "cobalt/setup.hpp"
#include "cobalt/simulator.hpp"
#include "cobalt/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace cobalt {

struct SpectralFrame {
    ComplexRowMatrix coefficients; // channels x band.size
    BandSpec band;
    bool delayed = false;
    double steering_angle = 0.0;
    ArrayGeometry geometry{{0}, 1.0, 0};
    Index num_samples = 0;
    double sample_rate_hz = 0.0;

    Index num_channels() const noexcept { return coefficients.rows(); }
};

// c_m[k] = DFT_N(phi_m)[k] / N for k in band.
SpectralFrame extract_coefficients(const ChannelFrame &frame, const BandSpec &band);

// Columns of `frame` that fall inside `sub`.
SpectralFrame restrict_band(const SpectralFrame &frame, const BandSpec &sub);

// Largest t with tau_m(t; theta) <= T on every channel.
double beam_support(double theta, const ImagingSetup &setup, const ArrayGeometry &geom);

struct LutOptions {
    double epsilon_q = 1e-3;    // truncation-energy budget
    std::optional<int> n_lo;    // fixed N1 instead of the energy search
    std::optional<int> n_hi;    // fixed N2
    int window_cap = 256;       // largest N1 = N2 the search may pick
    int oversample = 4;         // quadrature points per acquisition sample, at least
    unsigned threads = 1;       // channels built in parallel; does not affect the result
};

// Fourier coefficients Q_{k,m}[n], n in [-n_lo, n_hi], of the distortion
// function for one steering angle.
class DistortionLUT {
public:
    DistortionLUT(double theta, BandSpec band, int n_lo, int n_hi, ArrayGeometry geometry,
                  std::vector<Complex> data, double tail_energy);

    double theta() const noexcept { return theta_; }
    const BandSpec &band() const noexcept { return band_; }
    int n_lo() const noexcept { return n_lo_; }
    int n_hi() const noexcept { return n_hi_; }
    int width() const noexcept { return n_lo_ + n_hi_ + 1; }
    const ArrayGeometry &geometry() const noexcept { return geometry_; }
    // Fraction of |Q|^2 outside the stored window, over all channels and k.
    double tail_energy() const noexcept { return tail_energy_; }
    Index num_channels() const noexcept { return geometry_.size(); }

    // Q for channel row ch, band column ki, offset n in [-n_lo, n_hi].
    Complex operator()(Index ch, Index ki, int n) const
    {
        return data_[offset(ch, ki) + static_cast<std::size_t>(n + n_lo_)];
    }
    const Complex *row(Index ch, Index ki) const { return data_.data() + offset(ch, ki); }
    const std::vector<Complex> &data() const noexcept { return data_; }

private:
    std::size_t offset(Index ch, Index ki) const
    {
        return (static_cast<std::size_t>(ch) * static_cast<std::size_t>(band_.size) +
                static_cast<std::size_t>(ki)) *
               static_cast<std::size_t>(width());
    }

    double theta_;
    BandSpec band_;
    int n_lo_, n_hi_;
    ArrayGeometry geometry_;
    std::vector<Complex> data_;
    double tail_energy_;
};

// Q_k[n] = (1/T) int exp(j 2 pi [(k - n) tau_m(t) - k t] / T) dt over
// [blank_time, T_B(theta)), by quadrature in u = tau_m(t).
DistortionLUT build_distortion_lut(double theta, const BandSpec &band, const ArrayGeometry &geom,
                                   const ImagingSetup &setup, const LutOptions &opts = {});

// c^_m[k] = sum_{n=-N1}^{N2} c_m[k - n] Q_{k,m}[n], zero outside the band.
SpectralFrame fd_delay(const SpectralFrame &frame, const DistortionLUT &lut);

// Mean across channels; the result has a single row.
SpectralFrame fd_beamform(const SpectralFrame &delayed);

// Real signal with the given one-sided coefficients (conjugate-completed)
// on out_length samples.
RealVector spectrum_to_time(const ComplexVector &coefficients, const BandSpec &band,
                            Index out_length);
RealVector spectrum_to_time(const SpectralFrame &frame, Index out_length, Index row = 0);

// sum_{k in band} c[k] exp(j 2 pi k p / out_length), no conjugate completion.
ComplexVector band_to_time(const ComplexVector &coefficients, const BandSpec &band,
                           Index out_length);

// Content hash of every input that affects a LUT.
std::uint64_t lut_key(double theta, const BandSpec &band, const ArrayGeometry &geom,
                      const ImagingSetup &setup, const LutOptions &opts);

// Loads a cached LUT or builds and stores it. An empty directory disables caching.
DistortionLUT cached_distortion_lut(const std::filesystem::path &dir, double theta,
                                    const BandSpec &band, const ArrayGeometry &geom,
                                    const ImagingSetup &setup, const LutOptions &opts = {});

void save_lut(const DistortionLUT &lut, std::uint64_t key, const std::filesystem::path &file);
// Throws NotFound when the file is absent, ParseError when it is corrupt or keyed differently.
DistortionLUT load_lut(const std::filesystem::path &file, std::uint64_t key,
                       const BandSpec &band, const ArrayGeometry &geom);

} // namespace cobalt

#endif
