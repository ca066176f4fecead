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

#ifndef COBALT_IMAGING_HPP
#define COBALT_IMAGING_HPP

#include "cobalt/das.hpp"
#include "cobalt/geometry.hpp"
#include "cobalt/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cobalt {

// Magnitude of the analytic line (Hilbert transform first for real lines).
RealVector envelope(const BeamformedLine &line);

// 20 log10 of the envelope normalized to its maximum, clipped to [-dr, 0].
// An all-zero line maps to -dr everywhere.
RealVector envelope_logcompress(const BeamformedLine &line, double dynamic_range_db = 60.0);

// Envelope in dB relative to `reference`, clipped to [-dr, 0].
RealVector log_compress(const RealVector &env, double reference, double dynamic_range_db);

struct BModeImage {
    RealRowMatrix intensity; // angles x depth samples, dB in [-dr, 0]
    RealRowMatrix envelope;  // same grid, linear, normalized to the frame max
    RealVector angles_rad;   // strictly increasing
    RealVector depths_m;     // strictly increasing
    double dynamic_range_db = 60.0;
    Method method = Method::kDAS;
};

// Stacks line envelopes (one per angle, sorted by angle) normalized to the
// frame maximum. Depth of sample p is c p / (2 fs).
BModeImage make_bmode(const std::vector<BeamformedLine> &lines, double speed_of_sound,
                      double dynamic_range_db = 60.0);

struct RasterSpec {
    double x_min_m = -0.05, x_max_m = 0.05;
    double z_min_m = 0.0, z_max_m = 0.16;
    Index nx = 256, nz = 256;
};

// Bilinear resampling of the polar image onto a Cartesian grid (rows = z,
// columns = x). Pixels outside the sector are NaN.
RealRowMatrix scan_convert(const BModeImage &img, const RasterSpec &raster);

class Rational {
public:
    Rational(std::int64_t num, std::int64_t den);
    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool operator==(const Rational &o) const noexcept { return num_ == o.num_ && den_ == o.den_; }
    std::string str() const;

private:
    std::int64_t num_, den_;
};

// (|M| / |U|) (n_traditional / n_used), reduced.
Rational reduction_factor(std::int64_t full_elements, std::int64_t thinned_elements,
                          std::int64_t n_traditional, std::int64_t n_used);
Rational reduction_factor(const ArrayGeometry &full, const ArrayGeometry &thinned,
                          std::int64_t n_traditional, std::int64_t n_used);

// Full width at half the peak amplitude, by linear interpolation, in units
// of `spacing`. The peak is the maximum unless given. Throws NotFound when
// the peak does not exceed `floor` or the cut never drops below half.
double fwhm(const RealVector &cut, double spacing, std::optional<Index> peak = std::nullopt,
            double floor = 0.0);

// 20 log10(|mu_a - mu_b| / sqrt(var_a + var_b)). Equal means give -inf.
double cnr_db(const RealVector &region_a, const RealVector &region_b);

// Largest linear envelope value per angle within |depth - depth_m| <= half_window_m.
RealVector lateral_profile(const BModeImage &img, double depth_m, double half_window_m);

// Lateral FWHM in mm at depth_m, spacing taken as the arc depth * dtheta of a
// uniform angle grid.
double lateral_fwhm_mm(const BModeImage &img, double depth_m, double half_window_m);

// Envelope samples inside 0.7 r of a circular cyst and in the 1.3 r to 2.2 r
// ring around it; the gaps keep the blurred rim out of both regions.
struct CystRegions {
    RealVector inside;
    RealVector background;
};
CystRegions cyst_regions(const BModeImage &img, double x_m, double z_m, double radius_m);

// ||a - ref|| / ||ref||.
double nrmse(const ComplexVector &a, const ComplexVector &ref);
double nrmse(const RealVector &a, const RealVector &ref);

struct MetricsReport {
    struct Fwhm {
        std::string target;
        double width_mm;
    };
    struct Cnr {
        std::string regions;
        double cnr_db;
    };
    struct Nrmse {
        std::string method;
        std::string reference;
        double value;
    };
    std::optional<Rational> reduction;
    std::vector<Fwhm> fwhm_mm;
    std::vector<Cnr> cnr;
    std::vector<Nrmse> nrmse;
};

} // namespace cobalt

#endif
