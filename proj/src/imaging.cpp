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

#include "cobalt/imaging.hpp"
#include "cobalt/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace cobalt {

RealVector envelope(const BeamformedLine &line)
{
    if (line.analytic)
        return line.samples.cwiseAbs();
    return dsp::analytic_signal(line.samples.real()).cwiseAbs();
}

RealVector log_compress(const RealVector &env, double reference, double dynamic_range_db)
{
    if (!(dynamic_range_db > 0.0))
        throw InvalidArgument("dynamic range must be positive");
    if (!(reference > 0.0))
        return RealVector::Constant(env.size(), -dynamic_range_db);
    return env.unaryExpr([&](double v) {
        if (!(v > 0.0))
            return -dynamic_range_db;
        return std::clamp(20.0 * std::log10(v / reference), -dynamic_range_db, 0.0);
    });
}

RealVector envelope_logcompress(const BeamformedLine &line, double dynamic_range_db)
{
    const RealVector env = envelope(line);
    const double peak = env.size() ? env.maxCoeff() : 0.0;
    return log_compress(env, peak, dynamic_range_db);
}

BModeImage make_bmode(const std::vector<BeamformedLine> &lines, double speed_of_sound,
                      double dynamic_range_db)
{
    if (lines.empty())
        throw InvalidArgument("no lines to assemble");
    std::vector<std::size_t> order(lines.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return lines[a].steering_angle < lines[b].steering_angle;
    });
    const Index n = lines.front().samples.size();
    const double fs = lines.front().sample_rate_hz;
    BModeImage img;
    img.dynamic_range_db = dynamic_range_db;
    img.method = lines.front().method;
    img.angles_rad.resize(static_cast<Index>(lines.size()));
    img.depths_m.resize(n);
    for (Index p = 0; p < n; ++p)
        img.depths_m[p] = speed_of_sound * static_cast<double>(p) / (2.0 * fs);
    RealRowMatrix env(static_cast<Index>(lines.size()), n);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const BeamformedLine &l = lines[order[i]];
        if (l.samples.size() != n || l.sample_rate_hz != fs)
            throw InvalidArgument("lines have different time grids");
        if (i > 0 && !(l.steering_angle > img.angles_rad[static_cast<Index>(i) - 1]))
            throw InvalidArgument("duplicate steering angles");
        img.angles_rad[static_cast<Index>(i)] = l.steering_angle;
        env.row(static_cast<Index>(i)) = envelope(l).transpose();
    }
    const double peak = env.size() ? env.maxCoeff() : 0.0;
    img.envelope = peak > 0.0 ? RealRowMatrix(env / peak) : env;
    img.intensity.resize(env.rows(), env.cols());
    for (Index r = 0; r < env.rows(); ++r)
        img.intensity.row(r) =
            log_compress(env.row(r).transpose(), peak, dynamic_range_db).transpose();
    return img;
}

namespace {

// Locates v on a strictly increasing grid. A one-point grid accepts values
// within `tol` of the point.
bool locate(const RealVector &grid, double v, double tol, Index &i, double &frac)
{
    if (grid.size() == 1) {
        if (std::abs(v - grid[0]) > tol)
            return false;
        i = 0;
        frac = 0.0;
        return true;
    }
    if (v < grid[0] || v > grid[grid.size() - 1])
        return false;
    const double *begin = grid.data();
    const double *it = std::upper_bound(begin, begin + grid.size(), v);
    i = std::clamp<Index>((it - begin) - 1, 0, grid.size() - 2);
    frac = (v - grid[i]) / (grid[i + 1] - grid[i]);
    return true;
}

} // namespace

RealRowMatrix scan_convert(const BModeImage &img, const RasterSpec &raster)
{
    const Index na = img.angles_rad.size(), nd = img.depths_m.size();
    if (na == 0 || nd == 0 || raster.nx < 1 || raster.nz < 1)
        throw InvalidArgument("scan conversion needs non-empty grids");
    if (img.intensity.rows() != na || img.intensity.cols() != nd)
        throw InvalidArgument("image intensity does not match its grids");
    for (Index i = 1; i < na; ++i)
        if (!(img.angles_rad[i] > img.angles_rad[i - 1]))
            throw InvalidArgument("angle grid is not strictly increasing");
    for (Index i = 1; i < nd; ++i)
        if (!(img.depths_m[i] > img.depths_m[i - 1]))
            throw InvalidArgument("depth grid is not strictly increasing");

    const double dx = raster.nx > 1 ? (raster.x_max_m - raster.x_min_m) / static_cast<double>(raster.nx - 1) : 0.0;
    const double dz = raster.nz > 1 ? (raster.z_max_m - raster.z_min_m) / static_cast<double>(raster.nz - 1) : 0.0;
    const double pix = std::max({dx, dz, 1e-12});
    RealRowMatrix out(raster.nz, raster.nx);
    for (Index iz = 0; iz < raster.nz; ++iz) {
        const double z = raster.z_min_m + static_cast<double>(iz) * dz;
        for (Index ix = 0; ix < raster.nx; ++ix) {
            const double x = raster.x_min_m + static_cast<double>(ix) * dx;
            const double r = std::hypot(x, z);
            const double th = std::atan2(x, z);
            Index ia, id;
            double fa, fd;
            const double ang_tol = r > 0.0 ? 0.5 * pix / r : kPi;
            if (!locate(img.angles_rad, th, ang_tol, ia, fa) ||
                !locate(img.depths_m, r, 0.5 * pix, id, fd)) {
                out(iz, ix) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const Index ia1 = std::min(ia + 1, na - 1), id1 = std::min(id + 1, nd - 1);
            const double v0 = (1.0 - fd) * img.intensity(ia, id) + fd * img.intensity(ia, id1);
            const double v1 = (1.0 - fd) * img.intensity(ia1, id) + fd * img.intensity(ia1, id1);
            out(iz, ix) = (1.0 - fa) * v0 + fa * v1;
        }
    }
    return out;
}

Rational::Rational(std::int64_t num, std::int64_t den)
{
    if (den == 0)
        throw InvalidArgument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = g ? num / g : num;
    den_ = g ? den / g : den;
}

std::string Rational::str() const
{
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational reduction_factor(std::int64_t full_elements, std::int64_t thinned_elements,
                          std::int64_t n_traditional, std::int64_t n_used)
{
    if (full_elements <= 0 || thinned_elements <= 0 || n_traditional <= 0 || n_used <= 0)
        throw InvalidArgument("reduction factor inputs must be positive");
    return Rational(full_elements * n_traditional, thinned_elements * n_used);
}

Rational reduction_factor(const ArrayGeometry &full, const ArrayGeometry &thinned,
                          std::int64_t n_traditional, std::int64_t n_used)
{
    return reduction_factor(full.size(), thinned.size(), n_traditional, n_used);
}

double fwhm(const RealVector &cut, double spacing, std::optional<Index> peak, double floor)
{
    if (cut.size() == 0)
        throw NotFound("empty cut");
    Index ip = 0;
    if (peak) {
        ip = *peak;
        if (ip < 0 || ip >= cut.size())
            throw InvalidArgument("peak index outside the cut");
    } else {
        cut.maxCoeff(&ip);
    }
    const double top = cut[ip];
    if (!std::isfinite(top) || !(top > floor) || !(top > 0.0))
        throw NotFound("no peak above the floor");
    const double half = 0.5 * top;
    Index l = ip;
    while (l > 0 && cut[l - 1] >= half)
        --l;
    Index r = ip;
    while (r + 1 < cut.size() && cut[r + 1] >= half)
        ++r;
    if (l == 0 || r + 1 == cut.size())
        throw NotFound("cut does not fall below half maximum on both sides");
    const double xl = static_cast<double>(l) - (cut[l] - half) / (cut[l] - cut[l - 1]);
    const double xr = static_cast<double>(r) + (cut[r] - half) / (cut[r] - cut[r + 1]);
    return (xr - xl) * spacing;
}

double cnr_db(const RealVector &a, const RealVector &b)
{
    if (a.size() == 0 || b.size() == 0)
        throw InvalidArgument("CNR regions must be non-empty");
    const double ma = a.mean(), mb = b.mean();
    const double va = (a.array() - ma).square().mean();
    const double vb = (b.array() - mb).square().mean();
    if (va + vb == 0.0)
        throw NumericalDomainError("CNR undefined for two constant regions");
    const double ratio = std::abs(ma - mb) / std::sqrt(va + vb);
    if (ratio == 0.0)
        return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(ratio);
}

RealVector lateral_profile(const BModeImage &img, double depth_m, double half_window_m)
{
    if (img.envelope.rows() != img.angles_rad.size() || img.envelope.cols() != img.depths_m.size())
        throw InvalidArgument("image has no linear envelope on its grid");
    RealVector out = RealVector::Zero(img.angles_rad.size());
    bool any = false;
    for (Index p = 0; p < img.depths_m.size(); ++p) {
        if (std::abs(img.depths_m[p] - depth_m) > half_window_m)
            continue;
        any = true;
        out = out.cwiseMax(img.envelope.col(p));
    }
    if (!any)
        throw NotFound("no depth samples near the requested depth");
    return out;
}

double lateral_fwhm_mm(const BModeImage &img, double depth_m, double half_window_m)
{
    const Index na = img.angles_rad.size();
    if (na < 3)
        throw InvalidArgument("lateral FWHM needs at least three angles");
    const double step = (img.angles_rad[na - 1] - img.angles_rad[0]) / static_cast<double>(na - 1);
    for (Index i = 1; i < na; ++i)
        if (std::abs(img.angles_rad[i] - img.angles_rad[i - 1] - step) > 1e-6 * std::abs(step))
            throw InvalidArgument("lateral FWHM needs a uniform angle grid");
    return fwhm(lateral_profile(img, depth_m, half_window_m), depth_m * step * 1e3);
}

CystRegions cyst_regions(const BModeImage &img, double x_m, double z_m, double radius_m)
{
    if (!(radius_m > 0.0))
        throw InvalidArgument("cyst radius must be positive");
    if (img.envelope.rows() != img.angles_rad.size() || img.envelope.cols() != img.depths_m.size())
        throw InvalidArgument("image has no linear envelope on its grid");
    std::vector<double> in, out;
    for (Index a = 0; a < img.angles_rad.size(); ++a) {
        const double s = std::sin(img.angles_rad[a]), c = std::cos(img.angles_rad[a]);
        for (Index p = 0; p < img.depths_m.size(); ++p) {
            const double r = img.depths_m[p];
            const double d = std::hypot(r * s - x_m, r * c - z_m) / radius_m;
            if (d < 0.7)
                in.push_back(img.envelope(a, p));
            else if (d > 1.3 && d < 2.2)
                out.push_back(img.envelope(a, p));
        }
    }
    CystRegions reg;
    reg.inside = Eigen::Map<const RealVector>(in.data(), static_cast<Index>(in.size()));
    reg.background = Eigen::Map<const RealVector>(out.data(), static_cast<Index>(out.size()));
    return reg;
}

double nrmse(const ComplexVector &a, const ComplexVector &ref)
{
    if (a.size() != ref.size())
        throw InvalidArgument("NRMSE operands differ in length");
    const double d = (a - ref).norm();
    const double r = ref.norm();
    if (r == 0.0)
        return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return d / r;
}

double nrmse(const RealVector &a, const RealVector &ref)
{
    return nrmse(ComplexVector(a.cast<Complex>()), ComplexVector(ref.cast<Complex>()));
}

} // namespace cobalt
