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

#include "cobalt/cfcoba.hpp"
#include "cobalt/coba.hpp"
#include "cobalt/fft.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace cobalt {

ComplexRowMatrix coefficient_coarray_convolution(const SpectralFrame &delayed)
{
    if (!delayed.delayed)
        throw InvalidState("coefficient-domain convolution needs a delayed frame");
    const ArrayGeometry &geom = delayed.geometry;
    if (delayed.num_channels() != geom.size())
        throw InvalidArgument("channel count does not match the geometry");
    const Index span = geom.max() - geom.min() + 1;
    const Index nb = delayed.band.size;
    const Index rows = 2 * span - 1, cols = 2 * nb - 1;
    const auto pr = static_cast<Index>(dsp::next_pow2(static_cast<std::size_t>(rows)));
    const auto pc = static_cast<Index>(dsp::next_pow2(static_cast<std::size_t>(cols)));
    ComplexRowMatrix grid = ComplexRowMatrix::Zero(pr, pc);
    for (Index ch = 0; ch < delayed.num_channels(); ++ch)
        grid.row(geom.elements()[static_cast<std::size_t>(ch)] - geom.min()).head(nb) =
            delayed.coefficients.row(ch);
    dsp::fft2(grid);
    grid = grid.cwiseProduct(grid);
    dsp::ifft2(grid);
    return grid.topLeftCorner(rows, cols);
}

CobaSpectrum cfcoba_spectrum(const SpectralFrame &delayed)
{
    CobaSpectrum out;
    out.coefficients = coefficient_coarray_convolution(delayed).colwise().sum().transpose();
    out.band = delayed.band;
    out.sumset_band = sumset(delayed.band);
    out.scale = 2 * delayed.band.size - 1;
    return out;
}

CobaSpectrum fullrate_coba_spectrum(const SpectralFrame &delayed)
{
    const Index n = delayed.num_samples;
    const BandSpec s = sumset(delayed.band);
    if (s.last() >= n)
        throw InvalidArgument("sumset band exceeds the acquisition DFT length");
    ComplexRowMatrix values(delayed.num_channels(), n);
    for (Index ch = 0; ch < delayed.num_channels(); ++ch)
        values.row(ch) =
            band_to_time(delayed.coefficients.row(ch).transpose(), delayed.band, n).transpose();
    const ComplexVector phi = coarray_sum(values, delayed.geometry);
    const ComplexVector spec = dsp::fft(phi) / static_cast<double>(n);
    CobaSpectrum out;
    out.coefficients = spec.segment(s.first, s.size);
    out.band = delayed.band;
    out.sumset_band = s;
    out.scale = n;
    return out;
}

ConsistencyReport consistency_with_fullrate(const SpectralFrame &frame_full,
                                            const SpectralFrame &frame_sub)
{
    if (frame_sub.band.size < 1 || !frame_full.band.contains(frame_sub.band))
        throw InvalidArgument("sub-band is not contained in the full band");
    if (!(frame_full.geometry == frame_sub.geometry))
        throw InvalidArgument("frames use different geometries");
    if (frame_full.num_samples != frame_sub.num_samples)
        throw InvalidArgument("frames come from different acquisition grids");
    const CobaSpectrum full = fullrate_coba_spectrum(restrict_band(frame_full, frame_sub.band));
    const CobaSpectrum sub = cfcoba_spectrum(frame_sub);
    ConsistencyReport r;
    r.max_abs_deviation = (full.coefficients - sub.coefficients).cwiseAbs().maxCoeff();
    r.reference_peak = full.coefficients.cwiseAbs().maxCoeff();
    return r;
}

ComplexVector pulse_series(const Pulse &p, const BandSpec &band, double period, bool squared,
                           int oversample)
{
    p.validate();
    if (oversample < 1)
        throw InvalidArgument("oversample must be positive");
    const double dt = 1.0 / (static_cast<double>(oversample) * p.sample_rate_hz);
    const auto nodes = static_cast<Index>(std::ceil(p.support_s / dt));
    ComplexVector out = ComplexVector::Zero(band.size);
    for (Index i = 0; i < nodes; ++i) {
        const double a = static_cast<double>(i) * dt;
        const double b = std::min(a + dt, p.support_s);
        const double t = 0.5 * (a + b);
        double f = p(t);
        if (squared)
            f *= f;
        const double w = f * (b - a) / period;
        for (Index j = 0; j < band.size; ++j) {
            const double k = static_cast<double>(band.first + j);
            out[j] += w * std::polar(1.0, -2.0 * kPi * k * t / period);
        }
    }
    return out;
}

RecoveryModel::RecoveryModel(ComplexVector g_spectrum, BandSpec sumset_band, Index grid_size,
                             double grid_step_s, double noise_epsilon,
                             ComplexVector render_kernel)
    : g_(std::move(g_spectrum)), sumset_(sumset_band), n_(grid_size), step_(grid_step_s),
      epsilon_(noise_epsilon), kernel_(std::move(render_kernel))
{
    if (g_.size() != sumset_.size)
        throw InvalidArgument("pulse spectrum length does not match the sumset band");
    if (sumset_.first < 0 || sumset_.last() >= n_)
        throw InvalidArgument("sumset band exceeds the recovery grid");
    if (!(step_ > 0.0) || epsilon_ < 0.0)
        throw InvalidArgument("recovery grid step must be positive and epsilon nonnegative");
}

ComplexVector RecoveryModel::apply(const RealVector &b) const
{
    if (b.size() != n_)
        throw InvalidArgument("coefficient vector length does not match the grid");
    const ComplexVector X = dsp::fft(b);
    return g_.cwiseProduct(X.segment(sumset_.first, sumset_.size));
}

RealVector RecoveryModel::adjoint(const ComplexVector &r) const
{
    if (r.size() != rows())
        throw InvalidArgument("residual length does not match the model");
    ComplexVector z = ComplexVector::Zero(n_);
    z.segment(sumset_.first, sumset_.size) = g_.conjugate().cwiseProduct(r);
    return (dsp::ifft(z) * static_cast<double>(n_)).real();
}

ComplexVector RecoveryModel::column(Index q) const
{
    ComplexVector c(rows());
    for (Index i = 0; i < rows(); ++i) {
        const Index k = sumset_.first + i;
        // Reduce k q modulo n to keep the phase argument small.
        const double ph = -2.0 * kPi * static_cast<double>((k * q) % n_) / static_cast<double>(n_);
        c[i] = g_[i] * std::polar(1.0, ph);
    }
    return c;
}

Eigen::MatrixXcd RecoveryModel::dense() const
{
    Eigen::MatrixXcd a(rows(), n_);
    for (Index q = 0; q < n_; ++q)
        a.col(q) = column(q);
    return a;
}

double RecoveryModel::lipschitz() const
{
    return static_cast<double>(n_) * g_.cwiseAbs2().maxCoeff();
}

ComplexVector RecoveryModel::render(const RealVector &b) const
{
    ComplexVector out = ComplexVector::Zero(n_);
    for (Index q = 0; q < b.size(); ++q) {
        if (b[q] == 0.0)
            continue;
        const Index len = std::min<Index>(kernel_.size(), n_ - q);
        out.segment(q, len) += b[q] * kernel_.head(len);
    }
    return out;
}

RecoveryModel build_recovery_model(const Pulse &p, const BandSpec &band, const ImagingSetup &setup,
                                   const RecoveryOptions &opts)
{
    p.validate();
    if (band.size < 1)
        throw InvalidArgument("recovery band is empty");
    if (opts.expected_sparsity && 2 * band.size - 1 <= 2 * *opts.expected_sparsity)
        throw InvalidArgument("sumset band of " + std::to_string(2 * band.size - 1) +
                              " coefficients cannot identify " +
                              std::to_string(*opts.expected_sparsity) + " spikes");
    const double T = setup.period();
    const Index n = setup.num_samples();
    const double fs = setup.sample_rate_hz;

    const RealVector rendered = render_pulse(p, static_cast<Index>(std::ceil(p.support_s * fs)));
    if (rendered.squaredNorm() == 0.0)
        throw InvalidArgument("pulse has zero energy on the acquisition grid");

    const BandSpec s = sumset(band);
    ComplexVector g;
    if (opts.kernel == PulseKernel::kUnfiltered) {
        g = pulse_series(p, s, T, true, opts.oversample);
    } else {
        const ComplexVector h = pulse_series(p, band, T, false, opts.oversample);
        g = dsp::convolve(h, h);
    }
    if (g.cwiseAbs().maxCoeff() == 0.0)
        throw InvalidArgument("pulse has no energy on the recovery band");

    // Positive-frequency part of h^2: envelope^2 exp(j 2 w0 t) / 4.
    const auto len = static_cast<Index>(std::ceil(p.support_s * fs));
    ComplexVector kernel(len);
    for (Index i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) / fs;
        const double e = p.envelope(t);
        kernel[i] = 0.25 * e * e * std::polar(1.0, 4.0 * kPi * p.carrier_hz * t);
    }
    return RecoveryModel(std::move(g), s, n, 1.0 / fs, opts.noise_epsilon, std::move(kernel));
}

namespace {

constexpr double kMaxRefitGrowth = 2.0;

struct Fit {
    RealVector b;
    double rss = 0.0;
    Index support = 0;
};

std::vector<Index> support_of(const RealVector &x, double threshold, Index cap)
{
    const double peak = x.cwiseAbs().maxCoeff();
    std::vector<Index> s;
    if (peak == 0.0)
        return s;
    for (Index i = 0; i < x.size(); ++i)
        if (std::abs(x[i]) > threshold * peak)
            s.push_back(i);
    if (static_cast<Index>(s.size()) > cap) {
        std::partial_sort(s.begin(), s.begin() + cap, s.end(),
                          [&](Index a, Index b) { return std::abs(x[a]) > std::abs(x[b]); });
        s.resize(static_cast<std::size_t>(cap));
        std::sort(s.begin(), s.end());
    }
    return s;
}

// Least-squares amplitudes on a fixed support.
RealVector refit(const RecoveryModel &model, const ComplexVector &y, const std::vector<Index> &s)
{
    const Index m = model.rows();
    Eigen::MatrixXd a(2 * m, static_cast<Index>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j) {
        const ComplexVector c = model.column(s[j]);
        a.col(static_cast<Index>(j)) << c.real(), c.imag();
    }
    Eigen::VectorXd rhs(2 * m);
    rhs << y.real(), y.imag();
    return a.colPivHouseholderQr().solve(rhs);
}

Fit debiased(const RecoveryModel &model, const ComplexVector &y, const RealVector &x,
             double threshold)
{
    const Index cap = std::max<Index>(1, model.rows() / 2);
    Fit f;
    f.b = RealVector::Zero(x.size());
    std::vector<Index> s = support_of(x, threshold, cap);
    if (!s.empty()) {
        RealVector v = refit(model, y, s);
        // Drop atoms the refit drives to noise level and fit again.
        const double peak = v.cwiseAbs().maxCoeff();
        std::vector<Index> kept;
        for (std::size_t j = 0; j < s.size(); ++j)
            if (std::abs(v[static_cast<Index>(j)]) > threshold * peak)
                kept.push_back(s[j]);
        if (kept.size() != s.size() && !kept.empty())
            v = refit(model, y, kept);
        for (std::size_t j = 0; j < kept.size(); ++j)
            f.b[kept[j]] = v[static_cast<Index>(j)];
        f.support = static_cast<Index>(kept.size());
    }
    // Nearly collinear atoms (spikes closer than the band resolution) make
    // the refit blow up into cancelling pairs; keep the l1 iterate then.
    if (f.b.lpNorm<1>() > kMaxRefitGrowth * x.lpNorm<1>()) {
        f.b = x;
        f.support = (x.array() != 0.0).count();
    }
    f.rss = (model.apply(f.b) - y).squaredNorm();
    return f;
}

} // namespace

RecoveryResult recover_line(const CobaSpectrum &spec, const RecoveryModel &model,
                            const SolverConfig &cfg)
{
    const auto start = std::chrono::steady_clock::now();
    if (spec.coefficients.size() != model.rows() || !(spec.sumset_band.first == model.sumset_band().first &&
                                                      spec.sumset_band.size == model.sumset_band().size))
        throw InvalidArgument("spectrum band does not match the recovery model");
    if (cfg.max_iterations < 1 || cfg.support_threshold <= 0.0 || cfg.support_threshold >= 1.0)
        throw InvalidArgument("invalid solver configuration");

    const ComplexVector &y = spec.coefficients;
    const Index n = model.grid_size();
    const Index m = model.rows();
    const double ynorm = y.norm();
    double eps = cfg.epsilon.value_or(model.noise_epsilon());
    const double target_floor = cfg.relative_tolerance * ynorm;

    RecoveryResult res;
    res.coefficients = RealVector::Zero(n);
    auto finish = [&](const RealVector &b, int iters, double rss, double lambda) {
        res.coefficients = b;
        res.line.samples = model.render(b);
        res.line.sample_rate_hz = 1.0 / model.grid_step();
        res.line.method = Method::kCFCOBA;
        res.line.analytic = true;
        res.diagnostics.iterations = iters;
        res.diagnostics.final_residual = std::sqrt(rss);
        res.diagnostics.support_size = (b.array() != 0.0).count();
        res.diagnostics.epsilon = eps;
        res.diagnostics.lambda = lambda;
        res.diagnostics.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return res;
    };
    if (ynorm == 0.0)
        return finish(RealVector::Zero(n), 0, 0.0, 0.0);

    const double L = model.lipschitz();
    const double lambda_max = model.adjoint(y).cwiseAbs().maxCoeff();
    const Index support_cap = std::max<Index>(1, m / 2);
    RealVector x = RealVector::Zero(n), z = x, xn(n);
    int iters = 0;
    double lambda = lambda_max;

    // Auto mode keeps the stage with the lowest Bayesian information
    // criterion over 2m real observations and one parameter per atom.
    auto bic = [&](const Fit &f) {
        const double obs = 2.0 * static_cast<double>(m);
        return obs * std::log(std::max(f.rss, 1e-300) / obs) +
               static_cast<double>(f.support) * std::log(obs);
    };
    Fit best;
    best.b = RealVector::Zero(n);
    best.rss = ynorm * ynorm;
    double best_score = bic(best), best_lambda = lambda_max;
    int stale = 0;
    double last_rss = best.rss;

    while (iters < cfg.max_iterations) {
        lambda *= 0.5;
        if (lambda < lambda_max * 1e-10)
            break;
        double t = 1.0;
        z = x;
        const int stage_cap = std::min(cfg.max_iterations - iters, 200);
        for (int it = 0; it < stage_cap; ++it) {
            const RealVector grad = model.adjoint(model.apply(z) - y);
            xn = z - grad / L;
            const double thr = lambda / L;
            xn = xn.unaryExpr([thr](double v) { return std::copysign(std::max(std::abs(v) - thr, 0.0), v); });
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            z = xn + ((t - 1.0) / tn) * (xn - x);
            const double change = (xn - x).norm();
            x = xn;
            t = tn;
            ++iters;
            if (change <= 1e-6 * std::max(x.norm(), 1e-300))
                break;
        }

        Fit f;
        if (cfg.debias) {
            f = debiased(model, y, x, cfg.support_threshold);
        } else {
            f.b = x;
            f.rss = (model.apply(x) - y).squaredNorm();
            f.support = (x.array() != 0.0).count();
        }
        last_rss = f.rss;
        if (std::sqrt(f.rss) <= std::max(eps, target_floor))
            return finish(f.b, iters, f.rss, lambda);

        if (cfg.auto_epsilon) {
            const double score = bic(f);
            if (score < best_score) {
                best = f;
                best_score = score;
                best_lambda = lambda;
                stale = 0;
            } else if (++stale >= 3) {
                break;
            }
            if (f.support >= support_cap)
                break;
        }
    }
    if (cfg.auto_epsilon) {
        const double dof = static_cast<double>(std::max<Index>(1, m - best.support));
        eps = std::sqrt(best.rss / dof * static_cast<double>(m));
        return finish(best.b, iters, best.rss, best_lambda);
    }
    const double res_norm = std::sqrt(last_rss);
    throw SolverError("l1 recovery did not reach the residual bound " +
                          std::to_string(std::max(eps, target_floor)) + " (residual " +
                          std::to_string(res_norm) + ")",
                      iters, res_norm);
}

} // namespace cobalt
