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

#include "cobalt/fourier.hpp"
#include "cobalt/das.hpp"
#include "cobalt/fft.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace cobalt {

SpectralFrame extract_coefficients(const ChannelFrame &frame, const BandSpec &band)
{
    const Index n = frame.num_samples();
    if (band.size < 1 || band.first < 0 || band.last() >= n)
        throw InvalidArgument("band [" + std::to_string(band.first) + ", " +
                              std::to_string(band.last()) + "] outside the DFT range of " +
                              std::to_string(n) + " samples");
    SpectralFrame out;
    out.coefficients.resize(frame.num_channels(), band.size);
    out.band = band;
    out.delayed = frame.delayed;
    out.steering_angle = frame.steering_angle;
    out.geometry = frame.geometry;
    out.num_samples = n;
    out.sample_rate_hz = frame.sample_rate_hz;
    for (Index ch = 0; ch < frame.num_channels(); ++ch) {
        const ComplexVector spec = dsp::fft(RealVector(frame.samples.row(ch).transpose()));
        out.coefficients.row(ch) =
            spec.segment(band.first, band.size).transpose() / static_cast<double>(n);
    }
    return out;
}

SpectralFrame restrict_band(const SpectralFrame &frame, const BandSpec &sub)
{
    if (!frame.band.contains(sub) || sub.size < 1)
        throw InvalidArgument("sub-band is not contained in the frame band");
    SpectralFrame out = frame;
    out.band = sub;
    out.coefficients = frame.coefficients.middleCols(sub.first - frame.band.first, sub.size);
    return out;
}

double beam_support(double theta, const ImagingSetup &setup, const ArrayGeometry &geom)
{
    const double T = setup.period();
    const double s = std::sin(theta);
    double tb = T;
    for (int e : geom.elements()) {
        const double g = geom.position(e) / setup.speed_of_sound;
        tb = std::min(tb, (T * T - g * g) / (T - g * s));
    }
    return tb;
}

DistortionLUT::DistortionLUT(double theta, BandSpec band, int n_lo, int n_hi,
                             ArrayGeometry geometry, std::vector<Complex> data, double tail_energy)
    : theta_(theta), band_(band), n_lo_(n_lo), n_hi_(n_hi), geometry_(std::move(geometry)),
      data_(std::move(data)), tail_energy_(tail_energy)
{
    if (n_lo_ < 0 || n_hi_ < 0)
        throw InvalidArgument("LUT window bounds must be nonnegative");
    const std::size_t expected = static_cast<std::size_t>(geometry_.size()) *
                                 static_cast<std::size_t>(band_.size) *
                                 static_cast<std::size_t>(width());
    if (data_.size() != expected)
        throw InvalidArgument("LUT data size does not match its dimensions");
}

namespace {

struct ChannelQuadrature {
    Index first_cell = 0;
    ComplexVector base;      // w_i t'(u_i) / T
    RealVector phase_step;   // 2 pi (u_i - t(u_i)) / T
    double energy_scale = 0; // sum |base|^2, Parseval factor applied by the caller
};

ChannelQuadrature channel_quadrature(double gamma, double s, double t_lo, double t_hi,
                                     double T, Index Kq)
{
    const double h = T / static_cast<double>(Kq);
    auto tau = [&](double t) { return 0.5 * (t + std::sqrt(t * t - 4.0 * gamma * t * s + 4.0 * gamma * gamma)); };
    const double lo = tau(t_lo), hi = std::min(tau(t_hi), T);
    ChannelQuadrature q;
    if (!(hi > lo))
        return q;
    const auto i0 = static_cast<Index>(std::floor(lo / h));
    const auto i1 = std::min<Index>(Kq - 1, static_cast<Index>(std::ceil(hi / h)));
    q.first_cell = i0;
    q.base.resize(i1 - i0 + 1);
    q.phase_step.resize(i1 - i0 + 1);
    for (Index i = i0; i <= i1; ++i) {
        const double a = static_cast<double>(i) * h, b = a + h;
        const double w = std::max(0.0, std::min(b, hi) - std::max(a, lo));
        const double u = std::clamp(a + 0.5 * h, lo, hi);
        const double den = u - gamma * s;
        const double t = (u * u - gamma * gamma) / den;
        const double tp = (u * u - 2.0 * u * gamma * s + gamma * gamma) / (den * den);
        q.base[i - i0] = w * tp / T;
        q.phase_step[i - i0] = 2.0 * kPi * (u - t) / T;
    }
    q.energy_scale = q.base.squaredNorm();
    return q;
}

} // namespace

DistortionLUT build_distortion_lut(double theta, const BandSpec &band, const ArrayGeometry &geom,
                                   const ImagingSetup &setup, const LutOptions &opts)
{
    if (band.size < 1)
        throw InvalidArgument("LUT band is empty");
    if (opts.epsilon_q <= 0.0 || opts.epsilon_q >= 1.0)
        throw InvalidArgument("LUT epsilon must lie in (0, 1)");
    if (opts.oversample < 1 || opts.window_cap < 1)
        throw InvalidArgument("LUT oversample and window cap must be positive");
    if (!(std::abs(theta) < kPi / 2))
        throw InvalidArgument("steering angle outside (-90, 90) degrees");

    const double T = setup.period();
    const double s = std::sin(theta);
    const double t_hi = beam_support(theta, setup, geom);
    const double t_lo = std::min(setup.blank_time_s, t_hi);
    const auto Kq = static_cast<Index>(dsp::next_pow2(
        static_cast<std::size_t>(opts.oversample) * static_cast<std::size_t>(setup.num_samples())));
    const int cap = std::max({opts.window_cap, opts.n_lo.value_or(0), opts.n_hi.value_or(0)});
    const int full_w = 2 * cap + 1;
    const Index nch = geom.size();
    const Index nk = band.size;

    std::vector<Complex> wide(static_cast<std::size_t>(nch * nk) * static_cast<std::size_t>(full_w));
    // energy[ch][n + cap], aggregated over k; summed across channels afterwards
    std::vector<std::vector<double>> energy(static_cast<std::size_t>(nch),
                                            std::vector<double>(static_cast<std::size_t>(full_w), 0.0));
    std::vector<double> total(static_cast<std::size_t>(nch), 0.0);

    // Half-cell shift of the quadrature nodes.
    std::vector<Complex> shift(static_cast<std::size_t>(full_w));
    for (int n = -cap; n <= cap; ++n)
        shift[static_cast<std::size_t>(n + cap)] = std::polar(1.0, -kPi * n / static_cast<double>(Kq));

    auto work = [&](Index ch) {
        const double gamma = geom.position(geom.elements()[static_cast<std::size_t>(ch)]) /
                             setup.speed_of_sound;
        const ChannelQuadrature q = channel_quadrature(gamma, s, t_lo, t_hi, T, Kq);
        const Index len = q.base.size();
        if (len == 0)
            return;
        ComplexVector buf = ComplexVector::Zero(Kq), Q(Kq);
        ComplexVector phasor(len), step(len);
        for (Index i = 0; i < len; ++i)
            step[i] = std::polar(1.0, q.phase_step[i]);
        for (Index ki = 0; ki < nk; ++ki) {
            const double k = static_cast<double>(band.first + ki);
            if (ki % 64 == 0) {
                for (Index i = 0; i < len; ++i)
                    phasor[i] = std::polar(1.0, std::remainder(k * q.phase_step[i], 2.0 * kPi));
            } else {
                phasor.array() *= step.array();
            }
            // Cells outside [first_cell, first_cell + len) stay zero.
            buf.segment(q.first_cell, len) = q.base.cwiseProduct(phasor);
            dsp::fft(buf, Q);
            Complex *dst = wide.data() + (static_cast<std::size_t>(ch * nk + ki)) *
                                             static_cast<std::size_t>(full_w);
            auto &e = energy[static_cast<std::size_t>(ch)];
            for (int n = -cap; n <= cap; ++n) {
                const Index bin = n >= 0 ? n : Kq + n;
                const Complex v = Q[bin] * shift[static_cast<std::size_t>(n + cap)];
                dst[n + cap] = v;
                e[static_cast<std::size_t>(n + cap)] += std::norm(v);
            }
            total[static_cast<std::size_t>(ch)] += static_cast<double>(Kq) * q.energy_scale;
        }
    };

    const unsigned nthreads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(nch)));
    if (nthreads == 1) {
        for (Index ch = 0; ch < nch; ++ch)
            work(ch);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t] {
                for (Index ch = t; ch < nch; ch += nthreads)
                    work(ch);
            });
        for (auto &th : pool)
            th.join();
    }

    std::vector<double> e(static_cast<std::size_t>(full_w), 0.0);
    double tot = 0.0;
    for (Index ch = 0; ch < nch; ++ch) {
        tot += total[static_cast<std::size_t>(ch)];
        for (int i = 0; i < full_w; ++i)
            e[static_cast<std::size_t>(i)] += energy[static_cast<std::size_t>(ch)][static_cast<std::size_t>(i)];
    }
    auto tail = [&](int lo, int hi) {
        if (tot <= 0.0)
            return 0.0;
        double in = 0.0;
        for (int n = -lo; n <= hi; ++n)
            in += e[static_cast<std::size_t>(n + cap)];
        return std::max(0.0, tot - in) / tot;
    };

    int n_lo, n_hi;
    if (opts.n_lo || opts.n_hi) {
        n_lo = opts.n_lo.value_or(opts.n_hi.value_or(0));
        n_hi = opts.n_hi.value_or(n_lo);
    } else {
        n_lo = n_hi = -1;
        for (int n = 0; n <= cap; ++n)
            if (tail(n, n) <= opts.epsilon_q) {
                n_lo = n_hi = n;
                break;
            }
        if (n_lo < 0)
            throw QuadratureError("distortion LUT tail energy " + std::to_string(tail(cap, cap)) +
                                      " exceeds epsilon at the window cap " + std::to_string(cap),
                                  tail(cap, cap));
    }

    const int w = n_lo + n_hi + 1;
    std::vector<Complex> data(static_cast<std::size_t>(nch * nk) * static_cast<std::size_t>(w));
    for (Index r = 0; r < nch * nk; ++r)
        std::copy_n(wide.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(full_w) +
                        static_cast<std::size_t>(cap - n_lo),
                    w, data.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(w));
    return DistortionLUT(theta, band, n_lo, n_hi, geom, std::move(data), tail(n_lo, n_hi));
}

SpectralFrame fd_delay(const SpectralFrame &frame, const DistortionLUT &lut)
{
    if (frame.delayed)
        throw InvalidState("spectral frame is already delayed");
    if (!(frame.band == lut.band()))
        throw InvalidArgument("LUT band does not match the frame band");
    if (!(frame.geometry == lut.geometry()))
        throw InvalidArgument("LUT geometry does not match the frame geometry");
    if (std::abs(frame.steering_angle - lut.theta()) > 1e-12)
        throw InvalidArgument("LUT angle does not match the frame steering angle");
    const Index nk = frame.band.size;
    SpectralFrame out = frame;
    out.delayed = true;
    out.coefficients.setZero();
    for (Index ch = 0; ch < frame.num_channels(); ++ch) {
        const auto c = frame.coefficients.row(ch);
        for (Index ki = 0; ki < nk; ++ki) {
            const Complex *q = lut.row(ch, ki);
            // n runs over [-N1, N2]; source column ki - n must stay in the band.
            const Index n_min = std::max<Index>(-lut.n_lo(), ki - (nk - 1));
            const Index n_max = std::min<Index>(lut.n_hi(), ki);
            Complex acc = 0.0;
            for (Index n = n_min; n <= n_max; ++n)
                acc += c[ki - n] * q[n + lut.n_lo()];
            out.coefficients(ch, ki) = acc;
        }
    }
    return out;
}

SpectralFrame fd_beamform(const SpectralFrame &delayed)
{
    if (!delayed.delayed)
        throw InvalidState("frequency-domain beamforming needs a delayed frame");
    SpectralFrame out = delayed;
    out.coefficients = delayed.coefficients.colwise().mean();
    return out;
}

RealVector spectrum_to_time(const ComplexVector &coefficients, const BandSpec &band,
                            Index out_length)
{
    if (coefficients.size() != band.size)
        throw InvalidArgument("coefficient count does not match the band");
    if (out_length < 2 * band.size || band.first < 0 || 2 * band.last() >= out_length)
        throw InvalidArgument("output length too short for a real signal on this band");
    ComplexVector X = ComplexVector::Zero(out_length);
    for (Index i = 0; i < band.size; ++i) {
        const Index k = band.first + i;
        X[k] += coefficients[i];
        if (k != 0)
            X[out_length - k] += std::conj(coefficients[i]);
    }
    return (dsp::ifft(X) * static_cast<double>(out_length)).real();
}

RealVector spectrum_to_time(const SpectralFrame &frame, Index out_length, Index row)
{
    return spectrum_to_time(ComplexVector(frame.coefficients.row(row).transpose()), frame.band,
                            out_length);
}

ComplexVector band_to_time(const ComplexVector &coefficients, const BandSpec &band,
                           Index out_length)
{
    if (coefficients.size() != band.size)
        throw InvalidArgument("coefficient count does not match the band");
    if (band.first < 0 || band.last() >= out_length)
        throw InvalidArgument("band exceeds the output DFT length");
    ComplexVector X = ComplexVector::Zero(out_length);
    X.segment(band.first, band.size) = coefficients;
    return dsp::ifft(X) * static_cast<double>(out_length);
}

} // namespace cobalt
