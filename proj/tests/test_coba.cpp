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

#include "cobalt/coba.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cobalt;

namespace {

// Direct oracle: s_l = sum over n + m = l of u_n u_m, on element positions.
ComplexRowMatrix direct_coarray(const ComplexRowMatrix &u, const ArrayGeometry &g)
{
    const Index span = g.max() - g.min() + 1;
    ComplexRowMatrix out = ComplexRowMatrix::Zero(2 * span - 1, u.cols());
    for (Index a = 0; a < u.rows(); ++a)
        for (Index b = 0; b < u.rows(); ++b) {
            const Index l = g.elements()[static_cast<std::size_t>(a)] +
                            g.elements()[static_cast<std::size_t>(b)] - 2 * g.min();
            out.row(l) += u.row(a).cwiseProduct(u.row(b));
        }
    return out;
}

ChannelFrame tone_frame(const ArrayGeometry &g, double theta, double f0, double fs, double c,
                        Index n)
{
    ChannelFrame f;
    f.geometry = g;
    f.sample_rate_hz = fs;
    f.speed_of_sound = c;
    f.delayed = true;
    f.samples.resize(g.size(), n);
    for (Index ch = 0; ch < g.size(); ++ch) {
        const double lag = g.position(g.elements()[static_cast<std::size_t>(ch)]) * std::sin(theta) / c;
        for (Index p = 0; p < n; ++p)
            f.samples(ch, p) = std::cos(2 * kPi * f0 * (p / fs - lag));
    }
    return f;
}

} // namespace

TEST_CASE("root magnitude")
{
    ComplexRowMatrix x(1, 3);
    x << std::polar(4.0, kPi / 3), Complex(0.0), Complex(-9.0);
    const ComplexRowMatrix u = root_magnitude(x);
    CHECK(std::abs(u(0, 0) - std::polar(2.0, kPi / 3)) < 1e-15);
    CHECK(u(0, 1) == Complex(0.0));
    CHECK(std::abs(u(0, 2) - Complex(-3.0)) < 1e-15);
}

TEST_CASE("normalize")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    ChannelFrame f;
    f.geometry = make_ula(4, 1e-3);
    f.sample_rate_hz = 16e6;
    f.samples.resize(4, 64);
    for (Index i = 0; i < f.samples.size(); ++i)
        f.samples.data()[i] = nd(rng);
    CHECK_THROWS_AS(normalize(f), InvalidState);
    f.delayed = true;

    NormalizeOptions real_only;
    real_only.analytic = false;
    const NormalizedFrame nf = normalize(f, real_only);
    for (Index i = 0; i < f.samples.size(); ++i) {
        const Complex u = nf.values.data()[i];
        const double x = f.samples.data()[i];
        CHECK(std::norm(u) == doctest::Approx(std::abs(x)));
        CHECK(std::arg(u) == doctest::Approx(std::arg(Complex(x))));
    }
    const NormalizedFrame an = normalize(f);
    CHECK(an.analytic);
    CHECK(an.values.rows() == 4);
    NormalizeOptions raw;
    raw.analytic = false;
    raw.root_magnitude = false;
    CHECK((normalize(f, raw).values.real() - f.samples).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coba small cases")
{
    const ArrayGeometry one({0}, 1.0, 0);
    ComplexRowMatrix u(1, 2);
    u << Complex(1.0, 2.0), Complex(-0.5, 0.25);
    const ComplexVector s = coarray_sum(u, one);
    CHECK(std::abs(s[0] - u(0, 0) * u(0, 0)) < 1e-14);
    CHECK(std::abs(s[1] - u(0, 1) * u(0, 1)) < 1e-14);

    const ArrayGeometry two({0, 1}, 1.0, 0);
    ComplexRowMatrix v = ComplexRowMatrix::Constant(2, 1, Complex(0.7, -0.2));
    const ComplexRowMatrix conv = coarray_convolution(v, two);
    const Complex v2 = v(0, 0) * v(0, 0);
    CHECK(std::abs(conv(0, 0) - v2) < 1e-14);
    CHECK(std::abs(conv(1, 0) - 2.0 * v2) < 1e-14);
    CHECK(std::abs(conv(2, 0) - v2) < 1e-14);
    CHECK(std::abs(coarray_sum(v, two)[0] - 4.0 * v2) < 1e-14);
    CHECK_THROWS_AS(coarray_convolution(v, one), InvalidArgument);
}

TEST_CASE("coba FFT convolution matches the double sum")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const ArrayGeometry g = trial % 2 ? make_ula(5, 1.0) : make_fractal({0, 1}, 2 + trial % 3, 1.0);
        const ComplexRowMatrix u = test::random_complex(g.size(), 7, rng);
        const ComplexRowMatrix fast = coarray_convolution(u, g);
        const ComplexRowMatrix slow = direct_coarray(u, g);
        const double scale = u.squaredNorm();
        CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-10 * scale);
        // sum over the co-array is (sum u)^2
        const ComplexVector sum = coarray_sum(u, g);
        const ComplexVector sq = u.colwise().sum().transpose().array().square();
        CHECK((sum - sq).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }
}

TEST_CASE("coba realizes the co-array beampattern")
{
    const double c = 1540.0, f0 = 3.4e6, fs = 16e6;
    const double pitch = c / f0 / 2;
    const Index n = 1600; // the carrier sits on bin 340
    for (const ArrayGeometry &g : {make_ula(8, pitch), make_fractal({0, 1}, 2, pitch)}) {
        const ArrayGeometry s = sumset(g);
        const Apodization ap = intrinsic_apodization(g);
        RealVector th = RealVector::LinSpaced(61, -0.6, 0.6);
        const ComplexVector expect = beampattern(s, ap, th, 2 * kPi * f0, c);
        const double full = static_cast<double>(g.size() * g.size());
        for (Index i = 0; i < th.size(); ++i) {
            const ChannelFrame f = tone_frame(g, th[i], f0, fs, c, n);
            const BeamformedLine l = coba_beamform(normalize(f));
            CHECK(l.method == Method::kCOBA);
            // analytic tone exp(j w0 t) squared: exp(2 j w0 t) H(theta)^2
            const Index p = n / 2;
            const Complex carrier = std::polar(1.0, 2 * 2 * kPi * f0 * p / fs);
            CHECK(std::abs(l.samples[p] / carrier - expect[i]) <= 0.01 * full);
        }
    }
}
