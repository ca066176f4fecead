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

#include "cobalt/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace cobalt;

namespace {

std::vector<int> ints(std::initializer_list<int> l) { return std::vector<int>(l); }

// Brute-force pair counting over positions.
std::vector<int> pair_counts(const ArrayGeometry &a)
{
    std::vector<int> w(static_cast<std::size_t>(2 * (a.max() - a.min()) + 1), 0);
    for (int x : a.elements())
        for (int y : a.elements())
            ++w[static_cast<std::size_t>(x + y - 2 * a.min())];
    return w;
}

} // namespace

TEST_CASE("make_ula")
{
    const ArrayGeometry a = make_ula(3, 1e-3);
    CHECK(a.elements() == ints({0, 1, 2}));
    CHECK(a.center() == 1);
    const ArrayGeometry one = make_ula(1, 1e-3);
    CHECK(one.elements() == ints({0}));
    CHECK(one.center() == 0);
    CHECK(make_ula(64, 2.3e-4).size() == 64);
    CHECK_THROWS_AS(make_ula(0, 1e-3), InvalidArgument);
    CHECK_THROWS_AS(make_ula(-2, 1e-3), InvalidArgument);
}

TEST_CASE("geometry invariants")
{
    const ArrayGeometry a({4, 0, 2}, 1e-3, 2);
    CHECK(a.elements() == ints({0, 2, 4}));
    CHECK(a.position(2) == 0.0);
    CHECK(a.position(4) == doctest::Approx(2e-3));
    CHECK(a.contains(2));
    CHECK_FALSE(a.contains(1));
    CHECK_THROWS_AS(ArrayGeometry({0, 0, 1}, 1e-3, 0), InvalidArgument);
    CHECK_THROWS_AS(ArrayGeometry({0, 1}, 0.0, 0), InvalidArgument);
    CHECK_THROWS_AS(ArrayGeometry({}, 1e-3, 0), InvalidArgument);
}

TEST_CASE("make_fractal unrolls the recursion")
{
    CHECK(make_fractal({0, 1}, 0, 1.0).elements() == ints({0}));
    CHECK(make_fractal({0, 1}, 2, 1.0).elements() == ints({0, 1, 3, 4}));
    const ArrayGeometry w4 = make_fractal({0, 1}, 4, 1.0);
    CHECK(w4.elements() ==
          ints({0, 1, 3, 4, 9, 10, 12, 13, 27, 28, 30, 31, 36, 37, 39, 40}));
    CHECK(w4.size() == 16);
    CHECK_THROWS_AS(make_fractal({1, 2}, 2, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_fractal({0, 1}, -1, 1.0), InvalidArgument);
    const ArrayGeometry gen({0, 1}, 2.0, 0);
    CHECK(make_fractal(gen, 2).elements() == ints({0, 1, 3, 4}));
    CHECK(make_fractal(gen, 2).pitch() == 2.0);
}

TEST_CASE("center_in_aperture places the fractal inside the ULA")
{
    const ArrayGeometry ula = make_ula(64, 1.0);
    const ArrayGeometry u = center_in_aperture(make_fractal({0, 1}, 4, 1.0), ula);
    CHECK(u.min() == 11);
    CHECK(u.max() == 51);
    CHECK(u.center() == 32);
    for (int e : u.elements())
        CHECK(ula.contains(e));
    CHECK_THROWS_AS(center_in_aperture(make_ula(70, 1.0), ula), InvalidArgument);
}

TEST_CASE("sumset examples")
{
    CHECK(sumset(ArrayGeometry({0}, 1.0, 0)).elements() == ints({0}));
    CHECK(sumset(ArrayGeometry({0, 1, 3, 4}, 1.0, 0)).elements() ==
          ints({0, 1, 2, 3, 4, 5, 6, 7, 8}));
    const ArrayGeometry s = sumset(make_ula(9, 1.0));
    CHECK(s.size() == 17);
    CHECK(s.min() == 0);
    CHECK(s.max() == 16);
    CHECK(s.center() == 8);
}

TEST_CASE("fractal sum co-array is contiguous for r <= 6")
{
    for (int r = 0; r <= 6; ++r) {
        const ArrayGeometry w = make_fractal({0, 1}, r, 1.0);
        const ArrayGeometry s = sumset(w);
        std::vector<int> expect(static_cast<std::size_t>(2 * w.max() + 1));
        for (std::size_t i = 0; i < expect.size(); ++i)
            expect[i] = static_cast<int>(i);
        CHECK(s.elements() == expect);
    }
}

TEST_CASE("sumset properties on random sets")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pick(0, 40);
    for (int trial = 0; trial < 50; ++trial) {
        std::set<int> e;
        const int n = 1 + static_cast<int>(rng() % 12);
        while (static_cast<int>(e.size()) < n)
            e.insert(pick(rng));
        std::vector<int> v(e.begin(), e.end());
        const ArrayGeometry a(v, 1.0, v.front());
        std::shuffle(v.begin(), v.end(), rng);
        const ArrayGeometry b(v, 1.0, a.center());
        const ArrayGeometry sa = sumset(a);
        CHECK(sa == sumset(b));
        CHECK(sa.min() == 2 * a.min());
        CHECK(sa.max() == 2 * a.max());
        CHECK(sa.size() <= a.size() * (a.size() + 1) / 2);
        // apodization mass equals |a|^2 and matches brute force
        const Apodization ap = intrinsic_apodization(a);
        CHECK(ap.total() == a.size() * a.size());
        const std::vector<int> w = pair_counts(a);
        for (std::size_t i = 0; i < w.size(); ++i)
            CHECK(ap.weight(2 * a.min() + static_cast<int>(i)) == w[i]);
    }
}

TEST_CASE("intrinsic apodization examples")
{
    auto weights = [](std::vector<int> e) {
        const Apodization ap = intrinsic_apodization(ArrayGeometry(e, 1.0, 0));
        return std::vector<int>(ap.weights.data(), ap.weights.data() + ap.weights.size());
    };
    CHECK(weights({0, 1}) == ints({1, 2, 1}));
    CHECK(weights({0, 1, 2}) == ints({1, 2, 3, 2, 1}));
    CHECK(weights({0, 1, 3, 4}) == ints({1, 2, 1, 2, 4, 2, 1, 2, 1}));
    const Apodization ap = intrinsic_apodization(ArrayGeometry({0, 1}, 1.0, 0));
    CHECK(ap.weight(-1) == 0);
    CHECK(ap.weight(3) == 0);
}

TEST_CASE("beampattern")
{
    const double w0 = 2 * kPi * 3.4e6, c = 1540.0, pitch = c / 3.4e6 / 2;
    RealVector zero(1);
    zero << 0.0;
    const ComplexVector h = beampattern(make_ula(7, pitch), zero, w0, c);
    CHECK(std::abs(h[0] - Complex(7.0)) < 1e-12);

    const ArrayGeometry u = make_fractal({0, 1}, 2, pitch);
    const Apodization ap = intrinsic_apodization(u);
    const ArrayGeometry s = sumset(u);
    const ComplexVector hc = beampattern(s, ap, zero, w0, c);
    CHECK(std::abs(hc[0] - Complex(16.0)) < 1e-12);

    // H_COBA = H_DAS^2 on a dense grid
    RealVector th = RealVector::LinSpaced(721, -kPi / 2 * 0.999, kPi / 2 * 0.999);
    const ComplexVector hd = beampattern(u, th, w0, c);
    const ComplexVector hco = beampattern(s, ap, th, w0, c);
    double worst = 0.0;
    for (Index i = 0; i < th.size(); ++i)
        worst = std::max(worst, std::abs(hco[i] - hd[i] * hd[i]));
    CHECK(worst <= 1e-9 * 16.0);
}
