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

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace cobalt {

ArrayGeometry::ArrayGeometry(std::vector<int> elements, double pitch_m, int center_index)
    : elements_(std::move(elements)), pitch_(pitch_m), center_(center_index)
{
    if (elements_.empty())
        throw InvalidArgument("array geometry needs at least one element");
    if (!(pitch_ > 0.0) || !std::isfinite(pitch_))
        throw InvalidArgument("array pitch must be positive");
    std::sort(elements_.begin(), elements_.end());
    if (std::adjacent_find(elements_.begin(), elements_.end()) != elements_.end())
        throw InvalidArgument("duplicate element index in array geometry");
}

RealVector ArrayGeometry::positions() const
{
    RealVector out(size());
    for (Index i = 0; i < size(); ++i)
        out[i] = position(elements_[static_cast<std::size_t>(i)]);
    return out;
}

bool ArrayGeometry::contains(int element) const
{
    return std::binary_search(elements_.begin(), elements_.end(), element);
}

ArrayGeometry ArrayGeometry::shifted(int offset) const
{
    std::vector<int> e(elements_);
    for (int &x : e)
        x += offset;
    return ArrayGeometry(std::move(e), pitch_, center_);
}

bool ArrayGeometry::operator==(const ArrayGeometry &o) const
{
    return elements_ == o.elements_ && pitch_ == o.pitch_ && center_ == o.center_;
}

ArrayGeometry make_ula(int num_elements, double pitch_m)
{
    if (num_elements < 1)
        throw InvalidArgument("ULA needs a positive element count, got " +
                              std::to_string(num_elements));
    std::vector<int> e(static_cast<std::size_t>(num_elements));
    for (int i = 0; i < num_elements; ++i)
        e[static_cast<std::size_t>(i)] = i;
    return ArrayGeometry(std::move(e), pitch_m, num_elements / 2);
}

ArrayGeometry make_fractal(const std::vector<int> &generator, int order, double pitch_m)
{
    if (generator.empty())
        throw InvalidArgument("fractal generator is empty");
    if (order < 0)
        throw InvalidArgument("fractal order must be nonnegative");
    const auto [gmin, gmax] = std::minmax_element(generator.begin(), generator.end());
    if (*gmin != 0)
        throw InvalidArgument("fractal generator must have 0 as its smallest element");

    const long long L = 2LL * *gmax + 1;
    std::set<long long> w{0};
    long long scale = 1;
    for (int r = 0; r < order; ++r) {
        std::set<long long> next;
        for (int n : generator)
            for (long long x : w)
                next.insert(x + n * scale);
        w.swap(next);
        scale *= L;
        if (scale > (1LL << 30))
            throw InvalidArgument("fractal order too large for integer element indices");
    }
    std::vector<int> e(w.begin(), w.end());
    const int center = (e.back() + 1) / 2;
    return ArrayGeometry(std::move(e), pitch_m, center);
}

ArrayGeometry make_fractal(const ArrayGeometry &generator, int order)
{
    return make_fractal(generator.elements(), order, generator.pitch());
}

ArrayGeometry center_in_aperture(const ArrayGeometry &thinned, const ArrayGeometry &full)
{
    const int span = thinned.max() - thinned.min();
    const int full_span = full.max() - full.min();
    if (span > full_span)
        throw InvalidArgument("thinned array is wider than the full aperture");
    const int offset = full.min() + (full_span - span) / 2 - thinned.min();
    std::vector<int> e(thinned.elements());
    for (int &x : e)
        x += offset;
    return ArrayGeometry(std::move(e), full.pitch(), full.center());
}

ArrayGeometry sumset(const ArrayGeometry &a)
{
    const int lo = 2 * a.min(), hi = 2 * a.max();
    std::vector<char> hit(static_cast<std::size_t>(hi - lo + 1), 0);
    for (int x : a.elements())
        for (int y : a.elements())
            hit[static_cast<std::size_t>(x + y - lo)] = 1;
    std::vector<int> e;
    for (int i = 0; i <= hi - lo; ++i)
        if (hit[static_cast<std::size_t>(i)])
            e.push_back(lo + i);
    return ArrayGeometry(std::move(e), a.pitch(), 2 * a.center());
}

int Apodization::weight(int index) const
{
    const int i = index - offset;
    if (i < 0 || i >= weights.size())
        return 0;
    return weights[i];
}

Apodization intrinsic_apodization(const ArrayGeometry &a)
{
    Apodization out;
    out.offset = 2 * a.min();
    out.weights = Eigen::VectorXi::Zero(2 * (a.max() - a.min()) + 1);
    for (int x : a.elements())
        for (int y : a.elements())
            ++out.weights[x + y - out.offset];
    return out;
}

ComplexVector beampattern(const ArrayGeometry &a, const RealVector &thetas, double omega0,
                          double c)
{
    ComplexVector h = ComplexVector::Zero(thetas.size());
    const RealVector x = a.positions();
    for (Index i = 0; i < thetas.size(); ++i) {
        const double kx = omega0 * std::sin(thetas[i]) / c;
        for (Index e = 0; e < x.size(); ++e)
            h[i] += std::polar(1.0, -kx * x[e]);
    }
    return h;
}

ComplexVector beampattern(const ArrayGeometry &a, const Apodization &apod,
                          const RealVector &thetas, double omega0, double c)
{
    ComplexVector h = ComplexVector::Zero(thetas.size());
    for (Index i = 0; i < thetas.size(); ++i) {
        const double kx = omega0 * std::sin(thetas[i]) / c;
        for (Index n = 0; n < apod.weights.size(); ++n) {
            const int w = apod.weights[n];
            if (w == 0)
                continue;
            const double x = a.position(apod.offset + static_cast<int>(n));
            h[i] += static_cast<double>(w) * std::polar(1.0, -kx * x);
        }
    }
    return h;
}

} // namespace cobalt
