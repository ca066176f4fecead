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

#ifndef COBALT_GEOMETRY_HPP
#define COBALT_GEOMETRY_HPP

#include "cobalt/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cobalt {

// Linear array described by integer element indices on a pitch grid.
// Element e sits at physical offset (e - center) * pitch along the x-axis.
class ArrayGeometry {
public:
    ArrayGeometry(std::vector<int> elements, double pitch_m, int center_index);

    const std::vector<int> &elements() const noexcept { return elements_; }
    double pitch() const noexcept { return pitch_; }
    int center() const noexcept { return center_; }
    Index size() const noexcept { return static_cast<Index>(elements_.size()); }
    int min() const noexcept { return elements_.front(); }
    int max() const noexcept { return elements_.back(); }

    double position(int element) const noexcept { return (element - center_) * pitch_; }

    // Offsets of every element in meters, in element order.
    RealVector positions() const;

    bool contains(int element) const;

    // Same element set shifted by `offset` pitches, center unchanged.
    ArrayGeometry shifted(int offset) const;

    bool operator==(const ArrayGeometry &o) const;

private:
    std::vector<int> elements_;
    double pitch_;
    int center_;
};

ArrayGeometry make_ula(int num_elements, double pitch_m);

// W_{r+1} = union over n in G of (W_r + n L^r), L = 2 max(G) + 1, W_0 = {0}.
ArrayGeometry make_fractal(const ArrayGeometry &generator, int order);
ArrayGeometry make_fractal(const std::vector<int> &generator, int order, double pitch_m);

// Places a thinned array inside a full aperture: shifts it to the middle of
// `full` and adopts the full array's reference element.
ArrayGeometry center_in_aperture(const ArrayGeometry &thinned, const ArrayGeometry &full);

// Distinct pairwise sums. The result's reference element is 2 * center so
// co-array positions stay consistent with the physical array.
ArrayGeometry sumset(const ArrayGeometry &a);

struct Apodization {
    int offset = 0;           // index of weights[0]
    Eigen::VectorXi weights;  // over [offset, offset + weights.size())

    int weight(int index) const;
    long long total() const { return weights.cast<long long>().sum(); }
};

// Self-convolution of the element indicator.
Apodization intrinsic_apodization(const ArrayGeometry &a);

// Sum_e exp(-j w0 x_e sin(theta) / c) with unit weights.
ComplexVector beampattern(const ArrayGeometry &a, const RealVector &thetas, double omega0,
                          double c);

// Weighted pattern of a co-array. Weights are placed on index n with pitch
// and reference taken from `a`.
ComplexVector beampattern(const ArrayGeometry &a, const Apodization &apod,
                          const RealVector &thetas, double omega0, double c);

} // namespace cobalt

#endif
