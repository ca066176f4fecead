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

#ifndef COBALT_TESTS_SUPPORT_HPP
#define COBALT_TESTS_SUPPORT_HPP

#include "cobalt/setup.hpp"
#include "cobalt/types.hpp"

#include <random>

namespace cobalt::test {

// 100 us window at the GE rates: 1600 samples, band of 160 around 3.4 MHz.
inline ImagingSetup small_setup()
{
    ImagingSetup s = ge_setup();
    s.depth_time_s = 100e-6;
    s.band_size = 160;
    s.sub_band_size = 40;
    return s;
}

inline ComplexRowMatrix random_complex(Index rows, Index cols, std::mt19937_64 &rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexRowMatrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i)
        m.data()[i] = Complex(n(rng), n(rng));
    return m;
}

inline double max_abs(const ComplexVector &v) { return v.cwiseAbs().maxCoeff(); }

} // namespace cobalt::test

#endif
