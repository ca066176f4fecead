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

#ifndef COBALT_COBA_HPP
#define COBALT_COBA_HPP

#include "cobalt/das.hpp"
#include "cobalt/geometry.hpp"
#include "cobalt/simulator.hpp"
#include "cobalt/types.hpp"

namespace cobalt {

struct NormalizedFrame {
    ComplexRowMatrix values; // channels x samples, rows in geometry element order
    ArrayGeometry geometry{{0}, 1.0, 0};
    double steering_angle = 0.0;
    double sample_rate_hz = 0.0;
    bool analytic = false;
};

struct NormalizeOptions {
    bool analytic = true;       // Hilbert transform of each channel before normalizing
    bool root_magnitude = true; // u = exp(j arg x) sqrt|x|; off keeps x unchanged
};

NormalizedFrame normalize(const ChannelFrame &delayed, const NormalizeOptions &opts = {});

// Elementwise exp(j arg x) sqrt|x|.
ComplexRowMatrix root_magnitude(const ComplexRowMatrix &x);

// Per sample, the lateral self-convolution of the channel vector laid out by
// element position. Row j of the result is co-array index 2 * min + j.
ComplexRowMatrix coarray_convolution(const ComplexRowMatrix &values, const ArrayGeometry &geom);

// Sum over the co-array of coarray_convolution; equals (sum_m u_m)^2 per sample.
ComplexVector coarray_sum(const ComplexRowMatrix &values, const ArrayGeometry &geom);

BeamformedLine coba_beamform(const NormalizedFrame &nf);

} // namespace cobalt

#endif
