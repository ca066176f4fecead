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

#ifndef COBALT_FFT_HPP
#define COBALT_FFT_HPP

#include "cobalt/types.hpp"

#include <cstddef>

namespace cobalt::dsp {

std::size_t next_pow2(std::size_t n);

// Unnormalized forward DFT of length x.size().
ComplexVector fft(const ComplexVector &x);

// Inverse DFT including the 1/N factor.
ComplexVector ifft(const ComplexVector &x);

ComplexVector fft(const RealVector &x);

// Forward transform into a caller-owned buffer, avoiding an allocation per call.
void fft(const ComplexVector &x, ComplexVector &out);

// Linear convolution of a and b (length a.size() + b.size() - 1) through a
// zero-padded power-of-two transform.
ComplexVector convolve(const ComplexVector &a, const ComplexVector &b);

// Analytic signal x + j*H{x} via the one-sided spectrum.
ComplexVector analytic_signal(const RealVector &x);

// In-place 2-D transforms on a row-major matrix (rows, then columns).
void fft2(ComplexRowMatrix &m);
void ifft2(ComplexRowMatrix &m);

} // namespace cobalt::dsp

#endif
