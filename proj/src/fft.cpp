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

#include "cobalt/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace cobalt::dsp {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are made once per (length, direction) and kept for the process.
fftw_plan plan_for(Index n, int sign)
{
    static std::mutex mu;
    static std::map<std::pair<Index, int>, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(mu);
    auto &p = plans[{n, sign}];
    if (!p) {
        std::vector<Complex> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
        p = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex *>(a.data()),
                             reinterpret_cast<fftw_complex *>(b.data()), sign,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    return p;
}

void execute(const Complex *in, Complex *out, Index n, int sign)
{
    // FFTW does not write to the input of an out-of-place transform.
    fftw_execute_dft(plan_for(n, sign),
                     reinterpret_cast<fftw_complex *>(const_cast<Complex *>(in)),
                     reinterpret_cast<fftw_complex *>(out));
}

} // namespace

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

ComplexVector fft(const ComplexVector &x)
{
    ComplexVector out(x.size());
    if (x.size() == 0)
        return out;
    execute(x.data(), out.data(), x.size(), FFTW_FORWARD);
    return out;
}

void fft(const ComplexVector &x, ComplexVector &out)
{
    out.resize(x.size());
    if (x.size() == 0)
        return;
    if (out.data() == x.data())
        throw InvalidArgument("in-place transform is not supported");
    execute(x.data(), out.data(), x.size(), FFTW_FORWARD);
}

ComplexVector ifft(const ComplexVector &x)
{
    ComplexVector out(x.size());
    if (x.size() == 0)
        return out;
    execute(x.data(), out.data(), x.size(), FFTW_BACKWARD);
    return out / static_cast<double>(x.size());
}

ComplexVector fft(const RealVector &x)
{
    return fft(ComplexVector(x.cast<Complex>()));
}

ComplexVector convolve(const ComplexVector &a, const ComplexVector &b)
{
    if (a.size() == 0 || b.size() == 0)
        return ComplexVector();
    const Index out_len = a.size() + b.size() - 1;
    const auto n = static_cast<Index>(next_pow2(static_cast<std::size_t>(out_len)));
    ComplexVector pa = ComplexVector::Zero(n), pb = ComplexVector::Zero(n);
    pa.head(a.size()) = a;
    pb.head(b.size()) = b;
    ComplexVector prod = fft(pa).cwiseProduct(fft(pb));
    return ifft(prod).head(out_len);
}

ComplexVector analytic_signal(const RealVector &x)
{
    const Index n = x.size();
    if (n == 0)
        return ComplexVector();
    ComplexVector spec = fft(x);
    // Keep DC (and Nyquist for even n), double positive bins, drop negative.
    const Index half = n / 2;
    for (Index k = 1; k < n; ++k) {
        if (k < (n + 1) / 2)
            spec[k] *= 2.0;
        else if (!(n % 2 == 0 && k == half))
            spec[k] = 0.0;
    }
    return ifft(spec);
}

namespace {

template <bool Forward>
void transform2(ComplexRowMatrix &m)
{
    ComplexVector buf;
    for (Index r = 0; r < m.rows(); ++r) {
        buf = m.row(r).transpose();
        m.row(r) = (Forward ? fft(buf) : ifft(buf)).transpose();
    }
    for (Index c = 0; c < m.cols(); ++c) {
        buf = m.col(c);
        m.col(c) = Forward ? fft(buf) : ifft(buf);
    }
}

} // namespace

void fft2(ComplexRowMatrix &m) { transform2<true>(m); }
void ifft2(ComplexRowMatrix &m) { transform2<false>(m); }

} // namespace cobalt::dsp
