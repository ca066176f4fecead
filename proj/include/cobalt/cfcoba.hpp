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

#ifndef COBALT_CFCOBA_HPP
#define COBALT_CFCOBA_HPP

#include "cobalt/das.hpp"
#include "cobalt/fourier.hpp"
#include "cobalt/setup.hpp"
#include "cobalt/types.hpp"

#include <optional>

namespace cobalt {

// Coefficients of the convolutionally beamformed signal on the sumset of a
// band. Stored unscaled: the time-domain line is sum_k c[k] exp(j 2 pi k t / T).
struct CobaSpectrum {
    ComplexVector coefficients;
    BandSpec band;        // beta_sN
    BandSpec sumset_band; // {2 first, ..., 2 last}
    Index scale = 0;      // 2 * band.size - 1 samples suffice to represent the products
};

// 2-D self-convolution (co-array x coefficient index) of the delayed
// coefficient matrix with channels laid out by element position.
// Row j is co-array index 2 * min + j, column i is sumset index 2 * first + i.
ComplexRowMatrix coefficient_coarray_convolution(const SpectralFrame &delayed);

CobaSpectrum cfcoba_spectrum(const SpectralFrame &delayed);

// Same products formed in time at the full acquisition rate: each channel
// is synthesized on num_samples points, squared-summed across the
// co-array, and transformed back. Only the sumset bins are returned.
CobaSpectrum fullrate_coba_spectrum(const SpectralFrame &delayed);

struct ConsistencyReport {
    double max_abs_deviation = 0.0;
    double reference_peak = 0.0;
    double relative() const { return reference_peak > 0.0 ? max_abs_deviation / reference_peak : max_abs_deviation; }
};

// Compares the compressed coefficient-domain spectrum of frame_sub with the
// full-rate spectrum of frame_full restricted to frame_sub's band.
ConsistencyReport consistency_with_fullrate(const SpectralFrame &frame_full,
                                            const SpectralFrame &frame_sub);

enum class PulseKernel {
    kAcquisitionFiltered, // (h band-limited to beta_sN)^2, matches compressed data
    kUnfiltered,          // h^2
};

struct RecoveryOptions {
    PulseKernel kernel = PulseKernel::kAcquisitionFiltered;
    std::optional<Index> expected_sparsity;
    double noise_epsilon = 0.0;
    int oversample = 16; // quadrature points per acquisition sample for G
};

// A = G D: G diagonal pulse spectrum on the sumset band, D the matching rows
// of the num_samples-point DFT. Unknowns are real spike amplitudes on the
// acquisition grid.
class RecoveryModel {
public:
    RecoveryModel(ComplexVector g_spectrum, BandSpec sumset_band, Index grid_size,
                  double grid_step_s, double noise_epsilon, ComplexVector render_kernel);

    const ComplexVector &g_spectrum() const noexcept { return g_; }
    const BandSpec &sumset_band() const noexcept { return sumset_; }
    Index grid_size() const noexcept { return n_; }
    double grid_step() const noexcept { return step_; }
    double noise_epsilon() const noexcept { return epsilon_; }
    Index rows() const noexcept { return g_.size(); }
    // Analytic line shape sampled on the acquisition grid from t = 0.
    const ComplexVector &render_kernel() const noexcept { return kernel_; }

    ComplexVector apply(const RealVector &b) const;
    RealVector adjoint(const ComplexVector &r) const;
    // Column q of A.
    ComplexVector column(Index q) const;
    Eigen::MatrixXcd dense() const;
    // Squared spectral norm of A.
    double lipschitz() const;

    // sum_q b_q g(t - q T_s) on the acquisition grid.
    ComplexVector render(const RealVector &b) const;

private:
    ComplexVector g_;
    BandSpec sumset_;
    Index n_;
    double step_;
    double epsilon_;
    ComplexVector kernel_;
};

RecoveryModel build_recovery_model(const Pulse &p, const BandSpec &band, const ImagingSetup &setup,
                                   const RecoveryOptions &opts = {});

// (1/T) int f(t) exp(-j 2 pi k t / T) dt for k in `band`, f = h or h^2.
ComplexVector pulse_series(const Pulse &p, const BandSpec &band, double period, bool squared,
                           int oversample = 16);

struct SolverConfig {
    int max_iterations = 2000;
    double relative_tolerance = 1e-6;
    std::optional<double> epsilon;  // residual bound; model epsilon when unset
    bool auto_epsilon = false;      // estimate the noise floor from the residual
    double support_threshold = 1e-2; // relative to the largest coefficient
    bool debias = true;
};

struct SolverDiagnostics {
    int iterations = 0;
    double final_residual = 0.0;
    Index support_size = 0;
    double wall_time_s = 0.0;
    double epsilon = 0.0;
    double lambda = 0.0;
};

struct RecoveryResult {
    BeamformedLine line;
    RealVector coefficients;
    SolverDiagnostics diagnostics;
};

// min ||b||_1 s.t. ||A b - c||_2 <= epsilon by accelerated proximal gradient
// with a decreasing lambda sequence and a least-squares refit on the support.
RecoveryResult recover_line(const CobaSpectrum &spec, const RecoveryModel &model,
                            const SolverConfig &cfg = {});

} // namespace cobalt

#endif
