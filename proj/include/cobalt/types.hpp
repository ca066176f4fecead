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

#ifndef COBALT_TYPES_HPP
#define COBALT_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace cobalt {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

// Channel-major storage: one row per channel, one column per sample or
// coefficient, so per-channel access is contiguous.
using RealRowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexRowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class InvalidState : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class NotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when the distortion LUT cannot meet its truncation-energy target
// inside the configured window cap.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string &what, double tail_energy)
        : std::runtime_error(what), tail_energy_(tail_energy) {}
    double tail_energy() const noexcept { return tail_energy_; }

private:
    double tail_energy_;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string &what, int iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

inline constexpr double kPi = 3.14159265358979323846;

} // namespace cobalt

#endif
