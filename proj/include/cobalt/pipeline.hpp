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

#ifndef COBALT_PIPELINE_HPP
#define COBALT_PIPELINE_HPP

#include "cobalt/cfcoba.hpp"
#include "cobalt/coba.hpp"
#include "cobalt/das.hpp"
#include "cobalt/fourier.hpp"
#include "cobalt/setup.hpp"
#include "cobalt/simulator.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace cobalt {

struct BeamformOptions {
    Method method = Method::kDAS;
    InterpolationKernel kernel{};
    LutOptions lut{};
    std::filesystem::path lut_cache; // empty: build LUTs in memory
    NormalizeOptions normalize{};
    RecoveryOptions recovery{};
    SolverConfig solver{};
};

struct LineResult {
    BeamformedLine line;
    std::optional<SolverDiagnostics> diagnostics;
};

// One scan line from an undelayed frame; the frame's steering angle selects
// the receive delay.
//   das    time-domain delay and mean
//   fdbf   Fourier-domain delay on the band, mean, real synthesis
//   coba   time-domain delay, normalization, co-array convolution
//   fcoba  Fourier-domain delay on the band, co-array products of the
//          one-sided channel signals
//   cfcoba Fourier-domain delay on the sub-band, coefficient-domain
//          convolution, sparse recovery (direct synthesis when the
//          sub-band is the whole band)
LineResult beamform_line(const ChannelFrame &frame, const ImagingSetup &setup,
                         const BeamformOptions &opts);

// Runs f(i) for i in [0, n) on up to `threads` workers. The first exception
// is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &f);

} // namespace cobalt

#endif
