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

#ifndef COBALT_IO_HPP
#define COBALT_IO_HPP

#include "cobalt/cfcoba.hpp"
#include "cobalt/geometry.hpp"
#include "cobalt/imaging.hpp"
#include "cobalt/setup.hpp"
#include "cobalt/simulator.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace cobalt {

using Json = nlohmann::ordered_json;

// Parses a JSON file; syntax errors report line and column.
Json read_json_file(const std::filesystem::path &file);

// Missing keys keep their defaults; wrong types raise ParseError naming the field.
Json to_json(const Pulse &p);
Pulse pulse_from_json(const Json &j, Pulse defaults = {});
Json to_json(const ImagingSetup &s);
ImagingSetup setup_from_json(const Json &j, ImagingSetup defaults = {});
Json to_json(const ArrayGeometry &g);
ArrayGeometry geometry_from_json(const Json &j);

// Scatterer list: [{"delay_s" | "depth_m", "amplitude", "angle_deg"}, ...],
// or an object holding it under "scatterers".
ScattererScene scene_from_json(const Json &j, double speed_of_sound, double pulse_support_s);
Json to_json(const ScattererScene &scene);

Json to_json(const SolverDiagnostics &d);
Json to_json(const MetricsReport &m);
std::string metrics_csv(const MetricsReport &m);

struct AcquisitionHeader {
    int format_version = 1;
    ImagingSetup setup;
    ArrayGeometry geometry{{0}, 1.0, 0};
    std::vector<double> angles_rad;
    Index channels = 0;
    Index samples = 0;
    Json provenance = Json::object(); // scene, seed, effective config

    Json to_json() const;
    static AcquisitionHeader from_json(const Json &j);
};

// Layout: "CBLTACQ1", u64 header length, header JSON, float32 payload
// [angle][channel][sample], u64 FNV-1a of the header bytes, "CBLTEND1".
// All integers and floats little-endian.
class AcquisitionWriter {
public:
    AcquisitionWriter(const std::filesystem::path &file, AcquisitionHeader header);
    ~AcquisitionWriter();
    AcquisitionWriter(const AcquisitionWriter &) = delete;
    AcquisitionWriter &operator=(const AcquisitionWriter &) = delete;

    // Frames must arrive in header angle order.
    void write(const ChannelFrame &frame);
    // Writes the trailer and moves the temporary file into place.
    void close();

private:
    std::filesystem::path file_, tmp_;
    AcquisitionHeader header_;
    std::string header_text_;
    std::ofstream os_;
    std::size_t written_ = 0;
    bool closed_ = false;
};

class AcquisitionReader {
public:
    explicit AcquisitionReader(const std::filesystem::path &file);

    const AcquisitionHeader &header() const noexcept { return header_; }
    std::size_t num_angles() const noexcept { return header_.angles_rad.size(); }
    // Reads one angle from disk.
    ChannelFrame read(std::size_t angle_index) const;

private:
    std::filesystem::path file_;
    AcquisitionHeader header_;
    std::uint64_t payload_offset_ = 0;
};

std::uint64_t fnv1a(const std::string &bytes);

// Maps [-dr, 0] dB to 0..255; NaN pixels are written as 0.
void write_pgm(const std::filesystem::path &file, const RealRowMatrix &db, double dynamic_range_db);
void write_csv(const std::filesystem::path &file, const RealRowMatrix &m);
RealRowMatrix read_csv(const std::filesystem::path &file);

// Writes via a temporary file and rename.
void write_text_atomic(const std::filesystem::path &file, const std::string &text);

} // namespace cobalt

#endif
