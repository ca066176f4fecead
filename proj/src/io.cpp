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

#include "cobalt/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cobalt {

static_assert(std::endian::native == std::endian::little,
              "acquisition files are written in host order and must be little-endian");

namespace {

constexpr char kMagic[8] = {'C', 'B', 'L', 'T', 'A', 'C', 'Q', '1'};
constexpr char kEndMagic[8] = {'C', 'B', 'L', 'T', 'E', 'N', 'D', '1'};

template <typename T>
T field(const Json &j, const char *key, const std::string &where, T fallback)
{
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ParseError(where + "." + key + ": unexpected type " + std::string(j.at(key).type_name()));
    }
}

void require_object(const Json &j, const std::string &where)
{
    if (!j.is_object())
        throw ParseError(where + ": expected an object");
}

std::string position_of(const std::string &text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double deg(double rad) { return rad * 180.0 / kPi; }
double rad(double deg) { return deg * kPi / 180.0; }

} // namespace

std::uint64_t fnv1a(const std::string &bytes)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

Json read_json_file(const std::filesystem::path &file)
{
    std::ifstream is(file);
    if (!is)
        throw ParseError("cannot open " + file.string());
    std::stringstream ss;
    ss << is.rdbuf();
    const std::string text = ss.str();
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(file.string() + ": " + position_of(text, e.byte > 0 ? e.byte - 1 : 0) +
                         ": invalid JSON");
    }
}

Json to_json(const Pulse &p)
{
    return Json{{"carrier_hz", p.carrier_hz},
                {"envelope_sigma_s", p.envelope_sigma_s},
                {"support_s", p.support_s},
                {"sample_rate_hz", p.sample_rate_hz}};
}

Pulse pulse_from_json(const Json &j, Pulse d)
{
    require_object(j, "pulse");
    Pulse p;
    p.carrier_hz = field(j, "carrier_hz", "pulse", d.carrier_hz);
    p.envelope_sigma_s = field(j, "envelope_sigma_s", "pulse", d.envelope_sigma_s);
    p.support_s = field(j, "support_s", "pulse", j.contains("envelope_sigma_s") ? 8.0 * p.envelope_sigma_s : d.support_s);
    p.sample_rate_hz = field(j, "sample_rate_hz", "pulse", d.sample_rate_hz);
    return p;
}

Json to_json(const ImagingSetup &s)
{
    Json angles = Json::array();
    for (double a : s.angles_rad)
        angles.push_back(deg(a));
    Json j{{"speed_of_sound", s.speed_of_sound},
           {"depth_time_s", s.depth_time_s},
           {"carrier_hz", s.carrier_hz},
           {"sample_rate_hz", s.sample_rate_hz},
           {"angles_deg", angles},
           {"band_size", s.band_size},
           {"sub_band_size", s.sub_band_size},
           {"blank_time_s", s.blank_time_s},
           {"pulse", to_json(s.pulse)}};
    if (s.band_start)
        j["band_start"] = *s.band_start;
    return j;
}

ImagingSetup setup_from_json(const Json &j, ImagingSetup d)
{
    require_object(j, "setup");
    ImagingSetup s = d;
    s.speed_of_sound = field(j, "speed_of_sound", "setup", d.speed_of_sound);
    s.depth_time_s = field(j, "depth_time_s", "setup", d.depth_time_s);
    s.carrier_hz = field(j, "carrier_hz", "setup", d.carrier_hz);
    s.sample_rate_hz = field(j, "sample_rate_hz", "setup", d.sample_rate_hz);
    if (j.contains("angles_deg")) {
        const auto a = field(j, "angles_deg", "setup", std::vector<double>{});
        s.angles_rad.clear();
        for (double v : a)
            s.angles_rad.push_back(rad(v));
    }
    if (j.contains("band_start"))
        s.band_start = field(j, "band_start", "setup", Index{0});
    s.band_size = field(j, "band_size", "setup", d.band_size);
    s.sub_band_size = field(j, "sub_band_size", "setup", d.sub_band_size);
    s.blank_time_s = field(j, "blank_time_s", "setup", d.blank_time_s);
    Pulse pd = d.pulse;
    if (j.contains("carrier_hz"))
        pd.carrier_hz = s.carrier_hz;
    if (j.contains("sample_rate_hz"))
        pd.sample_rate_hz = s.sample_rate_hz;
    s.pulse = j.contains("pulse") ? pulse_from_json(j.at("pulse"), pd) : pd;
    return s;
}

Json to_json(const ArrayGeometry &g)
{
    return Json{{"elements", g.elements()}, {"pitch_m", g.pitch()}, {"center_index", g.center()}};
}

ArrayGeometry geometry_from_json(const Json &j)
{
    require_object(j, "geometry");
    if (!j.contains("elements") || !j.contains("pitch_m"))
        throw ParseError("geometry: needs 'elements' and 'pitch_m'");
    const auto e = field(j, "elements", "geometry", std::vector<int>{});
    const double pitch = field(j, "pitch_m", "geometry", 0.0);
    const int center = field(j, "center_index", "geometry", e.empty() ? 0 : e.front());
    try {
        return ArrayGeometry(e, pitch, center);
    } catch (const InvalidArgument &ex) {
        throw ParseError(std::string("geometry: ") + ex.what());
    }
}

ScattererScene scene_from_json(const Json &j, double speed_of_sound, double pulse_support_s)
{
    const Json &list = j.is_object() && j.contains("scatterers") ? j.at("scatterers") : j;
    if (!list.is_array())
        throw ParseError("scene: expected an array of scatterers");
    std::vector<Scatterer> sc;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "scene[" + std::to_string(i) + "]";
        const Json &e = list[i];
        require_object(e, where);
        Scatterer s;
        if (e.contains("delay_s"))
            s.delay_s = field(e, "delay_s", where, 0.0);
        else if (e.contains("depth_m"))
            s.delay_s = depth_to_delay(field(e, "depth_m", where, 0.0), speed_of_sound);
        else
            throw ParseError(where + ": needs 'delay_s' or 'depth_m'");
        s.amplitude = field(e, "amplitude", where, 1.0);
        s.angle_rad = rad(field(e, "angle_deg", where, 0.0));
        sc.push_back(s);
    }
    try {
        return ScattererScene(std::move(sc), speed_of_sound, pulse_support_s);
    } catch (const InvalidArgument &ex) {
        throw ParseError(std::string("scene: ") + ex.what());
    }
}

Json to_json(const ScattererScene &scene)
{
    Json list = Json::array();
    for (const Scatterer &s : scene.scatterers())
        list.push_back(Json{{"delay_s", s.delay_s}, {"amplitude", s.amplitude}, {"angle_deg", deg(s.angle_rad)}});
    return list;
}

Json to_json(const SolverDiagnostics &d)
{
    return Json{{"iterations", d.iterations},
                {"final_residual", d.final_residual},
                {"support_size", d.support_size},
                {"wall_time_s", d.wall_time_s},
                {"epsilon", d.epsilon},
                {"lambda", d.lambda}};
}

Json to_json(const MetricsReport &m)
{
    Json j = Json::object();
    if (m.reduction)
        j["reduction_factor"] = Json{{"value", m.reduction->value()}, {"exact", m.reduction->str()}};
    Json f = Json::array();
    for (const auto &e : m.fwhm_mm)
        f.push_back(Json{{"target", e.target}, {"fwhm_mm", e.width_mm}});
    j["fwhm"] = f;
    Json c = Json::array();
    for (const auto &e : m.cnr)
        c.push_back(Json{{"regions", e.regions},
                         {"cnr_db", std::isfinite(e.cnr_db) ? Json(e.cnr_db) : Json("-inf")}});
    j["cnr"] = c;
    Json n = Json::array();
    for (const auto &e : m.nrmse)
        n.push_back(Json{{"method", e.method}, {"reference", e.reference}, {"nrmse", e.value}});
    j["nrmse"] = n;
    return j;
}

std::string metrics_csv(const MetricsReport &m)
{
    std::ostringstream os;
    os << std::setprecision(10);
    os << "metric,subject,value\n";
    if (m.reduction)
        os << "reduction_factor,," << m.reduction->value() << "\n";
    for (const auto &e : m.fwhm_mm)
        os << "fwhm_mm," << e.target << "," << e.width_mm << "\n";
    for (const auto &e : m.cnr)
        os << "cnr_db," << e.regions << "," << e.cnr_db << "\n";
    for (const auto &e : m.nrmse)
        os << "nrmse," << e.method << " vs " << e.reference << "," << e.value << "\n";
    return os.str();
}

Json AcquisitionHeader::to_json() const
{
    Json angles = Json::array();
    for (double a : angles_rad)
        angles.push_back(a);
    return Json{{"format_version", format_version},
                {"setup", cobalt::to_json(setup)},
                {"geometry", cobalt::to_json(geometry)},
                {"angles_rad", angles},
                {"channels", channels},
                {"samples", samples},
                {"provenance", provenance}};
}

AcquisitionHeader AcquisitionHeader::from_json(const Json &j)
{
    require_object(j, "header");
    AcquisitionHeader h;
    h.format_version = field(j, "format_version", "header", 0);
    if (h.format_version != 1)
        throw ParseError("header.format_version: unsupported version " + std::to_string(h.format_version));
    if (!j.contains("setup") || !j.contains("geometry"))
        throw ParseError("header: needs 'setup' and 'geometry'");
    h.setup = setup_from_json(j.at("setup"));
    h.geometry = geometry_from_json(j.at("geometry"));
    h.angles_rad = field(j, "angles_rad", "header", std::vector<double>{});
    h.channels = field(j, "channels", "header", Index{0});
    h.samples = field(j, "samples", "header", Index{0});
    if (j.contains("provenance"))
        h.provenance = j.at("provenance");
    if (h.channels != h.geometry.size() || h.samples < 1 || h.angles_rad.empty())
        throw ParseError("header: inconsistent channel, sample or angle counts");
    return h;
}

AcquisitionWriter::AcquisitionWriter(const std::filesystem::path &file, AcquisitionHeader header)
    : file_(file), tmp_(file.string() + ".tmp"), header_(std::move(header))
{
    header_text_ = header_.to_json().dump();
    os_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!os_)
        throw ConfigError("cannot write " + tmp_.string());
    os_.write(kMagic, sizeof(kMagic));
    const std::uint64_t len = header_text_.size();
    os_.write(reinterpret_cast<const char *>(&len), sizeof(len));
    os_.write(header_text_.data(), static_cast<std::streamsize>(header_text_.size()));
}

AcquisitionWriter::~AcquisitionWriter()
{
    if (!closed_) {
        os_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_, ec);
    }
}

void AcquisitionWriter::write(const ChannelFrame &frame)
{
    if (closed_)
        throw InvalidState("acquisition writer already closed");
    if (written_ >= header_.angles_rad.size())
        throw InvalidState("more frames than header angles");
    if (frame.num_channels() != header_.channels || frame.num_samples() != header_.samples)
        throw InvalidArgument("frame dimensions do not match the header");
    std::vector<float> buf(static_cast<std::size_t>(frame.samples.size()));
    for (Index i = 0; i < frame.samples.size(); ++i)
        buf[static_cast<std::size_t>(i)] = static_cast<float>(frame.samples.data()[i]);
    os_.write(reinterpret_cast<const char *>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    ++written_;
}

void AcquisitionWriter::close()
{
    if (closed_)
        return;
    if (written_ != header_.angles_rad.size())
        throw InvalidState("acquisition file is missing frames");
    const std::uint64_t h = fnv1a(header_text_);
    os_.write(reinterpret_cast<const char *>(&h), sizeof(h));
    os_.write(kEndMagic, sizeof(kEndMagic));
    os_.close();
    if (!os_)
        throw ConfigError("failed writing " + tmp_.string());
    std::filesystem::rename(tmp_, file_);
    closed_ = true;
}

AcquisitionReader::AcquisitionReader(const std::filesystem::path &file) : file_(file)
{
    std::ifstream is(file, std::ios::binary);
    if (!is)
        throw NotFound("cannot open acquisition file " + file.string());
    char magic[8];
    std::uint64_t len = 0;
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw ParseError(file.string() + ": not an acquisition file");
    if (!is.read(reinterpret_cast<char *>(&len), sizeof(len)) || len > (1ULL << 30))
        throw ParseError(file.string() + ": bad header length");
    std::string text(len, '\0');
    if (!is.read(text.data(), static_cast<std::streamsize>(len)))
        throw ParseError(file.string() + ": truncated header");
    try {
        header_ = AcquisitionHeader::from_json(Json::parse(text));
    } catch (const nlohmann::json::exception &) {
        throw ParseError(file.string() + ": header is not valid JSON");
    }
    payload_offset_ = 8 + sizeof(len) + len;
    const std::uint64_t payload = static_cast<std::uint64_t>(header_.channels) *
                                  static_cast<std::uint64_t>(header_.samples) *
                                  header_.angles_rad.size() * sizeof(float);
    const auto size = std::filesystem::file_size(file);
    if (size != payload_offset_ + payload + 16)
        throw ParseError(file.string() + ": payload size does not match the header");
    is.seekg(static_cast<std::streamoff>(payload_offset_ + payload));
    std::uint64_t h = 0;
    char end[8];
    if (!is.read(reinterpret_cast<char *>(&h), sizeof(h)) || !is.read(end, 8) ||
        std::memcmp(end, kEndMagic, 8) != 0)
        throw ParseError(file.string() + ": missing trailer");
    if (h != fnv1a(text))
        throw ParseError(file.string() + ": header hash mismatch");
}

ChannelFrame AcquisitionReader::read(std::size_t angle_index) const
{
    if (angle_index >= num_angles())
        throw OutOfRange("angle index outside the acquisition");
    const std::size_t count = static_cast<std::size_t>(header_.channels * header_.samples);
    std::ifstream is(file_, std::ios::binary);
    is.seekg(static_cast<std::streamoff>(payload_offset_ + angle_index * count * sizeof(float)));
    std::vector<float> buf(count);
    if (!is.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(count * sizeof(float))))
        throw ParseError(file_.string() + ": truncated payload");
    ChannelFrame f;
    f.samples.resize(header_.channels, header_.samples);
    for (std::size_t i = 0; i < count; ++i)
        f.samples.data()[i] = buf[i];
    f.sample_rate_hz = header_.setup.sample_rate_hz;
    f.speed_of_sound = header_.setup.speed_of_sound;
    f.geometry = header_.geometry;
    f.steering_angle = header_.angles_rad[angle_index];
    return f;
}

void write_text_atomic(const std::filesystem::path &file, const std::string &text)
{
    const auto tmp = std::filesystem::path(file.string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw ConfigError("cannot write " + tmp.string());
        os << text;
        if (!os)
            throw ConfigError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

void write_pgm(const std::filesystem::path &file, const RealRowMatrix &db, double dynamic_range_db)
{
    std::string out = "P5\n" + std::to_string(db.cols()) + " " + std::to_string(db.rows()) + "\n255\n";
    for (Index r = 0; r < db.rows(); ++r)
        for (Index c = 0; c < db.cols(); ++c) {
            const double v = db(r, c);
            int g = 0;
            if (std::isfinite(v))
                g = static_cast<int>(std::lround(255.0 * std::clamp(1.0 + v / dynamic_range_db, 0.0, 1.0)));
            out.push_back(static_cast<char>(static_cast<unsigned char>(g)));
        }
    write_text_atomic(file, out);
}

void write_csv(const std::filesystem::path &file, const RealRowMatrix &m)
{
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c)
                os << ',';
            if (std::isnan(m(r, c)))
                os << "nan";
            else
                os << m(r, c);
        }
        os << '\n';
    }
    write_text_atomic(file, os.str());
}

RealRowMatrix read_csv(const std::filesystem::path &file)
{
    std::ifstream is(file);
    if (!is)
        throw NotFound("cannot open " + file.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (cell == "nan") {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size())
                    throw std::invalid_argument(cell);
            } catch (const std::exception &) {
                throw ParseError(file.string() + ": line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(file.string() + ": line " + std::to_string(lineno) + ": ragged row");
        rows.push_back(std::move(row));
    }
    RealRowMatrix m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return m;
}

} // namespace cobalt
