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
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cobalt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name)
{
    const fs::path d = fs::temp_directory_path() / "cobalt_io_test";
    fs::create_directories(d);
    return d / name;
}

std::string slurp(const fs::path &p)
{
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const fs::path &p, const std::string &s)
{
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    os << s;
}

AcquisitionHeader header_for(const ImagingSetup &s, const ArrayGeometry &g, std::vector<double> angles)
{
    AcquisitionHeader h;
    h.setup = s;
    h.geometry = g;
    h.angles_rad = std::move(angles);
    h.channels = g.size();
    h.samples = s.num_samples();
    return h;
}

} // namespace

TEST_CASE("setup and geometry JSON round trip")
{
    ImagingSetup s = verasonics_setup();
    s.angles_rad = {-0.1, 0.0, 0.1};
    s.band_start = 300;
    const ImagingSetup back = setup_from_json(to_json(s));
    CHECK(back.speed_of_sound == s.speed_of_sound);
    CHECK(back.num_samples() == 1920);
    CHECK(back.band_size == 480);
    CHECK(back.sub_band_size == 230);
    CHECK(back.band_start == s.band_start);
    REQUIRE(back.angles_rad.size() == 3);
    CHECK(back.angles_rad[0] == doctest::Approx(-0.1));
    CHECK(back.pulse.envelope_sigma_s == s.pulse.envelope_sigma_s);

    // partial files fall back to defaults; the pulse follows the setup rates
    const ImagingSetup partial = setup_from_json(Json{{"carrier_hz", 5e6}});
    CHECK(partial.pulse.carrier_hz == 5e6);
    CHECK(partial.depth_time_s == ge_setup().depth_time_s);
    CHECK_THROWS_AS(setup_from_json(Json{{"carrier_hz", "fast"}}), ParseError);
    CHECK_THROWS_AS(setup_from_json(Json::array()), ParseError);

    const ArrayGeometry g = center_in_aperture(make_fractal({0, 1}, 4, 2e-4), make_ula(64, 2e-4));
    CHECK(geometry_from_json(to_json(g)) == g);
    CHECK_THROWS_AS(geometry_from_json(Json{{"elements", {1, 1}}, {"pitch_m", 1e-3}}), ParseError);
    CHECK_THROWS_AS(geometry_from_json(Json{{"pitch_m", 1e-3}}), ParseError);
}

TEST_CASE("scene JSON")
{
    const Json j = Json::parse(R"([{"delay_s": 6e-5, "amplitude": 2, "angle_deg": 3},
                                   {"depth_m": 0.0616, "amplitude": -1}])");
    const ScattererScene sc = scene_from_json(j, 1540, 4.64e-6);
    REQUIRE(sc.size() == 2);
    CHECK(sc.scatterers()[0].angle_rad == doctest::Approx(3 * kPi / 180));
    CHECK(sc.scatterers()[1].delay_s == doctest::Approx(80e-6));
    const ScattererScene again = scene_from_json(Json{{"scatterers", to_json(sc)}}, 1540, 4.64e-6);
    CHECK(again.scatterers()[1].amplitude == -1.0);
    CHECK_THROWS_AS(scene_from_json(Json::parse(R"([{"amplitude": 1}])"), 1540, 4.64e-6), ParseError);
    CHECK_THROWS_AS(scene_from_json(Json::parse(R"([{"delay_s": 1e-6}])"), 1540, 4.64e-6), ParseError);
    CHECK_THROWS_AS(scene_from_json(Json{{"x", 1}}, 1540, 4.64e-6), ParseError);
}

TEST_CASE("parse errors carry a position")
{
    const fs::path p = scratch("bad.json");
    write_file(p, "{\n  \"a\": 1,\n  \"b\": ]\n}\n");
    try {
        read_json_file(p);
        FAIL("expected a parse error");
    } catch (const ParseError &e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(read_json_file(scratch("nope.json")), ParseError);
}

TEST_CASE("acquisition file round trip")
{
    const ImagingSetup s = test::small_setup();
    const ArrayGeometry g = make_ula(8, s.wavelength() / 2);
    const std::vector<double> angles{-0.05, 0.0, 0.05};
    const ScattererScene sc({{60e-6, 1.0, 0.0}, {71e-6, -0.4, 0.03}}, 1540, s.pulse.support_s);
    AcquisitionHeader h = header_for(s, g, angles);
    h.provenance = Json{{"seed", 7}, {"scene", to_json(sc)}};
    const fs::path file = scratch("acq.bin");
    std::vector<ChannelFrame> frames;
    {
        AcquisitionWriter w(file, h);
        for (double a : angles) {
            SimulationOptions o;
            o.snr_db = 25.0;
            o.seed = 7;
            frames.push_back(simulate_channels(sc, s.pulse, s, g, a, o));
            w.write(frames.back());
        }
        w.close();
    }
    CHECK_FALSE(fs::exists(file.string() + ".tmp"));
    const AcquisitionReader r(file);
    CHECK(r.num_angles() == 3);
    CHECK(r.header().geometry == g);
    CHECK(r.header().provenance["seed"] == 7);
    CHECK(r.header().to_json() == h.to_json());
    for (std::size_t i = 0; i < 3; ++i) {
        const ChannelFrame f = r.read(i);
        CHECK(f.steering_angle == angles[i]);
        CHECK(f.samples == frames[i].samples.cast<float>().cast<double>());
    }
    CHECK_THROWS_AS(r.read(3), OutOfRange);

    // payload size is exact
    const std::string bytes = slurp(file);
    const std::string text = h.to_json().dump();
    CHECK(bytes.size() == 16 + text.size() + 8 * 1600 * 3 * 4 + 16);

    // a second write of the same data is byte-identical
    const fs::path file2 = scratch("acq2.bin");
    {
        AcquisitionWriter w(file2, h);
        for (const auto &f : frames)
            w.write(f);
        w.close();
    }
    CHECK(slurp(file2) == bytes);

    // tampering is detected
    std::string broken = bytes;
    broken[20] = broken[20] == ' ' ? '\t' : ' ';
    write_file(scratch("tampered.bin"), broken);
    CHECK_THROWS_AS(AcquisitionReader(scratch("tampered.bin")), ParseError);
    write_file(scratch("short.bin"), bytes.substr(0, bytes.size() - 40));
    CHECK_THROWS_AS(AcquisitionReader(scratch("short.bin")), ParseError);
    CHECK_THROWS_AS(AcquisitionReader(scratch("missing.bin")), NotFound);
}

TEST_CASE("acquisition writer guards")
{
    const ImagingSetup s = test::small_setup();
    const ArrayGeometry g = make_ula(4, s.wavelength() / 2);
    const fs::path file = scratch("partial.bin");
    fs::remove(file);
    {
        AcquisitionWriter w(file, header_for(s, g, {0.0, 0.1}));
        ChannelFrame f;
        f.samples = RealRowMatrix::Zero(4, s.num_samples());
        w.write(f);
        CHECK_THROWS_AS(w.close(), InvalidState);
        ChannelFrame wrong;
        wrong.samples = RealRowMatrix::Zero(3, s.num_samples());
        CHECK_THROWS_AS(w.write(wrong), InvalidArgument);
    }
    CHECK_FALSE(fs::exists(file));
    CHECK_FALSE(fs::exists(file.string() + ".tmp"));

    // empty scene: zero payload of the right size
    const fs::path zero = scratch("zero.bin");
    {
        AcquisitionWriter w(zero, header_for(s, g, {0.0}));
        w.write(simulate_channels(ScattererScene({}, 1540, s.pulse.support_s), s.pulse, s, g, 0.0));
        w.close();
    }
    const AcquisitionReader r(zero);
    CHECK(r.read(0).samples.isZero(0.0));
}

TEST_CASE("csv, pgm and metrics output")
{
    RealRowMatrix m(2, 3);
    m << 1.5, -2.25, std::nan(""), 1e-300, 3.0, -0.0;
    const fs::path csv = scratch("m.csv");
    write_csv(csv, m);
    const RealRowMatrix back = read_csv(csv);
    REQUIRE(back.rows() == 2);
    CHECK(back(0, 0) == 1.5);
    CHECK(std::isnan(back(0, 2)));
    CHECK(back(1, 0) == 1e-300);
    write_file(scratch("bad.csv"), "1,2\n3,x\n");
    CHECK_THROWS_AS(read_csv(scratch("bad.csv")), ParseError);
    write_file(scratch("ragged.csv"), "1,2\n3\n");
    CHECK_THROWS_AS(read_csv(scratch("ragged.csv")), ParseError);

    RealRowMatrix db(2, 2);
    db << 0.0, -60.0, -30.0, std::nan("");
    write_pgm(scratch("i.pgm"), db, 60.0);
    const std::string pgm = slurp(scratch("i.pgm"));
    CHECK(pgm.rfind("P5\n2 2\n255\n", 0) == 0);
    const std::string px = pgm.substr(pgm.size() - 4);
    CHECK(static_cast<unsigned char>(px[0]) == 255);
    CHECK(static_cast<unsigned char>(px[1]) == 0);
    CHECK(static_cast<unsigned char>(px[2]) == 128);
    CHECK(static_cast<unsigned char>(px[3]) == 0);

    MetricsReport r;
    r.reduction = reduction_factor(64, 15, 3328, 100);
    r.fwhm_mm.push_back({"point", 2.7});
    r.cnr.push_back({"cyst/background", -std::numeric_limits<double>::infinity()});
    r.nrmse.push_back({"cfcoba", "das", 0.5});
    const Json j = to_json(r);
    CHECK(j["reduction_factor"]["exact"] == "53248/375");
    CHECK(j["cnr"][0]["cnr_db"] == "-inf");
    const std::string c = metrics_csv(r);
    CHECK(c.find("reduction_factor,,141.9946667") != std::string::npos);
    CHECK(c.find("nrmse,cfcoba vs das,0.5") != std::string::npos);

    SolverDiagnostics d;
    d.iterations = 12;
    CHECK(to_json(d)["iterations"] == 12);
    CHECK(fnv1a("") == 14695981039346656037ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
