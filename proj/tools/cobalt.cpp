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

// cobalt command-line front end. Every setting resolves as
// flag > COBALT_<NAME> environment variable > --config file > default, and
// the resolved values are echoed into each output.

#include "cobalt/fourier.hpp"
#include "cobalt/imaging.hpp"
#include "cobalt/io.hpp"
#include "cobalt/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cobalt;

namespace {

constexpr const char *kVersion = "1.0.0";

double deg2rad(double d) { return d * kPi / 180.0; }

std::string num(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}
double rad2deg(double r) { return r * 180.0 / kPi; }

std::string env_name(const std::string &key)
{
    std::string s = "COBALT_";
    for (char c : key)
        s += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split(const std::string &text, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep))
        out.push_back(item);
    return out;
}

double parse_real(const std::string &what, const std::string &text)
{
    double v = 0.0;
    const char *end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v))
        throw ConfigError(what + ": expected a number, got '" + text + "'");
    return v;
}

long long parse_int(const std::string &what, const std::string &text)
{
    long long v = 0;
    const char *end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end)
        throw ConfigError(what + ": expected an integer, got '" + text + "'");
    return v;
}

std::vector<double> parse_reals(const std::string &what, const std::string &text)
{
    std::vector<double> v;
    for (const std::string &s : split(text, ','))
        v.push_back(parse_real(what, s));
    return v;
}

// "a,b,c" or "start:stop:step", degrees.
std::vector<double> parse_angles_deg(const std::string &text)
{
    const auto parts = split(text, ':');
    if (parts.size() == 1)
        return parse_reals("angles", text);
    if (parts.size() != 3)
        throw ConfigError("angles: use 'a,b,c' or 'start:stop:step'");
    const double a = parse_real("angles", parts[0]);
    const double b = parse_real("angles", parts[1]);
    const double step = parse_real("angles", parts[2]);
    if (!(step > 0.0) || b < a)
        throw ConfigError("angles: need start <= stop and a positive step");
    std::vector<double> v;
    const auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
    for (long long i = 0; i <= n; ++i)
        v.push_back(a + static_cast<double>(i) * step);
    return v;
}

// Flag values, environment and config file behind one lookup.
class Settings {
public:
    // flag is "--band-size"; the key is "band_size".
    void bind(CLI::App *app, const std::string &flag, const std::string &help)
    {
        std::string key = flag.substr(2);
        std::replace(key.begin(), key.end(), '-', '_');
        opts_[key].push_back(app->add_option(flag, values_[key], help));
        known_.insert(key);
    }

    void load_config()
    {
        const auto path = raw("config");
        if (!path)
            return;
        config_ = read_json_file(*path);
        if (!config_.is_object())
            throw ConfigError(*path + ": config must be a JSON object");
        for (const auto &[k, v] : config_.items())
            if (!known_.count(k) && k != "setup" && k != "geometry")
                throw ConfigError(*path + ": unknown key '" + k + "'");
    }

    std::optional<std::string> raw(const std::string &key)
    {
        auto it = opts_.find(key);
        if (it != opts_.end())
            for (const CLI::Option *o : it->second)
                if (o->count() > 0)
                    return note(key, values_[key], "flag");
        if (const char *e = std::getenv(env_name(key).c_str()))
            return note(key, e, "env");
        if (config_.contains(key)) {
            const Json &v = config_.at(key);
            std::string s;
            if (v.is_string()) {
                s = v.get<std::string>();
            } else if (v.is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i)
                    s += (i ? "," : "") + (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
            } else {
                s = v.dump();
            }
            return note(key, s, "config");
        }
        return std::nullopt;
    }

    std::string str(const std::string &key, const std::string &def)
    {
        auto v = raw(key);
        return v ? *v : note(key, def, "default");
    }
    std::optional<double> opt_real(const std::string &key)
    {
        auto v = raw(key);
        return v ? std::optional(parse_real(flag(key), *v)) : std::nullopt;
    }
    double real(const std::string &key, double def)
    {
        auto v = opt_real(key);
        if (!v)
            note(key, Json(def).dump(), "default");
        return v ? *v : def;
    }
    std::optional<long long> opt_int(const std::string &key)
    {
        auto v = raw(key);
        return v ? std::optional(parse_int(flag(key), *v)) : std::nullopt;
    }
    long long integer(const std::string &key, long long def)
    {
        auto v = opt_int(key);
        if (!v)
            note(key, std::to_string(def), "default");
        return v ? *v : def;
    }

    const Json &config() const { return config_; }

    // Resolved values and where each came from. Output locations are left
    // out so identical runs into different files stay byte-identical.
    Json effective() const
    {
        Json j = Json::object();
        for (const auto &[k, v] : resolved_)
            if (k != "out" && k != "out_dir" && k != "csv")
                j[k] = Json{{"value", v.first}, {"source", v.second}};
        return j;
    }

private:
    static std::string flag(const std::string &key)
    {
        std::string f = "--" + key;
        std::replace(f.begin(), f.end(), '_', '-');
        return f;
    }
    std::string note(const std::string &key, const std::string &value, const char *source)
    {
        resolved_[key] = {value, source};
        return value;
    }

    std::map<std::string, std::string> values_;
    std::map<std::string, std::vector<CLI::Option *>> opts_;
    std::set<std::string> known_;
    std::map<std::string, std::pair<std::string, std::string>> resolved_;
    Json config_ = Json::object();
};

// Fills the band fields of `s` from the band flags.
void apply_band(Settings &cfg, ImagingSetup &s)
{
    if (auto v = cfg.opt_int("band_start"))
        s.band_start = static_cast<Index>(*v);
    if (auto v = cfg.opt_int("band_size"))
        s.band_size = static_cast<Index>(*v);
    if (auto v = cfg.opt_int("sub_band_size"))
        s.sub_band_size = static_cast<Index>(*v);
}

ImagingSetup resolve_setup(Settings &cfg)
{
    const std::string preset = cfg.str("preset", "ge");
    ImagingSetup s;
    if (preset == "ge")
        s = ge_setup();
    else if (preset == "verasonics")
        s = verasonics_setup();
    else
        throw ConfigError("--preset: expected 'ge' or 'verasonics', got '" + preset + "'");
    if (cfg.config().contains("setup"))
        s = setup_from_json(cfg.config().at("setup"), s);
    if (auto file = cfg.raw("setup"))
        s = setup_from_json(read_json_file(*file), s);
    apply_band(cfg, s);
    if (auto a = cfg.raw("angles_deg")) {
        s.angles_rad.clear();
        for (double d : parse_angles_deg(*a))
            s.angles_rad.push_back(deg2rad(d));
    }
    s.validate();
    return s;
}

ArrayGeometry resolve_full_geometry(Settings &cfg, const ImagingSetup &s)
{
    if (auto file = cfg.raw("geometry"))
        return geometry_from_json(read_json_file(*file));
    if (cfg.config().contains("geometry"))
        return geometry_from_json(cfg.config().at("geometry"));
    const long long n = cfg.integer("elements", 64);
    if (n < 1)
        throw ConfigError("--elements must be positive");
    return make_ula(static_cast<int>(n), s.wavelength() / 2);
}

bool coba_family(Method m) { return m == Method::kCOBA || m == Method::kFCOBA || m == Method::kCFCOBA; }

// The receive subset: the full array or a fractal placed at its middle.
ArrayGeometry resolve_array(Settings &cfg, const ArrayGeometry &full, Method m)
{
    const std::string kind = cfg.str("array", coba_family(m) ? "fractal" : "full");
    if (kind == "full")
        return full;
    if (kind != "fractal")
        throw ConfigError("--array: expected 'full' or 'fractal', got '" + kind + "'");
    std::vector<int> gen;
    for (const std::string &g : split(cfg.str("generator", "0,1"), ','))
        gen.push_back(static_cast<int>(parse_int("--generator", g)));
    const long long order = cfg.integer("fractal_order", 4);
    if (order < 0 || order > 12)
        throw ConfigError("--fractal-order must be in [0, 12]");
    ArrayGeometry f = [&] {
        try {
            return make_fractal(gen, static_cast<int>(order), full.pitch());
        } catch (const InvalidArgument &e) {
            throw ConfigError(std::string("--generator: ") + e.what());
        }
    }();
    if (f.max() - f.min() > full.max() - full.min())
        throw ConfigError("fractal of order " + std::to_string(order) + " spans " +
                          std::to_string(f.max() - f.min() + 1) + " pitches, wider than the " +
                          std::to_string(full.max() - full.min() + 1) + "-pitch aperture");
    ArrayGeometry placed = center_in_aperture(f, full);
    for (int e : placed.elements())
        if (!full.contains(e))
            throw ConfigError("fractal element " + std::to_string(e) + " is not in the acquired array");
    return placed;
}

unsigned resolve_threads(Settings &cfg)
{
    const long long t = cfg.integer("threads", 1);
    if (t < 1 || t > 1024)
        throw ConfigError("--threads must be in [1, 1024]");
    return static_cast<unsigned>(t);
}

Json print_json(const Json &j)
{
    std::cout << j.dump(2) << "\n";
    return j;
}

// ---- simulate --------------------------------------------------------------

int cmd_simulate(Settings &cfg)
{
    const ImagingSetup setup = resolve_setup(cfg);
    const ArrayGeometry geom = resolve_full_geometry(cfg, setup);
    const std::optional<std::string> out = cfg.raw("out");
    if (!out)
        throw ConfigError("simulate: --out is required");
    Json scene_json = Json::array();
    if (auto file = cfg.raw("scene"))
        scene_json = read_json_file(*file);
    const ScattererScene scene =
        scene_from_json(scene_json, setup.speed_of_sound, setup.pulse.support_s);
    const auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 0));
    const std::optional<double> snr = cfg.opt_real("snr_db");
    const unsigned threads = resolve_threads(cfg);

    AcquisitionHeader h;
    h.setup = setup;
    h.geometry = geom;
    h.angles_rad = setup.angles_rad;
    h.channels = geom.size();
    h.samples = setup.num_samples();
    h.provenance = Json{{"tool", std::string("cobalt ") + kVersion},
                        {"command", "simulate"},
                        {"scene", to_json(scene)},
                        {"seed", seed},
                        {"effective_config", cfg.effective()}};
    if (snr)
        h.provenance["snr_db"] = *snr;

    AcquisitionWriter writer(*out, h);
    // Frames are produced in batches of `threads` angles to bound memory.
    const std::size_t na = setup.angles_rad.size();
    for (std::size_t base = 0; base < na; base += threads) {
        const std::size_t n = std::min<std::size_t>(threads, na - base);
        std::vector<ChannelFrame> frames(n);
        parallel_for(n, threads, [&](std::size_t i) {
            SimulationOptions so;
            so.snr_db = snr;
            so.seed = seed + base + i; // independent noise per angle
            frames[i] = simulate_channels(scene, setup.pulse, setup, geom,
                                          setup.angles_rad[base + i], so);
        });
        for (const ChannelFrame &f : frames)
            writer.write(f);
    }
    writer.close();

    Json warnings = Json::array();
    for (const std::string &w : setup.warnings())
        warnings.push_back(w);
    print_json(Json{{"out", *out},
                    {"angles", na},
                    {"channels", h.channels},
                    {"samples", h.samples},
                    {"payload_bytes", static_cast<std::uint64_t>(h.channels * h.samples) * na * 4},
                    {"scatterers", scene.size()},
                    {"warnings", warnings}});
    return 0;
}

// ---- beamform --------------------------------------------------------------

struct ImageBundle {
    BModeImage image;
    Json meta;
};

Rational image_reduction(const Json &meta)
{
    const Json &r = meta.at("reduction");
    return reduction_factor(r.at("full_elements").get<std::int64_t>(),
                            r.at("reported_elements").get<std::int64_t>(),
                            r.at("n_traditional").get<std::int64_t>(),
                            r.at("n_used").get<std::int64_t>());
}

// Lateral FWHM at every scatterer of the recorded scene. Needs a uniform
// grid of at least three angles; otherwise nothing is reported.
void scene_fwhm(const BModeImage &img, const Json &provenance, const ImagingSetup &setup,
                MetricsReport &report)
{
    if (img.angles_rad.size() < 3 || !provenance.contains("scene"))
        return;
    const ScattererScene scene =
        scene_from_json(provenance.at("scene"), setup.speed_of_sound, setup.pulse.support_s);
    const double c = setup.speed_of_sound;
    for (const Scatterer &s : scene.scatterers()) {
        // Envelope peaks half a pulse after the echo onset.
        const double depth = c * (s.delay_s + setup.pulse.support_s / 2) / 2;
        try {
            report.fwhm_mm.push_back({"scatterer@" + num(depth * 1e3) + "mm", lateral_fwhm_mm(img, depth, c * setup.pulse.support_s / 4)});
        } catch (const NotFound &) {
        } catch (const InvalidArgument &) {
        }
    }
}

int cmd_beamform(Settings &cfg)
{
    const auto in = cfg.raw("in");
    const auto out_dir = cfg.raw("out_dir");
    if (!in || !out_dir)
        throw ConfigError("beamform: --in and --out-dir are required");
    const AcquisitionReader reader(*in);
    const AcquisitionHeader &h = reader.header();

    BeamformOptions opts;
    opts.method = parse_method(cfg.str("method", "das"));
    ImagingSetup setup = h.setup;
    apply_band(cfg, setup);
    setup.validate();
    const ArrayGeometry used = resolve_array(cfg, h.geometry, opts.method);
    opts.kernel.taps = static_cast<int>(cfg.integer("taps", opts.kernel.taps));
    opts.kernel.kaiser_beta = cfg.real("kaiser_beta", opts.kernel.kaiser_beta);
    opts.kernel.validate();
    opts.lut_cache = cfg.str("lut_cache", "");
    opts.solver.max_iterations = static_cast<int>(cfg.integer("max_iterations", opts.solver.max_iterations));
    if (auto eps = cfg.opt_real("epsilon")) {
        if (*eps < 0.0)
            throw ConfigError("--epsilon must be nonnegative");
        opts.solver.epsilon = *eps;
    } else {
        opts.solver.auto_epsilon = true;
    }
    const std::string pk = cfg.str("pulse_kernel", "filtered");
    if (pk == "unfiltered")
        opts.recovery.kernel = PulseKernel::kUnfiltered;
    else if (pk != "filtered")
        throw ConfigError("--pulse-kernel: expected 'filtered' or 'unfiltered'");
    const double dr = cfg.real("dynamic_range_db", 60.0);
    if (!(dr > 0.0))
        throw ConfigError("--dynamic-range-db must be positive");
    const unsigned threads = resolve_threads(cfg);
    const long long raster_n = cfg.integer("raster_size", 256);
    if (raster_n < 2)
        throw ConfigError("--raster-size must be at least 2");
    const std::optional<long long> reported = cfg.opt_int("reported_elements");

    const Index n = setup.num_samples();
    if (h.samples != n)
        throw ConfigError("acquisition has " + std::to_string(h.samples) +
                          " samples per line but the setup implies " + std::to_string(n));

    const std::size_t na = reader.num_angles();
    std::vector<LineResult> results(na);
    parallel_for(na, threads, [&](std::size_t i) {
        ChannelFrame f = reader.read(i);
        if (!(used == h.geometry))
            f = select_channels(f, used);
        results[i] = beamform_line(f, setup, opts);
    });

    std::vector<BeamformedLine> lines;
    Json diagnostics = Json::array();
    for (std::size_t i = 0; i < na; ++i) {
        lines.push_back(results[i].line);
        if (results[i].diagnostics) {
            Json d = to_json(*results[i].diagnostics);
            d["angle_deg"] = rad2deg(h.angles_rad[i]);
            diagnostics.push_back(d);
        }
    }
    const BModeImage img = make_bmode(lines, setup.speed_of_sound, dr);

    Index n_used = n;
    if (opts.method == Method::kFDBF || opts.method == Method::kFCOBA)
        n_used = setup.band().size;
    else if (opts.method == Method::kCFCOBA)
        n_used = setup.sub_band().size;
    const Index shown = reported ? static_cast<Index>(*reported) : used.size();
    if (shown < 1 || shown > h.geometry.size())
        throw ConfigError("--reported-elements must be in [1, acquired channels]");
    const Rational red = reduction_factor(h.geometry.size(), shown, n, n_used);

    MetricsReport report;
    report.reduction = red;
    scene_fwhm(img, h.provenance, setup, report);

    Json angles = Json::array(), depths = Json::array();
    for (double a : img.angles_rad)
        angles.push_back(rad2deg(a));
    for (double d : img.depths_m)
        depths.push_back(d);
    Json meta{{"tool", std::string("cobalt ") + kVersion},
              {"method", to_string(opts.method)},
              {"input", *in},
              {"dynamic_range_db", dr},
              {"angles_deg", angles},
              {"depths_m", depths},
              {"geometry_used", to_json(used)},
              {"setup", to_json(setup)},
              {"reduction",
               {{"full_elements", h.geometry.size()},
                {"used_elements", used.size()},
                {"reported_elements", shown},
                {"n_traditional", n},
                {"n_used", n_used},
                {"exact", red.str()},
                {"value", red.value()}}},
              {"effective_config", cfg.effective()},
              {"acquisition_provenance", h.provenance}};

    fs::create_directories(*out_dir);
    const fs::path dir = *out_dir;
    write_text_atomic(dir / "image.json", meta.dump(2) + "\n");
    write_csv(dir / "envelope.csv", img.envelope);
    write_csv(dir / "bmode.csv", img.intensity);
    if (na >= 2) {
        RasterSpec r;
        double rmax = img.depths_m[img.depths_m.size() - 1];
        const double smax = std::max(std::abs(std::sin(img.angles_rad[0])),
                                     std::abs(std::sin(img.angles_rad[img.angles_rad.size() - 1])));
        r.x_min_m = -rmax * smax;
        r.x_max_m = rmax * smax;
        r.z_min_m = 0.0;
        r.z_max_m = rmax;
        r.nx = r.nz = static_cast<Index>(raster_n);
        const RealRowMatrix raster = scan_convert(img, r);
        write_csv(dir / "raster.csv", raster);
        write_pgm(dir / "image.pgm", raster, dr);
    } else {
        write_pgm(dir / "image.pgm", img.intensity, dr);
    }
    const Json mj = to_json(report);
    write_text_atomic(dir / "metrics.json", mj.dump(2) + "\n");
    write_text_atomic(dir / "metrics.csv", metrics_csv(report));
    if (!diagnostics.empty())
        write_text_atomic(dir / "diagnostics.json", diagnostics.dump(2) + "\n");

    print_json(Json{{"out_dir", *out_dir},
                    {"method", to_string(opts.method)},
                    {"angles", na},
                    {"elements_used", used.size()},
                    {"samples_used", n_used},
                    {"metrics", mj}});
    return 0;
}

// ---- compare / metrics -----------------------------------------------------

ImageBundle load_image(const fs::path &dir)
{
    ImageBundle b;
    b.meta = read_json_file(dir / "image.json");
    try {
        const auto angles = b.meta.at("angles_deg").get<std::vector<double>>();
        const auto depths = b.meta.at("depths_m").get<std::vector<double>>();
        b.image.angles_rad.resize(static_cast<Index>(angles.size()));
        for (std::size_t i = 0; i < angles.size(); ++i)
            b.image.angles_rad[static_cast<Index>(i)] = deg2rad(angles[i]);
        b.image.depths_m = Eigen::Map<const RealVector>(depths.data(), static_cast<Index>(depths.size()));
        b.image.dynamic_range_db = b.meta.at("dynamic_range_db").get<double>();
        b.image.method = parse_method(b.meta.at("method").get<std::string>());
    } catch (const nlohmann::json::exception &e) {
        throw ParseError((dir / "image.json").string() + ": " + e.what());
    }
    b.image.envelope = read_csv(dir / "envelope.csv");
    if (b.image.envelope.rows() != b.image.angles_rad.size() ||
        b.image.envelope.cols() != b.image.depths_m.size())
        throw ParseError(dir.string() + ": envelope.csv does not match the grid in image.json");
    b.image.intensity.resize(b.image.envelope.rows(), b.image.envelope.cols());
    for (Index r = 0; r < b.image.envelope.rows(); ++r)
        b.image.intensity.row(r) =
            log_compress(b.image.envelope.row(r).transpose(), 1.0, b.image.dynamic_range_db).transpose();
    return b;
}

bool same_grid(const BModeImage &a, const BModeImage &b)
{
    const auto close = [](const RealVector &x, const RealVector &y) {
        return x.size() == y.size() && (x - y).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, y.cwiseAbs().maxCoeff());
    };
    return close(a.angles_rad, b.angles_rad) && close(a.depths_m, b.depths_m);
}

// Point depths and cyst geometry come in millimeters.
void image_metrics(Settings &cfg, const std::string &tag, const BModeImage &img, MetricsReport &r)
{
    if (auto p = cfg.raw("point"))
        for (double d : parse_reals("--point", *p)) {
            const double half = cfg.real("point_window_mm", 1.0) * 1e-3;
            r.fwhm_mm.push_back({tag + "@" + num(d) + "mm", lateral_fwhm_mm(img, d * 1e-3, half)});
        }
    if (auto c = cfg.raw("cyst")) {
        const auto v = parse_reals("--cyst", *c);
        if (v.size() != 3 || !(v[2] > 0.0))
            throw ConfigError("--cyst: expected x_mm,z_mm,radius_mm");
        const CystRegions reg = cyst_regions(img, v[0] * 1e-3, v[1] * 1e-3, v[2] * 1e-3);
        if (reg.inside.size() == 0 || reg.background.size() == 0)
            throw NotFound("--cyst: no image samples inside the cyst or its background ring");
        r.cnr.push_back({tag + ":cyst_vs_background", cnr_db(reg.inside, reg.background)});
    }
}

void emit_report(Settings &cfg, Json j, const MetricsReport &report)
{
    if (auto out = cfg.raw("out"))
        write_text_atomic(*out, j.dump(2) + "\n");
    if (auto csv = cfg.raw("csv"))
        write_text_atomic(*csv, metrics_csv(report));
    print_json(j);
}

int cmd_compare(Settings &cfg, const std::vector<std::string> &dirs)
{
    if (dirs.size() < 2)
        throw ConfigError("compare: needs at least two image directories");
    std::vector<ImageBundle> images;
    for (const auto &d : dirs)
        images.push_back(load_image(d));
    // The reference is a directory or a method tag; the first image by default.
    std::size_t ref = 0;
    if (auto r = cfg.raw("reference")) {
        ref = images.size();
        for (std::size_t i = 0; i < images.size(); ++i)
            if (dirs[i] == *r || images[i].meta.at("method").get<std::string>() == *r) {
                ref = i;
                break;
            }
        if (ref == images.size())
            throw NotFound("compare: reference '" + *r + "' matches no image");
    }
    const BModeImage &rimg = images[ref].image;
    const std::string rtag = images[ref].meta.at("method").get<std::string>();
    Json table = Json::array();
    MetricsReport all;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const BModeImage &img = images[i].image;
        if (!same_grid(img, rimg))
            throw ConfigError("compare: " + dirs[i] + " and " + dirs[ref] + " use different grids");
        const std::string tag = images[i].meta.at("method").get<std::string>();
        MetricsReport r;
        r.reduction = image_reduction(images[i].meta);
        const RealVector a = Eigen::Map<const RealVector>(img.envelope.data(), img.envelope.size());
        const RealVector b = Eigen::Map<const RealVector>(rimg.envelope.data(), rimg.envelope.size());
        r.nrmse.push_back({tag, rtag, nrmse(a, b)});
        image_metrics(cfg, tag, img, r);
        Json e = to_json(r);
        e = Json{{"image", dirs[i]}, {"method", tag}, {"metrics", e}};
        table.push_back(e);
        all.nrmse.insert(all.nrmse.end(), r.nrmse.begin(), r.nrmse.end());
        all.fwhm_mm.insert(all.fwhm_mm.end(), r.fwhm_mm.begin(), r.fwhm_mm.end());
        all.cnr.insert(all.cnr.end(), r.cnr.begin(), r.cnr.end());
    }
    emit_report(cfg,
                Json{{"reference", dirs[ref]}, {"images", table}, {"effective_config", cfg.effective()}},
                all);
    return 0;
}

int cmd_metrics(Settings &cfg, const std::string &dir)
{
    const ImageBundle b = load_image(dir);
    MetricsReport r;
    r.reduction = image_reduction(b.meta);
    image_metrics(cfg, b.meta.at("method").get<std::string>(), b.image, r);
    Json j = to_json(r);
    j["image"] = dir;
    j["effective_config"] = cfg.effective();
    emit_report(cfg, j, r);
    return 0;
}

// ---- lut-build -------------------------------------------------------------

int cmd_lut_build(Settings &cfg)
{
    ImagingSetup setup;
    ArrayGeometry full{{0}, 1.0, 0};
    if (auto in = cfg.raw("in")) {
        const AcquisitionReader reader(*in);
        setup = reader.header().setup;
        full = reader.header().geometry;
        apply_band(cfg, setup);
        if (auto a = cfg.raw("angles_deg")) {
            setup.angles_rad.clear();
            for (double d : parse_angles_deg(*a))
                setup.angles_rad.push_back(deg2rad(d));
        }
        setup.validate();
    } else {
        setup = resolve_setup(cfg);
        full = resolve_full_geometry(cfg, setup);
    }
    const Method m = parse_method(cfg.str("method", "cfcoba"));
    if (m == Method::kDAS || m == Method::kCOBA)
        throw ConfigError("lut-build: method '" + to_string(m) + "' delays in time and uses no LUT");
    const auto dir = cfg.raw("lut_cache");
    if (!dir)
        throw ConfigError("lut-build: --lut-cache is required");
    const ArrayGeometry geom = resolve_array(cfg, full, m);
    const BandSpec band = m == Method::kCFCOBA ? setup.sub_band() : setup.band();
    const unsigned threads = resolve_threads(cfg);
    LutOptions lo;
    fs::create_directories(*dir);

    const std::size_t na = setup.angles_rad.size();
    std::vector<Json> rows(na);
    parallel_for(na, threads, [&](std::size_t i) {
        const double th = setup.angles_rad[i];
        const DistortionLUT lut = cached_distortion_lut(*dir, th, band, geom, setup, lo);
        std::ostringstream key;
        key << std::hex << lut_key(th, band, geom, setup, lo);
        rows[i] = Json{{"angle_deg", rad2deg(th)},
                       {"n_lo", lut.n_lo()},
                       {"n_hi", lut.n_hi()},
                       {"tail_energy", lut.tail_energy()},
                       {"key", key.str()}};
    });
    Json list = Json::array();
    for (auto &r : rows)
        list.push_back(std::move(r));
    print_json(Json{{"lut_cache", *dir},
                    {"method", to_string(m)},
                    {"band", {{"first", band.first}, {"size", band.size}}},
                    {"channels", geom.size()},
                    {"luts", list},
                    {"effective_config", cfg.effective()}});
    return 0;
}

// ---- errors ----------------------------------------------------------------

int fail(const std::string &type, const std::string &message, int code)
{
    std::cerr << Json{{"error", {{"type", type}, {"message", message}}}}.dump() << "\n";
    return code;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"cobalt: Fourier-domain and convolutional beamforming toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Settings cfg;

    const auto common = [&](CLI::App *s) {
        cfg.bind(s, "--config", "JSON config file (flat keys, optional 'setup' and 'geometry' objects)");
        cfg.bind(s, "--threads", "worker threads over angles (default 1)");
    };
    const auto setup_flags = [&](CLI::App *s) {
        cfg.bind(s, "--preset", "ge or verasonics (default ge)");
        cfg.bind(s, "--setup", "setup JSON file applied over the preset");
        cfg.bind(s, "--geometry", "array geometry JSON file (default: ULA at half-wavelength pitch)");
        cfg.bind(s, "--elements", "ULA element count when no geometry is given (default 64)");
        cfg.bind(s, "--angles-deg", "steering angles: 'a,b,c' or 'start:stop:step'");
    };
    const auto band_flags = [&](CLI::App *s) {
        cfg.bind(s, "--band-start", "first Fourier index of the band (default: centered on the carrier)");
        cfg.bind(s, "--band-size", "B, coefficients per channel");
        cfg.bind(s, "--sub-band-size", "B_sN, coefficients per channel for cfcoba");
    };
    const auto array_flags = [&](CLI::App *s) {
        cfg.bind(s, "--array", "full or fractal (default: fractal for coba, fcoba, cfcoba)");
        cfg.bind(s, "--fractal-order", "fractal order r (default 4)");
        cfg.bind(s, "--generator", "fractal generator indices, comma separated (default 0,1)");
    };
    const auto metric_flags = [&](CLI::App *s) {
        cfg.bind(s, "--point", "depths in mm for lateral FWHM, comma separated");
        cfg.bind(s, "--point-window-mm", "half depth window for FWHM profiles (default 1)");
        cfg.bind(s, "--cyst", "x_mm,z_mm,radius_mm of an anechoic cyst for CNR");
        cfg.bind(s, "--out", "write the JSON report here as well");
        cfg.bind(s, "--csv", "write a CSV report");
    };

    CLI::App *sim = app.add_subcommand("simulate", "simulate channel data into an acquisition file");
    common(sim);
    setup_flags(sim);
    band_flags(sim);
    cfg.bind(sim, "--scene", "scatterer scene JSON file (default: empty scene)");
    cfg.bind(sim, "--out", "acquisition file to write");
    cfg.bind(sim, "--seed", "noise seed (default 0)");
    cfg.bind(sim, "--snr-db", "additive white noise SNR in dB (default: noiseless)");

    CLI::App *bf = app.add_subcommand("beamform", "form a B-mode image from an acquisition file");
    common(bf);
    band_flags(bf);
    array_flags(bf);
    cfg.bind(bf, "--in", "acquisition file");
    cfg.bind(bf, "--out-dir", "output directory");
    cfg.bind(bf, "--method", "das, fdbf, coba, fcoba or cfcoba (default das)");
    cfg.bind(bf, "--epsilon", "cfcoba residual bound (default: estimated from the data)");
    cfg.bind(bf, "--max-iterations", "cfcoba solver iteration cap (default 2000)");
    cfg.bind(bf, "--pulse-kernel", "cfcoba recovery kernel: filtered or unfiltered (default filtered)");
    cfg.bind(bf, "--dynamic-range-db", "display dynamic range (default 60)");
    cfg.bind(bf, "--lut-cache", "directory for distortion LUTs");
    cfg.bind(bf, "--taps", "interpolation kernel taps (default 8)");
    cfg.bind(bf, "--kaiser-beta", "interpolation Kaiser beta (default 5)");
    cfg.bind(bf, "--raster-size", "scan-converted image side in pixels (default 256)");
    cfg.bind(bf, "--reported-elements", "element count used in the reduction factor (default: actual)");

    std::vector<std::string> cmp_dirs;
    CLI::App *cmp = app.add_subcommand("compare", "tabulate metrics of images on a shared grid");
    common(cmp);
    metric_flags(cmp);
    cmp->add_option("images", cmp_dirs, "image directories written by beamform")->required();
    cfg.bind(cmp, "--reference", "reference image directory or method tag (default: first image)");

    std::string met_dir;
    CLI::App *met = app.add_subcommand("metrics", "metrics of a single image");
    common(met);
    metric_flags(met);
    met->add_option("image", met_dir, "image directory written by beamform")->required();

    CLI::App *lut = app.add_subcommand("lut-build", "build and cache distortion LUTs");
    common(lut);
    setup_flags(lut);
    band_flags(lut);
    array_flags(lut);
    cfg.bind(lut, "--in", "take setup and geometry from an acquisition file");
    cfg.bind(lut, "--method", "fdbf, fcoba or cfcoba; selects the band (default cfcoba)");
    cfg.bind(lut, "--lut-cache", "cache directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        return fail("UsageError", e.what(), 2);
    }

    try {
        cfg.load_config();
        if (*sim)
            return cmd_simulate(cfg);
        if (*bf)
            return cmd_beamform(cfg);
        if (*cmp)
            return cmd_compare(cfg, cmp_dirs);
        if (*met)
            return cmd_metrics(cfg, met_dir);
        if (*lut)
            return cmd_lut_build(cfg);
        return fail("UsageError", "no subcommand", 2);
    } catch (const ConfigError &e) {
        return fail("ConfigError", e.what(), 2);
    } catch (const ParseError &e) {
        return fail("ParseError", e.what(), 2);
    } catch (const InvalidArgument &e) {
        return fail("InvalidArgument", e.what(), 2);
    } catch (const SolverError &e) {
        std::cerr << Json{{"error",
                           {{"type", "SolverError"},
                            {"message", e.what()},
                            {"iterations", e.iterations()},
                            {"residual", e.residual()}}}}
                         .dump()
                  << "\n";
        return 3;
    } catch (const QuadratureError &e) {
        std::cerr << Json{{"error",
                           {{"type", "QuadratureError"},
                            {"message", e.what()},
                            {"tail_energy", e.tail_energy()}}}}
                         .dump()
                  << "\n";
        return 3;
    } catch (const NumericalDomainError &e) {
        return fail("NumericalDomainError", e.what(), 3);
    } catch (const NotFound &e) {
        return fail("NotFound", e.what(), 4);
    } catch (const OutOfRange &e) {
        return fail("OutOfRange", e.what(), 2);
    } catch (const std::exception &e) {
        return fail("Error", e.what(), 1);
    }
}
