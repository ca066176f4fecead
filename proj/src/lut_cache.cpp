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

#include "cobalt/fourier.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <iomanip>

namespace cobalt {

static_assert(std::endian::native == std::endian::little,
              "LUT cache files are written in host order and must be little-endian");

namespace {

constexpr char kLutMagic[8] = {'C', 'B', 'L', 'T', 'L', 'U', 'T', '1'};

class Fnv1a {
public:
    template <typename T>
    void add(const T &v)
    {
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &v, sizeof(T));
        for (unsigned char b : bytes) {
            h_ ^= b;
            h_ *= 1099511628211ULL;
        }
    }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 14695981039346656037ULL;
};

template <typename T>
void put(std::ostream &os, const T &v)
{
    os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T get(std::istream &is)
{
    T v{};
    if (!is.read(reinterpret_cast<char *>(&v), sizeof(T)))
        throw ParseError("truncated LUT file");
    return v;
}

} // namespace

std::uint64_t lut_key(double theta, const BandSpec &band, const ArrayGeometry &geom,
                      const ImagingSetup &setup, const LutOptions &opts)
{
    Fnv1a h;
    h.add(theta);
    h.add(band.first);
    h.add(band.size);
    h.add(band.period_s);
    h.add(geom.pitch());
    h.add(geom.center());
    for (int e : geom.elements())
        h.add(e);
    h.add(setup.speed_of_sound);
    h.add(setup.depth_time_s);
    h.add(setup.sample_rate_hz);
    h.add(setup.blank_time_s);
    h.add(opts.epsilon_q);
    h.add(opts.n_lo.value_or(-1));
    h.add(opts.n_hi.value_or(-1));
    h.add(opts.window_cap);
    h.add(opts.oversample);
    return h.value();
}

void save_lut(const DistortionLUT &lut, std::uint64_t key, const std::filesystem::path &file)
{
    const auto tmp = std::filesystem::path(file.string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw ConfigError("cannot write LUT cache file " + tmp.string());
        os.write(kLutMagic, sizeof(kLutMagic));
        put(os, key);
        put(os, static_cast<std::uint64_t>(lut.num_channels()));
        put(os, static_cast<std::uint64_t>(lut.band().size));
        put(os, static_cast<std::int32_t>(lut.n_lo()));
        put(os, static_cast<std::int32_t>(lut.n_hi()));
        put(os, lut.theta());
        put(os, lut.tail_energy());
        for (const Complex &v : lut.data()) {
            put(os, static_cast<float>(v.real()));
            put(os, static_cast<float>(v.imag()));
        }
        if (!os)
            throw ConfigError("failed writing LUT cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

DistortionLUT load_lut(const std::filesystem::path &file, std::uint64_t key,
                       const BandSpec &band, const ArrayGeometry &geom)
{
    std::ifstream is(file, std::ios::binary);
    if (!is)
        throw NotFound("LUT cache file " + file.string() + " not found");
    char magic[sizeof(kLutMagic)];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kLutMagic, sizeof(magic)) != 0)
        throw ParseError("bad LUT file magic in " + file.string());
    if (get<std::uint64_t>(is) != key)
        throw ParseError("LUT file " + file.string() + " was built for different inputs");
    const auto nch = get<std::uint64_t>(is);
    const auto nk = get<std::uint64_t>(is);
    const auto n_lo = get<std::int32_t>(is);
    const auto n_hi = get<std::int32_t>(is);
    const auto theta = get<double>(is);
    const auto tail = get<double>(is);
    if (nch != static_cast<std::uint64_t>(geom.size()) ||
        nk != static_cast<std::uint64_t>(band.size) || n_lo < 0 || n_hi < 0)
        throw ParseError("LUT file " + file.string() + " has inconsistent dimensions");
    const std::size_t count = nch * nk * static_cast<std::size_t>(n_lo + n_hi + 1);
    std::vector<Complex> data(count);
    for (auto &v : data) {
        const auto re = get<float>(is);
        const auto im = get<float>(is);
        v = Complex(re, im);
    }
    return DistortionLUT(theta, band, n_lo, n_hi, geom, std::move(data), tail);
}

DistortionLUT cached_distortion_lut(const std::filesystem::path &dir, double theta,
                                    const BandSpec &band, const ArrayGeometry &geom,
                                    const ImagingSetup &setup, const LutOptions &opts)
{
    if (dir.empty())
        return build_distortion_lut(theta, band, geom, setup, opts);
    const std::uint64_t key = lut_key(theta, band, geom, setup, opts);
    std::ostringstream name;
    name << "lut-" << std::hex << std::setw(16) << std::setfill('0') << key << ".bin";
    const auto file = dir / name.str();
    try {
        return load_lut(file, key, band, geom);
    } catch (const NotFound &) {
    } catch (const ParseError &) {
    }
    DistortionLUT lut = build_distortion_lut(theta, band, geom, setup, opts);
    std::filesystem::create_directories(dir);
    save_lut(lut, key, file);
    return lut;
}

} // namespace cobalt
