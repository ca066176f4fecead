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

#include "cobalt/das.hpp"
#include "cobalt/fourier.hpp"
#include "cobalt/imaging.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace cobalt;

namespace {

ChannelFrame scatterer_frame(const ImagingSetup &s, const ArrayGeometry &g, double theta,
                             std::vector<Scatterer> sc)
{
    return simulate_channels(ScattererScene(std::move(sc), s.speed_of_sound, s.pulse.support_s),
                             s.pulse, s, g, theta);
}

std::filesystem::path temp_dir(const char *name)
{
    const auto d = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("extract_coefficients")
{
    const ImagingSetup s = test::small_setup();
    const Index n = s.num_samples();
    CHECK(n == 1600);
    ChannelFrame f;
    f.samples.resize(1, n);
    f.sample_rate_hz = s.sample_rate_hz;
    const Index k0 = 250;
    for (Index p = 0; p < n; ++p)
        f.samples(0, p) = std::cos(2 * kPi * k0 * p / static_cast<double>(n));
    const SpectralFrame sf = extract_coefficients(f, BandSpec{240, 20, s.period()});
    for (Index i = 0; i < 20; ++i)
        CHECK(std::abs(sf.coefficients(0, i) - (i == 10 ? Complex(0.5) : Complex(0.0))) < 1e-12);

    // full band inverts
    const SpectralFrame all = extract_coefficients(f, BandSpec{0, n, s.period()});
    const ComplexVector back = band_to_time(all.coefficients.row(0).transpose(), all.band, n);
    CHECK((back.real() - f.samples.row(0).transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(back.imag().cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(extract_coefficients(f, BandSpec{n - 5, 10, s.period()}), InvalidArgument);
    CHECK_THROWS_AS(extract_coefficients(f, BandSpec{0, 0, s.period()}), InvalidArgument);

    const ImagingSetup ge = ge_setup();
    CHECK(ge.num_samples() == 3328);
    CHECK(ge.sub_band().size == 100);
    ChannelFrame gf;
    gf.samples = RealRowMatrix::Zero(2, 3328);
    gf.sample_rate_hz = ge.sample_rate_hz;
    CHECK(extract_coefficients(gf, ge.sub_band()).coefficients.cols() == 100);
}

TEST_CASE("band bookkeeping")
{
    const ImagingSetup ge = ge_setup();
    CHECK(ge.band().first == 507);
    CHECK(ge.band().size == 400);
    CHECK(ge.band().contains(ge.sub_band()));
    CHECK(ge.sub_band().first == 657);
    CHECK(effective_nyquist(BandSpec{0, 100, 208e-6}) == doctest::Approx(480.769e3).epsilon(1e-5));
    CHECK(effective_nyquist(BandSpec{0, 3328, 208e-6}) == doctest::Approx(16e6));
    CHECK(effective_nyquist(BandSpec{0, 200, 208e-6}) ==
          doctest::Approx(2 * effective_nyquist(BandSpec{0, 100, 208e-6})));
    const BandSpec ss = sumset(BandSpec{10, 4, 1.0});
    CHECK(ss.first == 20);
    CHECK(ss.size == 7);
    CHECK(ss.indices().back() == 26);
}

TEST_CASE("beam_support")
{
    const ImagingSetup s = test::small_setup();
    const double T = s.period();
    CHECK(beam_support(0.3, s, ArrayGeometry({0}, 1e-3, 0)) == doctest::Approx(T));
    const ArrayGeometry g = make_ula(16, s.wavelength() / 2);
    double expect = T;
    for (int e : g.elements()) {
        const double gm = g.position(e) / s.speed_of_sound;
        expect = std::min(expect, (T * T - gm * gm) / T);
    }
    CHECK(beam_support(0.0, s, g) == doctest::Approx(expect).epsilon(1e-14));
    double prev = T;
    for (int n : {2, 8, 32, 64, 128}) {
        const double tb = beam_support(0.2, s, make_ula(n, s.wavelength() / 2));
        CHECK(tb < prev);
        prev = tb;
    }
    // the support edge is where the outermost delay reaches T
    const double tb = beam_support(0.2, s, g);
    double worst = 0.0;
    for (int e : g.elements())
        worst = std::max(worst, delay_map(tb, 0.2, g.position(e), s.speed_of_sound));
    CHECK(worst == doctest::Approx(T).epsilon(1e-12));
}

TEST_CASE("LUT reference-channel closed forms")
{
    ImagingSetup s = test::small_setup();
    const ArrayGeometry one({0}, s.wavelength() / 2, 0);
    const BandSpec band{200, 50, s.period()};
    LutOptions o;
    o.n_lo = 4;
    o.n_hi = 4;

    s.blank_time_s = 0.0;
    const DistortionLUT id = build_distortion_lut(0.2, band, one, s, o);
    for (Index ki = 0; ki < band.size; ki += 7)
        for (int n = -4; n <= 4; ++n)
            CHECK(std::abs(id(0, ki, n) - (n == 0 ? Complex(1.0) : Complex(0.0))) < 1e-12);

    s.blank_time_s = 10e-6;
    const DistortionLUT w = build_distortion_lut(0.2, band, one, s, o);
    const double T = s.period(), tb = s.blank_time_s;
    for (int n = -4; n <= 4; ++n) {
        Complex expect;
        if (n == 0) {
            expect = (T - tb) / T;
        } else {
            const Complex a(0.0, -2 * kPi * n / T);
            expect = (std::exp(a * T) - std::exp(a * tb)) / (a * T);
        }
        for (Index ki = 0; ki < band.size; ki += 7)
            CHECK(std::abs(w(0, ki, n) - expect) < 1e-4);
    }

    // the reference element of a wider array sees a k-independent kernel too
    const ArrayGeometry g = make_ula(8, s.wavelength() / 2);
    const DistortionLUT lut = build_distortion_lut(0.1, band, g, s, o);
    const Index ref = g.center();
    for (int n = -4; n <= 4; ++n)
        CHECK(std::abs(lut(ref, 0, n) - lut(ref, band.size - 1, n)) < 1e-9);
}

TEST_CASE("LUT window search, determinism and errors")
{
    const ImagingSetup s = test::small_setup();
    const ArrayGeometry g = make_ula(16, s.wavelength() / 2);
    const BandSpec band = s.band();
    const DistortionLUT a = build_distortion_lut(0.1, band, g, s);
    CHECK(a.tail_energy() <= 1e-3);
    CHECK(a.n_lo() == a.n_hi());
    CHECK(a.num_channels() == 16);
    if (a.n_lo() > 0) {
        LutOptions smaller;
        smaller.n_lo = a.n_lo() - 1;
        smaller.n_hi = a.n_hi() - 1;
        CHECK(build_distortion_lut(0.1, band, g, s, smaller).tail_energy() > 1e-3);
    }
    const DistortionLUT b = build_distortion_lut(0.1, band, g, s);
    CHECK(a.data() == b.data());
    LutOptions threaded;
    threaded.threads = 3;
    CHECK(build_distortion_lut(0.1, band, g, s, threaded).data() == a.data());

    LutOptions tiny;
    tiny.window_cap = 1;
    CHECK_THROWS_AS(build_distortion_lut(0.1, band, g, s, tiny), QuadratureError);
    LutOptions bad;
    bad.epsilon_q = 0.0;
    CHECK_THROWS_AS(build_distortion_lut(0.1, band, g, s, bad), InvalidArgument);
    CHECK_THROWS_AS(build_distortion_lut(1.6, band, g, s), InvalidArgument);
}

TEST_CASE("fd_delay matches time-domain delay")
{
    const ImagingSetup s = test::small_setup();
    const ArrayGeometry g = make_ula(16, s.wavelength() / 2);
    const double th = 0.12;
    const ChannelFrame f = scatterer_frame(
        s, g, th, {{55e-6, 1.0, th}, {63.7e-6, -2.0, th + 0.02}, {80.1e-6, 0.5, th - 0.05}});
    const BandSpec band = s.band();
    const DistortionLUT lut = build_distortion_lut(th, band, g, s);
    const SpectralFrame fd = fd_delay(extract_coefficients(f, band), lut);
    CHECK(fd.delayed);
    const SpectralFrame td =
        extract_coefficients(apply_dynamic_delay(f, th, InterpolationKernel{16, 8.0}), band);
    for (Index ch = 0; ch < g.size(); ++ch) {
        const ComplexVector a = fd.coefficients.row(ch).transpose();
        const ComplexVector b = td.coefficients.row(ch).transpose();
        CHECK(nrmse(a, b) <= 0.05);
    }

    // FDBF against the in-band DAS line
    const RealVector fdbf = spectrum_to_time(fd_beamform(fd), s.num_samples());
    const BeamformedLine das = das_beamform(f, th, InterpolationKernel{16, 8.0});
    ChannelFrame line;
    line.samples = das.samples.real().transpose();
    line.sample_rate_hz = s.sample_rate_hz;
    const RealVector das_in_band =
        spectrum_to_time(extract_coefficients(line, band), s.num_samples());
    CHECK(nrmse(fdbf, das_in_band) <= 0.05);

    // guards
    CHECK_THROWS_AS(fd_delay(fd, lut), InvalidState);
    SpectralFrame other = extract_coefficients(f, band);
    other.steering_angle = 0.0;
    CHECK_THROWS_AS(fd_delay(other, lut), InvalidArgument);
    CHECK_THROWS_AS(fd_delay(extract_coefficients(f, s.sub_band()), lut), InvalidArgument);
    CHECK_THROWS_AS(fd_beamform(extract_coefficients(f, band)), InvalidState);

    SpectralFrame zero = extract_coefficients(f, band);
    zero.coefficients.setZero();
    CHECK(fd_delay(zero, lut).coefficients.isZero(0.0));
}

TEST_CASE("fd_delay on the reference channel is a window")
{
    const ImagingSetup s = test::small_setup();
    const ArrayGeometry g = make_ula(16, s.wavelength() / 2);
    const ChannelFrame f = scatterer_frame(s, g, 0.0, {{60e-6, 1.0, 0.0}});
    const BandSpec band = s.band();
    const SpectralFrame in = extract_coefficients(f, band);
    const SpectralFrame out = fd_delay(in, build_distortion_lut(0.0, band, g, s));
    const Index ref = g.center();
    // the echo lies inside [t_blank, T_B), where the window is one
    CHECK(nrmse(ComplexVector(out.coefficients.row(ref).transpose()),
                ComplexVector(in.coefficients.row(ref).transpose())) < 0.05);
}

TEST_CASE("fd_beamform averages channels")
{
    SpectralFrame f;
    f.coefficients = ComplexRowMatrix::Constant(4, 6, Complex(1.0, -2.0));
    f.band = BandSpec{3, 6, 1.0};
    f.delayed = true;
    const SpectralFrame m = fd_beamform(f);
    CHECK(m.num_channels() == 1);
    CHECK((m.coefficients.row(0) - f.coefficients.row(2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("band restriction versus delaying on the sub-band")
{
    const ImagingSetup s = test::small_setup();
    const ArrayGeometry g = make_ula(16, s.wavelength() / 2);
    const double th = 0.08;
    const ChannelFrame f = scatterer_frame(s, g, th, {{60e-6, 1.0, th}, {75e-6, 1.0, th}});
    LutOptions o;
    o.n_lo = 6;
    o.n_hi = 6;
    const BandSpec band = s.band(), sub = s.sub_band();
    const SpectralFrame wide =
        restrict_band(fd_delay(extract_coefficients(f, band), build_distortion_lut(th, band, g, s, o)),
                      sub);
    const SpectralFrame narrow =
        fd_delay(extract_coefficients(f, sub), build_distortion_lut(th, sub, g, s, o));
    // columns whose window never leaves the sub-band agree exactly; only the
    // 6 columns at each edge miss out-of-band inputs
    for (Index ch = 0; ch < g.size(); ++ch)
        for (Index ki = 6; ki < sub.size - 6; ++ki)
            CHECK(std::abs(wide.coefficients(ch, ki) - narrow.coefficients(ch, ki)) <
                  1e-12 * (1.0 + std::abs(wide.coefficients(ch, ki))));
}

TEST_CASE("spectrum_to_time")
{
    const Index n = 64;
    const BandSpec b{5, 3, 1.0};
    ComplexVector c = ComplexVector::Zero(3);
    c[1] = Complex(0.5, 0.0);
    const RealVector x = spectrum_to_time(c, b, n);
    for (Index p = 0; p < n; ++p)
        CHECK(x[p] == doctest::Approx(std::cos(2 * kPi * 6 * p / 64.0)));
    CHECK_THROWS_AS(spectrum_to_time(c, b, 5), InvalidArgument);
    CHECK_THROWS_AS(spectrum_to_time(c, BandSpec{30, 3, 1.0}, n), InvalidArgument);

    // narrowband scatterer: in-band line keeps the envelope peak position
    const ImagingSetup s = test::small_setup();
    const ArrayGeometry one({0}, s.wavelength() / 2, 0);
    const double ts = 1000 / s.sample_rate_hz;
    const ChannelFrame f = scatterer_frame(s, one, 0.0, {{ts, 1.0, 0.0}});
    const RealVector y = spectrum_to_time(extract_coefficients(f, s.band()), s.num_samples());
    BeamformedLine l;
    l.samples = y.cast<Complex>();
    Index arg = 0;
    envelope(l).maxCoeff(&arg);
    const auto expect = static_cast<Index>(std::lround((ts + s.pulse.support_s / 2) * s.sample_rate_hz));
    CHECK(std::abs(arg - expect) <= 1);
}

TEST_CASE("LUT cache")
{
    const ImagingSetup s = test::small_setup();
    const ArrayGeometry g = make_ula(8, s.wavelength() / 2);
    const BandSpec band = s.sub_band();
    const auto dir = temp_dir("cobalt_lut_cache_test");
    const DistortionLUT built = cached_distortion_lut(dir, 0.05, band, g, s);
    std::vector<std::filesystem::path> files;
    for (const auto &e : std::filesystem::directory_iterator(dir))
        files.push_back(e.path());
    REQUIRE(files.size() == 1);
    const DistortionLUT loaded = cached_distortion_lut(dir, 0.05, band, g, s);
    CHECK(loaded.n_lo() == built.n_lo());
    CHECK(loaded.tail_energy() == built.tail_energy());
    double err = 0.0;
    for (std::size_t i = 0; i < built.data().size(); ++i)
        err = std::max(err, std::abs(built.data()[i] - loaded.data()[i]));
    CHECK(err < 1e-6);

    CHECK(lut_key(0.05, band, g, s, {}) != lut_key(0.06, band, g, s, {}));
    CHECK(lut_key(0.05, band, g, s, {}) == lut_key(0.05, band, g, s, {}));

    // a corrupt file is rebuilt
    {
        std::ofstream os(files[0], std::ios::binary | std::ios::trunc);
        os << "garbage";
    }
    const DistortionLUT again = cached_distortion_lut(dir, 0.05, band, g, s);
    CHECK(again.data().size() == built.data().size());
    CHECK(std::filesystem::file_size(files[0]) > 100);
    CHECK_THROWS_AS(load_lut(dir / "missing.bin", 1, band, g), NotFound);
    std::filesystem::remove_all(dir);
}
