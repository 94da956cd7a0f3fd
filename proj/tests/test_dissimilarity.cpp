#include "emcal/dissimilarity.hpp"
#include "emcal/synthetic.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace emcal;

namespace {

// Plain-loop evaluation of the dissimilarity, independent of the Eigen expression path.
double sdi_loop(const Raster& a, const Raster& b) {
    double acc = 0.0;
    for (Eigen::Index y = 0; y < a.rows(); ++y)
        for (Eigen::Index x = 0; x < a.cols(); ++x) acc += (a(y, x) - b(y, x)) * (a(y, x) - b(y, x));
    return std::sqrt(acc / static_cast<double>(a.size()));
}

ImagePlane ramp_x(int w, int h, double step) {
    Raster r(h, w);
    for (int x = 0; x < w; ++x) r.col(x).setConstant(x * step);
    return ImagePlane(r, Resolution(4.0, 6.0));
}

}  // namespace

TEST_CASE("sdi of identical regions is zero") {
    const auto a = testing::uniform_raster(13, 7, 1);
    CHECK(sdi(a, a) == 0.0);
}

TEST_CASE("sdi of a constant offset equals the offset") {
    const Raster a = Raster::Constant(5, 6, 0.10);
    const Raster b = Raster::Constant(5, 6, 0.13);
    CHECK(sdi(a, b) == doctest::Approx(0.03).epsilon(1e-12).scale(0.0));
}

TEST_CASE("sdi hand-computed two-pixel case") {
    Raster a(1, 2), b(1, 2);
    a << 0.0, 0.0;
    b << 0.3, 0.4;
    CHECK(sdi(a, b) == doctest::Approx(std::sqrt((0.09 + 0.16) / 2.0)).epsilon(1e-14).scale(0.0));
    CHECK(sdi(a, b) == doctest::Approx(0.35355).epsilon(1e-5).scale(0.0));
}

TEST_CASE("sdi matches a loop oracle on random regions") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto a = testing::uniform_raster(3 + static_cast<int>(s), 5, s);
        const auto b = testing::uniform_raster(3 + static_cast<int>(s), 5, s + 100);
        CHECK(sdi(a, b) == doctest::Approx(sdi_loop(a, b)).epsilon(1e-13).scale(0.0));
    }
}

TEST_CASE("sdi properties on random regions") {
    for (std::uint64_t s = 0; s < 25; ++s) {
        const auto a = testing::uniform_raster(9, 4, s);
        const auto b = testing::uniform_raster(9, 4, s + 1000);
        const double v = sdi(a, b);
        CHECK(v > 0.0);
        CHECK(v == sdi(b, a));
        CHECK(sdi(a + 0.37, b + 0.37) == doctest::Approx(v).epsilon(1e-12).scale(0.0));
        CHECK(sdi(2.5 * a, 2.5 * b) == doctest::Approx(2.5 * v).epsilon(1e-12).scale(0.0));
    }
}

TEST_CASE("sdi reports both shapes on mismatch") {
    const Raster a = Raster::Zero(3, 4);
    const Raster b = Raster::Zero(4, 3);
    try {
        (void)sdi(a, b);
        FAIL("expected an error");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("4x3") != std::string::npos);
        CHECK(msg.find("3x4") != std::string::npos);
    }
    CHECK_THROWS_AS(sdi(Raster(0, 0), Raster(0, 0)), DataError);
}

TEST_CASE("sdi works on plane regions") {
    const auto p = testing::uniform_plane(20, 20, 4);
    const double v = sdi(p.region(0, 0, 5, 5), p.region(3, 2, 5, 5));
    CHECK(v == doctest::Approx(sdi_loop(p.region(0, 0, 5, 5), p.region(3, 2, 5, 5))).epsilon(1e-13).scale(0.0));
}

TEST_CASE("shifted pairs on a constant image have zero dissimilarity") {
    const auto p = testing::constant_plane(60, 40, 0.42);
    for (Axis axis : {Axis::X, Axis::Y}) {
        const auto samples = sample_shifted_pairs(p, axis, {5, 10, 10, 7, 3});
        CHECK(samples.size() == 35);
        for (const auto& s : samples) CHECK(s.dissimilarity == 0.0);
    }
}

TEST_CASE("ramp along x gives n times the step exactly") {
    const double step = 1.0 / 512.0;
    const auto p = ramp_x(120, 30, step);
    const auto samples = sample_shifted_pairs(p, Axis::X, {20, 16, 12, 6, 99});
    for (const auto& s : samples) {
        CHECK(s.dissimilarity == s.distance_px * step);
        CHECK(s.distance_nm == s.distance_px * 4.0);
        CHECK(s.axis == Axis::X);
    }
}

TEST_CASE("samples are ordered by shift then position and use the axis step") {
    const auto p = testing::uniform_plane(50, 70, 8, Resolution(2.0, 3.0));
    const auto samples = sample_shifted_pairs(p, Axis::Y, {6, 10, 10, 4, 5});
    REQUIRE(samples.size() == 24);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(samples[i].distance_px == static_cast<int>(i / 4) + 1);
        CHECK(samples[i].distance_nm == samples[i].distance_px * 3.0);
    }
}

TEST_CASE("shifted pairs are reproducible and independent of worker count") {
    const auto p = testing::uniform_plane(80, 80, 9);
    const ShiftSampling params{12, 20, 20, 9, 1234};
    ::setenv("EMCAL_THREADS", "1", 1);
    const auto serial = sample_shifted_pairs(p, Axis::X, params);
    ::setenv("EMCAL_THREADS", "4", 1);
    const auto threaded = sample_shifted_pairs(p, Axis::X, params);
    ::unsetenv("EMCAL_THREADS");
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].dissimilarity == threaded[i].dissimilarity);

    const auto other_seed = sample_shifted_pairs(p, Axis::X, {12, 20, 20, 9, 1235});
    bool any_diff = false;
    for (std::size_t i = 0; i < serial.size(); ++i) any_diff |= serial[i].dissimilarity != other_seed[i].dissimilarity;
    CHECK(any_diff);
}

TEST_CASE("shift sampling rejects infeasible parameters") {
    const auto p = testing::uniform_plane(40, 30, 2);
    CHECK_THROWS_AS(sample_shifted_pairs(p, Axis::X, {0, 10, 10, 5, 0}), ConfigError);
    CHECK_THROWS_AS(sample_shifted_pairs(p, Axis::X, {3, 10, 10, 0, 0}), ConfigError);
    try {
        (void)sample_shifted_pairs(p, Axis::X, {35, 10, 10, 5, 0});
        FAIL("expected an error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("maximum feasible shift is 30 px") != std::string::npos);
    }
    CHECK_THROWS_AS(sample_shifted_pairs(p, Axis::Y, {25, 10, 10, 5, 0}), DataError);
    CHECK_THROWS_AS(sample_shifted_pairs(p, Axis::X, {1, 10, 31, 5, 0}), DataError);
}

TEST_CASE("pair dissimilarity basic cases") {
    const auto a = testing::uniform_plane(32, 32, 1);
    const ImageStack dup({a, a, a});
    CHECK(pair_dissimilarity(dup, 0, 8, 8, 10, 1) == 0.0);
    CHECK(pair_dissimilarity(dup, 1, 8, 8, 10, 1) == 0.0);

    const auto base = Raster::Constant(16, 16, 0.2);
    const ImageStack offset({ImagePlane(base, {1, 1}), ImagePlane(base + 0.05, {1, 1})});
    CHECK(pair_dissimilarity(offset, 0, 4, 4, 5, 0) == doctest::Approx(0.05).epsilon(1e-12).scale(0.0));

    CHECK_THROWS_AS(pair_dissimilarity(dup, 2, 8, 8, 10, 1), DataError);
    CHECK_THROWS_AS(pair_dissimilarity(dup, 0, 33, 8, 10, 1), DataError);
    CHECK_THROWS_AS(pair_dissimilarity(dup, 0, 8, 8, 0, 1), ConfigError);
}

TEST_CASE("pair dissimilarity increases with section spacing in a smooth volume") {
    VolumeConfig vc;
    vc.nx = vc.ny = vc.nz = 48;
    vc.smoothing_voxels = 3;
    vc.seed = 21;
    const auto vol = gen_isotropic_volume(vc);
    const auto s2 = slice_volume(vol, 2);
    const auto s4 = slice_volume(vol, 4);
    double sum2 = 0, sum4 = 0;
    for (std::size_t k = 0; k + 1 < s4.size(); ++k) {
        sum2 += pair_dissimilarity(s2, 2 * k, 24, 24, 10, 3);
        sum4 += pair_dissimilarity(s4, k, 24, 24, 10, 3);
    }
    CHECK(sum2 < sum4);
}
