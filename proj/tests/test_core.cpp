#include "emcal/core.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace emcal;

TEST_CASE("aspect ratio is dy over dx") {
    CHECK(aspect_ratio(Resolution(5, 5)) == 1.0);
    CHECK(aspect_ratio(Resolution(5, 10)) == 2.0);
    CHECK(aspect_ratio(Resolution(2.2e3, 2.2e3)) == 1.0);
}

TEST_CASE("resolution rejects non-positive sizes") {
    CHECK_THROWS_AS(Resolution(0, 5), ConfigError);
    CHECK_THROWS_AS(Resolution(5, -1), ConfigError);
    CHECK_THROWS_AS(Resolution(std::nan(""), 5), ConfigError);
    const Resolution r(3, 7);
    CHECK(r.step(Axis::X) == 3);
    CHECK(r.step(Axis::Y) == 7);
    CHECK(r.transposed() == Resolution(7, 3));
}

TEST_CASE("axis names round-trip") {
    CHECK(to_string(Axis::X) == "x");
    CHECK(axis_from_string("y") == Axis::Y);
    CHECK(axis_from_string("X") == Axis::X);
    CHECK_THROWS_AS(axis_from_string("z"), ConfigError);
}

TEST_CASE("bit depth normalization") {
    Raster raw(1, 3);
    raw << 0, 255, 51;
    const auto n8 = normalize_intensities(raw, BitDepth::U8);
    CHECK(n8(0, 1) == 1.0);
    CHECK(n8(0, 2) == doctest::Approx(0.2));
    Raster raw16(1, 2);
    raw16 << 65535, 0;
    CHECK(normalize_intensities(raw16, BitDepth::U16)(0, 0) == 1.0);
}

TEST_CASE("normalization is idempotent on normalized data") {
    const auto r = testing::uniform_raster(17, 9, 3);
    CHECK((normalize_intensities(r, BitDepth::Unit) == r).all());
    const auto once = normalize_min_max(r);
    const auto twice = normalize_min_max(once);
    CHECK((once - twice).abs().maxCoeff() <= 1e-15);
    CHECK((normalize_min_max(Raster::Constant(3, 3, 0.4)) == 0.0).all());
}

TEST_CASE("image plane enforces its invariants") {
    CHECK_THROWS_AS(ImagePlane(Raster(0, 0), Resolution(1, 1)), DataError);
    Raster bad = Raster::Constant(2, 2, 0.5);
    bad(1, 1) = 1.5;
    CHECK_THROWS_AS(ImagePlane(bad, Resolution(1, 1)), DataError);

    Raster r(2, 3);
    r << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
    const ImagePlane p(r, Resolution(2, 4));
    CHECK(p.width() == 3);
    CHECK(p.height() == 2);
    CHECK(p.at(2, 1) == 0.6);
    CHECK(p.region(1, 0, 2, 2)(1, 0) == 0.5);
    const auto t = p.transposed();
    CHECK(t.width() == 2);
    CHECK(t.at(1, 2) == 0.6);
    CHECK(t.resolution() == Resolution(4, 2));
}

TEST_CASE("image stack rejects mismatched planes") {
    const auto a = testing::uniform_plane(8, 8, 1);
    CHECK_THROWS_AS(ImageStack({}), DataError);
    CHECK_THROWS_AS(ImageStack({a, testing::uniform_plane(8, 7, 2)}), DataError);
    CHECK_THROWS_AS(ImageStack({a, testing::uniform_plane(8, 8, 2, Resolution(5, 6))}), DataError);
    const ImageStack s({a, testing::uniform_plane(8, 8, 2)}, 10.0);
    CHECK(s.size() == 2);
    CHECK(s.nominal_spacing_nm() == 10.0);
}
