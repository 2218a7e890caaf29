#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hsi/indices.hpp"
#include "hsi/rng.hpp"
#include "test_util.hpp"

using namespace hsi;
using hsitest::TempDir;

TEST_CASE("band_window_mean") {
    const WavelengthGrid grid({650, 660, 800});
    const std::vector<double> s{0.1, 0.2, 0.5};

    CHECK(band_window_mean(s, grid, {640, 670}) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(band_window_mean(s, grid, {800, 800}) == 0.5);
    // no band inside [700, 710]: fall back to the band nearest 705
    CHECK(band_window_mean(s, grid, {700, 710}) == 0.2);
    // closed interval includes edges
    CHECK(band_window_mean(s, grid, {660, 800}) == doctest::Approx(0.35));
    CHECK_THROWS_AS(band_window_mean(s, grid, {710, 700}), Error);
    CHECK_THROWS_AS(band_window_mean(std::vector<double>{0.1}, grid, {640, 670}), Error);
}

TEST_CASE("ndvi definition") {
    const WavelengthGrid grid({656, 865});
    const auto spec = default_index_spec();

    CHECK(ndvi(std::vector<double>{0.3, 0.3}, grid, spec) == 0.0);
    CHECK(ndvi(std::vector<double>{0.0, 0.4}, grid, spec) == 1.0);
    CHECK(ndvi(std::vector<double>{0.1, 0.5}, grid, spec) ==
          doctest::Approx(0.4 / 0.6).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(ndvi(std::vector<double>{0.0, 0.0}, grid, spec),
                         doctest::Contains("undefined"), Error);
}

TEST_CASE("iso_index_slope") {
    CHECK(iso_index_slope(0.0) == 1.0);
    CHECK(iso_index_slope(-1.0) == 0.0);
    CHECK(iso_index_slope(1.0 / 3.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_WITH_AS(iso_index_slope(1.0), doctest::Contains("infinite"), Error);
    CHECK_THROWS_AS(iso_index_slope(1.5), Error);
    CHECK_THROWS_AS(iso_index_slope(-1.5), Error);

    // strictly increasing on a sampled domain
    double prev = iso_index_slope(-0.99);
    for (int i = 1; i <= 198; ++i) {
        const double v = -0.99 + 0.01 * i;
        const double s = iso_index_slope(v);
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("ndvi scale invariance and slope round trip") {
    Rng rng(17);
    const WavelengthGrid grid({640, 656, 670, 850, 865, 880});
    const auto spec = default_index_spec();
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> s(grid.size());
        for (auto& v : s) v = 0.001 + rng.uniform01();
        const double v = ndvi(s, grid, spec);
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);

        const double alpha = 0.01 + 10.0 * rng.uniform01();
        std::vector<double> scaled = s;
        for (auto& x : scaled) x *= alpha;
        CHECK(ndvi(scaled, grid, spec) == doctest::Approx(v).epsilon(1e-12));

        // NIR_mean = R_mean * slope(ndvi)
        const double r = band_window_mean(s, grid, spec.low);
        const double nir = band_window_mean(s, grid, spec.high);
        CHECK(nir == doctest::Approx(r * iso_index_slope(v)).epsilon(1e-10));
    }
}

TEST_CASE("index_map") {
    SUBCASE("uniform cube maps to zero") {
        SpectralCube cube;
        cube.lines = 2;
        cube.samples = 3;
        cube.grid = WavelengthGrid({656, 865});
        cube.data.assign(2 * 3 * 2, 0.25f);
        const auto map = index_map(cube, default_index_spec());
        for (double v : map) CHECK(v == 0.0);
    }
    SUBCASE("single pixel value") {
        SpectralCube cube;
        cube.lines = 1;
        cube.samples = 1;
        cube.grid = WavelengthGrid({656, 865});
        cube.data = {0.1f, 0.5f};
        const auto map = index_map(cube, default_index_spec());
        REQUIRE(map.size() == 1);
        const double r = static_cast<double>(0.1f), n = static_cast<double>(0.5f);
        CHECK(map[0] == doctest::Approx((n - r) / (n + r)).epsilon(1e-12));
    }
    SUBCASE("zero-denominator pixels become NaN, others stay in range") {
        SpectralCube cube;
        cube.lines = 1;
        cube.samples = 2;
        cube.grid = WavelengthGrid({656, 865});
        cube.data = {0.0f, 0.0f, 0.2f, 0.6f};
        const auto map = index_map(cube, default_index_spec());
        CHECK(std::isnan(map[0]));
        CHECK(map[1] >= -1.0);
        CHECK(map[1] <= 1.0);
    }
}

TEST_CASE("index presets and config files") {
    const auto& presets = index_presets();
    REQUIRE(presets.count("landsat8") == 1);
    REQUIRE(presets.count("landsat47") == 1);
    CHECK(presets.at("landsat8").low.lo_nm == 640.0);
    CHECK(presets.at("landsat8").low.hi_nm == 670.0);
    CHECK(presets.at("landsat8").high.lo_nm == 850.0);
    CHECK(presets.at("landsat8").high.hi_nm == 880.0);
    CHECK(presets.at("landsat47").low.lo_nm == 630.0);
    CHECK(presets.at("landsat47").high.hi_nm == 900.0);

    TempDir td("idx");
    save_index_spec(presets.at("landsat47"), td.file("spec.json"));
    const auto back = load_index_spec(td.file("spec.json"));
    CHECK(back.name == "landsat47");
    CHECK(back.low.lo_nm == 630.0);
    CHECK(back.high.lo_nm == 760.0);

    hsitest::spit(td.file("bad.json"), "{\"name\": \"x\"}");
    CHECK_THROWS_AS(load_index_spec(td.file("bad.json")), Error);
}
