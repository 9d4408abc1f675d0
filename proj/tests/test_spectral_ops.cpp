#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hypercal/spectral_ops.hpp"
#include "test_support.hpp"

using namespace hypercal;
using namespace testutil;

namespace {

// Independent interpolation oracle: linear scan for the bracket, then the
// two-point formula. Kept separate from the library's implementation.
double interp_oracle(const std::vector<double>& wl,
                     const std::vector<double>& v, double target) {
    for (std::size_t i = 0; i + 1 < wl.size(); ++i) {
        if (target >= wl[i] && target <= wl[i + 1]) {
            const double span = wl[i + 1] - wl[i];
            if (span == 0.0)
                return v[i];
            return v[i] * (wl[i + 1] - target) / span +
                   v[i + 1] * (target - wl[i]) / span;
        }
    }
    return v.back();
}

} // namespace

TEST_CASE("resample preserves constants") {
    const auto src_grid = small_grid(5);
    const auto target = small_grid(23, 450.0, 950.0);
    const Spectrum s = Spectrum::constant(src_grid, 0.5, Unit::reflectance);
    const Spectrum out = resample(s, target);
    CHECK(out.unit() == Unit::reflectance);
    for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(out[i] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("resample hits the midpoint of a two-point ramp") {
    const Spectrum s = spectrum_of(WavelengthGrid({400.0, 1000.0}),
                                   {0.0, 1.0}, Unit::reflectance);
    const Spectrum out = resample(s, WavelengthGrid({700.0}));
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("resample of a 61-point curve onto the sensor grid matches the "
          "per-point oracle") {
    std::vector<double> wl(61), values(61);
    for (int i = 0; i < 61; ++i) {
        wl[i] = 400.0 + 10.0 * i;
        values[i] = smooth_curve(wl[i], 640.0, 170.0, 0.22);
    }
    const Spectrum src = spectrum_of(WavelengthGrid(wl), values);
    const auto target = small_grid(272);
    const Spectrum out = resample(src, target);
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double expected = interp_oracle(wl, values, target[i]);
        CHECK(out[i] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("resample is exact on affine spectra") {
    Xoshiro256 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = rng.uniform01() * 2e-3 - 1e-3;
        const double b = rng.uniform01();
        std::vector<double> wl;
        double w = 400.0 + 50.0 * rng.uniform01();
        while (w < 1000.0) {
            wl.push_back(w);
            w += 1.0 + 20.0 * rng.uniform01();
        }
        if (wl.size() < 2)
            continue;
        std::vector<double> values(wl.size());
        for (std::size_t i = 0; i < wl.size(); ++i)
            values[i] = a * wl[i] + b;
        const Spectrum src = spectrum_of(WavelengthGrid(wl), values);
        const auto target = small_grid(31, wl.front(), wl.back());
        const Spectrum out = resample(src, target);
        for (std::size_t i = 0; i < target.size(); ++i) {
            const double expected = a * target[i] + b;
            CHECK(out[i] ==
                  doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("resample refuses to extrapolate") {
    const Spectrum s = spectrum_of(WavelengthGrid({450.0, 900.0}), {1.0, 2.0});
    CHECK_THROWS_WITH_AS(resample(s, WavelengthGrid({400.0, 800.0})),
                         doctest::Contains("TargetOutOfRange"), Error);
    CHECK_THROWS_AS(resample(s, WavelengthGrid({500.0, 950.0})), Error);
}

TEST_CASE("spectral angle basics") {
    const auto grid = small_grid(5);
    const Spectrum a = spectrum_of(grid, {0.2, 0.5, 0.9, 0.4, 0.1});
    CHECK(spectral_angle(a, a) == doctest::Approx(0.0).epsilon(1e-12));

    const Spectrum e1 = spectrum_of(grid, {1.0, 0.0, 0.0, 0.0, 0.0});
    const Spectrum e2 = spectrum_of(grid, {0.0, 1.0, 0.0, 0.0, 0.0});
    CHECK(spectral_angle(e1, e2) ==
          doctest::Approx(std::acos(0.0)).epsilon(1e-15));
}

TEST_CASE("spectral angle of two fixed 5-band vectors matches independent "
          "arithmetic") {
    const auto grid = small_grid(5);
    const Spectrum a = spectrum_of(grid, {0.2, 0.5, 0.9, 0.4, 0.1});
    const Spectrum b = spectrum_of(grid, {0.25, 0.45, 0.80, 0.50, 0.05});
    // acos(dot / (|a| |b|)) evaluated separately
    CHECK(spectral_angle(a, b) ==
          doctest::Approx(0.14340646942883128).epsilon(1e-12));
}

TEST_CASE("spectral angle properties: scale invariance and symmetry") {
    Xoshiro256 rng(7);
    const auto grid = small_grid(12);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> av(12), bv(12);
        for (int i = 0; i < 12; ++i) {
            av[i] = rng.uniform01() + 1e-3;
            bv[i] = rng.uniform01() + 1e-3;
        }
        const double k = rng.uniform01() * 9.0 + 0.5;
        std::vector<double> scaled = av;
        for (double& v : scaled)
            v *= k;
        const Spectrum a = spectrum_of(grid, av);
        const Spectrum b = spectrum_of(grid, bv);
        const Spectrum ka = spectrum_of(grid, scaled);
        CHECK(std::fabs(spectral_angle(a, b) - spectral_angle(ka, b)) <= 1e-12);
        CHECK(spectral_angle(a, b) == spectral_angle(b, a));
    }
}

TEST_CASE("spectral angle errors") {
    const auto grid = small_grid(3);
    const Spectrum a = spectrum_of(grid, {1.0, 2.0, 3.0});
    const Spectrum zero = spectrum_of(grid, {0.0, 0.0, 0.0});
    CHECK_THROWS_WITH_AS(spectral_angle(a, zero),
                         doctest::Contains("ZeroVector"), Error);
    const Spectrum other = spectrum_of(small_grid(4), {1.0, 2.0, 3.0, 4.0});
    CHECK_THROWS_WITH_AS(spectral_angle(a, other),
                         doctest::Contains("GridMismatch"), Error);
}

TEST_CASE("rmse") {
    const auto grid = small_grid(4);
    const Spectrum a = spectrum_of(grid, {0.1, 0.2, 0.3, 0.4});
    CHECK(rmse(a, a) == 0.0);

    const Spectrum shifted = spectrum_of(grid, {0.2, 0.3, 0.4, 0.5});
    CHECK(rmse(a, shifted) == doctest::Approx(0.1).epsilon(1e-12));

    // hand-computed: residuals (-0.05, 0.02, -0.04, -0.02)
    const Spectrum b = spectrum_of(grid, {0.15, 0.18, 0.34, 0.42});
    CHECK(rmse(a, b) == doctest::Approx(0.035).epsilon(1e-12));

    const Spectrum wrong_unit = Spectrum(grid, {0.1, 0.2, 0.3, 0.4},
                                         Unit::irradiance);
    CHECK_THROWS_WITH_AS(rmse(a, wrong_unit), doctest::Contains("UnitMismatch"),
                         Error);
}

TEST_CASE("box smoothing") {
    const auto grid = small_grid(5);
    const Spectrum impulse = spectrum_of(grid, {0.0, 0.0, 3.0, 0.0, 0.0});

    SUBCASE("width 1 is the identity") {
        CHECK(box_smooth(impulse, 1).values() == impulse.values());
    }
    SUBCASE("hand-evaluated moving average with replicated edges") {
        const Spectrum out = box_smooth(impulse, 3);
        const std::vector<double> expected{0.0, 1.0, 1.0, 1.0, 0.0};
        for (std::size_t i = 0; i < expected.size(); ++i)
            CHECK(out[i] == doctest::Approx(expected[i]).epsilon(1e-15));
    }
    SUBCASE("constants are preserved exactly for any width") {
        const Spectrum c = Spectrum::constant(grid, 0.7431, Unit::reflectance);
        for (int width : {1, 3, 5}) {
            const Spectrum out = box_smooth(c, width);
            CHECK(out.size() == c.size());
            for (std::size_t i = 0; i < out.size(); ++i)
                CHECK(out[i] == 0.7431);
        }
    }
    SUBCASE("bad widths are rejected") {
        CHECK_THROWS_WITH_AS(box_smooth(impulse, 2),
                             doctest::Contains("BadWidth"), Error);
        CHECK_THROWS_AS(box_smooth(impulse, 0), Error);
        CHECK_THROWS_AS(box_smooth(impulse, 7), Error);
        CHECK_THROWS_AS(box_smooth(impulse, -3), Error);
    }
}

TEST_CASE("roi mean spectrum") {
    const auto grid = small_grid(4);
    // 3x4 cube whose pixel (r, c) holds value (10 r + c) * (b + 1)
    std::vector<double> data;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c)
            for (int b = 0; b < 4; ++b)
                data.push_back((10.0 * r + c) * (b + 1));
    const HyperCube cube(3, 4, grid, Unit::radiance, data, 1e30);

    SUBCASE("single-pixel ROI returns that pixel") {
        const Roi roi = Roi::rect("one", 1, 2, 1, 2);
        const Spectrum out = roi_mean_spectrum(cube, roi);
        for (std::size_t b = 0; b < 4; ++b)
            CHECK(out[b] == cube.at(1, 2, b));
    }
    SUBCASE("mean of v and 3v is 2v") {
        // pixels (0,1) -> 1*(b+1) and (0,3) -> 3*(b+1)
        const Roi rect = Roi::rect("pair", 0, 1, 0, 3);
        const std::vector<bool> keep{true, false, true};
        const Spectrum out = roi_mean_spectrum(cube, rect, keep);
        for (std::size_t b = 0; b < 4; ++b)
            CHECK(out[b] == doctest::Approx(2.0 * (b + 1)).epsilon(1e-15));
    }
    SUBCASE("10-pixel ROI equals the brute-force accumulation oracle") {
        const Roi roi = Roi::rect("block", 0, 0, 1, 4 - 1);
        // leave out two pixels via the mask
        std::vector<bool> keep(roi.size(), true);
        keep[1] = false;
        keep[6] = false;
        const Spectrum out = roi_mean_spectrum(cube, roi, keep);
        for (std::size_t b = 0; b < 4; ++b) {
            // naive accumulation around the first kept pixel
            const double ref = cube.at(0, 0, b);
            double delta = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < roi.size(); ++i) {
                if (!keep[i])
                    continue;
                const auto& p = roi.pixels()[i];
                delta += cube.at(p.row, p.col, b) - ref;
                ++count;
            }
            CHECK(out[b] == ref + delta / static_cast<double>(count));
        }
    }
    SUBCASE("pixel set, not construction order, determines the result") {
        // same pixel set via a rect and via a polygon outline
        const Roi as_rect = Roi::rect("f", 0, 0, 2, 1);
        const Roi as_poly =
            Roi::polygon("f", {{0, 0}, {0, 1}, {2, 1}, {2, 0}});
        REQUIRE(as_poly.size() == as_rect.size());
        const Spectrum a = roi_mean_spectrum(cube, as_rect);
        const Spectrum b = roi_mean_spectrum(cube, as_poly);
        CHECK(a.values() == b.values());
    }
    SUBCASE("errors") {
        const Roi outside = Roi::rect("bad", 0, 0, 5, 5);
        CHECK_THROWS_WITH_AS(roi_mean_spectrum(cube, outside),
                             doctest::Contains("OutOfBounds"), Error);
        const Roi one = Roi::rect("none", 0, 0, 0, 0);
        CHECK_THROWS_WITH_AS(
            roi_mean_spectrum(cube, one, std::vector<bool>{false}),
            doctest::Contains("EmptyRoi"), Error);
    }
}

TEST_CASE("wavelength grid validation") {
    CHECK_THROWS_AS(WavelengthGrid({500.0, 500.0}), Error);
    CHECK_THROWS_AS(WavelengthGrid({500.0, 400.0}), Error);
    CHECK_THROWS_AS(WavelengthGrid({-1.0, 400.0}), Error);
    const auto grid = WavelengthGrid::linspace(400.0, 1000.0, 272);
    CHECK(grid.front() == 400.0);
    CHECK(grid.back() == 1000.0);
    CHECK(grid.size() == 272);
}

TEST_CASE("spectrum validation") {
    const auto grid = small_grid(3);
    CHECK_THROWS_AS(Spectrum(grid, {1.0, 2.0}, Unit::radiance), Error);
    CHECK_THROWS_AS(Spectrum(grid, {1.0, std::nan(""), 2.0}, Unit::radiance),
                    Error);
    // default reflectance ceiling is 1.5
    CHECK_THROWS_AS(Spectrum(grid, {0.5, 1.6, 0.2}, Unit::reflectance), Error);
    CHECK_NOTHROW(Spectrum(grid, {0.5, 1.6, 0.2}, Unit::reflectance, 2.0));
    CHECK_THROWS_AS(Spectrum(grid, {-0.1, 0.5, 0.2}, Unit::reflectance), Error);
}
