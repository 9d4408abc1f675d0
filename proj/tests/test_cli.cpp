#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "hypercal/commands.hpp"
#include "hypercal/forward_sim.hpp"
#include "hypercal/io/envi.hpp"
#include "hypercal/io/text.hpp"
#include "hypercal/radcal.hpp"
#include "hypercal/spectral_ops.hpp"
#include "test_support.hpp"

using namespace hypercal;
using namespace testutil;
namespace fs = std::filesystem;
namespace io = hypercal::io;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

fs::path write_sensor_json(const fs::path& dir, double dark = 100.0) {
    const fs::path path = dir / "sensor.json";
    std::ostringstream text;
    text << "{\n"
         << "  \"wavelengths_nm\": {\"min\": 400, \"max\": 1000, \"bands\": 272},\n"
         << "  \"bandwidth_nm\": 2.2140221402214022,\n"
         << "  \"bit_depth\": 12,\n"
         << "  \"exposure_s\": 0.005,\n"
         << "  \"ifov_rad\": 0.001,\n"
         << "  \"gsd_m\": 0.008,\n"
         << "  \"dark_frame\": {\"constant\": " << dark << "}\n"
         << "}\n";
    write_text(path, text.str());
    return path;
}

// Rounded Gaussian sweep frame, written to disk as a 1-line DC cube.
void write_sweep_frame(const fs::path& path, const SensorModel& sensor,
                       double amplitude, double center_band) {
    const std::size_t bands = sensor.bands();
    const int spatial = 4;
    std::vector<double> data(static_cast<std::size_t>(spatial) * bands);
    for (int s = 0; s < spatial; ++s)
        for (std::size_t b = 0; b < bands; ++b) {
            const double d = (static_cast<double>(b) - center_band) / 1.5;
            data[static_cast<std::size_t>(s) * bands + b] = std::clamp(
                std::nearbyint(amplitude * std::exp(-0.5 * d * d) +
                               sensor.dark_frame()[b]),
                0.0, sensor.max_dc() - 1.0);
        }
    io::write_cube_file(
        HyperCube(1, spatial, sensor.grid(), Unit::digital_count, data), path);
}

// Manifest covering the sensor range with `n` evenly spaced steps.
fs::path write_sweep_fixture(const fs::path& dir, const SensorModel& sensor,
                             int n) {
    std::ostringstream manifest;
    manifest << "# monochromator sweep\n";
    for (int i = 0; i < n; ++i) {
        const double lambda =
            400.0 + 600.0 * static_cast<double>(i) / (n - 1);
        const double center =
            (lambda - 400.0) / 600.0 * static_cast<double>(sensor.bands() - 1);
        const double qe = smooth_curve(lambda, 640.0, 170.0, 0.3);
        const std::string frame = "frame_" + std::to_string(i) + ".hdr";
        write_sweep_frame(dir / frame, sensor, 3000.0 * qe, center);
        manifest << lambda << ", " << frame << ", 2e-6, 0.01, 10\n";
    }
    const fs::path path = dir / "sweep.txt";
    write_text(path, manifest.str());
    return path;
}

RunConfig quiet_config() {
    RunConfig config;
    config.threads = 1;
    return config;
}

} // namespace

TEST_CASE("calibrate command") {
    TempDir dir("cal");
    const SensorModel sensor = default_sensor(100.0);
    const fs::path sensor_json = write_sensor_json(dir.path());

    SUBCASE("sweep fixture produces a responsivity file with peak exactly 1") {
        const fs::path manifest = write_sweep_fixture(dir.path(), sensor, 9);
        std::ostringstream log;
        cmd_calibrate({manifest, sensor_json, dir.path() / "out"},
                      quiet_config(), log);
        const io::SpectrumFileData resp =
            io::read_spectrum_file(dir.path() / "out" / "responsivity.txt");
        CHECK(resp.spectrum.unit() == Unit::responsivity);
        CHECK(resp.spectrum.max_value() == 1.0);
        const io::SpectrumFileData epdc =
            io::read_spectrum_file(dir.path() / "out" / "e_per_dc.txt");
        CHECK(epdc.spectrum.size() == sensor.bands());
        for (double v : epdc.spectrum.values())
            CHECK(v > 0.0);
        CHECK(fs::exists(dir.path() / "out" / "fit_report.txt"));
        CHECK(fs::exists(dir.path() / "out" / "config_used.json"));
    }
    SUBCASE("a manifest referencing a missing frame fails before fitting") {
        const fs::path manifest = dir.path() / "bad.txt";
        write_text(manifest, "400, nowhere.hdr, 2e-6, 0.01, 10\n"
                             "1000, alsonot.hdr, 2e-6, 0.01, 10\n");
        std::ostringstream log;
        CHECK_THROWS_WITH_AS(
            cmd_calibrate({manifest, sensor_json, dir.path() / "o2"},
                          quiet_config(), log),
            doctest::Contains("sweep frame"), Error);
    }
    SUBCASE("a 1-step manifest is InsufficientSteps") {
        write_sweep_frame(dir.path() / "only.hdr", sensor, 2000.0, 135.0);
        const fs::path manifest = dir.path() / "one.txt";
        write_text(manifest, "700, only.hdr, 2e-6, 0.01, 10\n");
        std::ostringstream log;
        CHECK_THROWS_WITH_AS(
            cmd_calibrate({manifest, sensor_json, dir.path() / "o3"},
                          quiet_config(), log),
            doctest::Contains("InsufficientSteps"), Error);
    }
}

TEST_CASE("convert command") {
    TempDir dir("conv");
    const SensorModel sensor = default_sensor(100.0);
    const fs::path sensor_json = write_sensor_json(dir.path());
    const auto& grid = sensor.grid();

    // forward-simulated DC fixture from two known paints
    SceneSpec scene;
    scene.rows = 4;
    scene.cols = 4;
    std::vector<double> paint(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b)
        paint[b] = smooth_curve(grid[b], 620.0, 140.0, 0.15);
    scene.materials.emplace_back("paint",
                                 Spectrum(grid, paint, Unit::reflectance));
    scene.materials.emplace_back(
        "gray", Spectrum::constant(grid, 0.4, Unit::reflectance));
    scene.material_map.assign(scene.pixel_count(), 0);
    scene.material_map[5] = 1;
    scene.material_map[10] = 1;

    const Spectrum noon = Spectrum::constant(grid, 1.0, Unit::irradiance);
    CalibrationConfig cfg{
        sensor, Spectrum::constant(grid, 0.001, Unit::irradiance)};
    const HyperCube radiance = simulate_radiance(scene, {"noon", noon});
    const HyperCube dc = radiance_to_dc(radiance, cfg);
    io::write_cube_file(dc, dir.path() / "raw");

    io::write_spectrum_file(dir.path() / "epdc.txt", *cfg.e_per_dc, {});
    // two-sample log bracketing the acquisition time
    std::vector<IrradianceSeries::Sample> samples;
    samples.emplace_back(100.0, noon);
    samples.emplace_back(104.0, noon);
    io::write_irradiance_log(dir.path() / "irr.txt",
                             IrradianceSeries{samples});

    SUBCASE("reflectance cube matches the source materials to the "
            "quantization bound") {
        ConvertArgs args;
        args.cube = dir.path() / "raw.hdr";
        args.sensor_spec = sensor_json;
        args.e_per_dc = dir.path() / "epdc.txt";
        args.irradiance_log = dir.path() / "irr.txt";
        args.timestamp_s = 102.0;
        args.out_dir = dir.path() / "out";
        args.keep_radiance = true;
        std::ostringstream log;
        cmd_convert(args, quiet_config(), log);

        const HyperCube rho =
            io::read_cube_file(dir.path() / "out" / "reflectance.hdr");
        CHECK(rho.unit() == Unit::reflectance);
        // DC quantization: |drho| <= 0.5 * edc * pi / (E pi) = 0.5*edc/E
        const double bound = 0.5 * 0.001 / 1.0 * 3.14159265358979323846;
        for (int r = 0; r < scene.rows; ++r)
            for (int c = 0; c < scene.cols; ++c) {
                const auto& truth =
                    scene
                        .materials[static_cast<std::size_t>(
                            scene.material_map[static_cast<std::size_t>(
                                r * scene.cols + c)])]
                        .reflectance;
                for (std::size_t b = 0; b < grid.size(); ++b)
                    CHECK(std::fabs(rho.at(r, c, b) - truth[b]) <= bound);
            }
        CHECK(fs::exists(dir.path() / "out" / "radiance.hdr"));
    }
    SUBCASE("a radiance cube is rejected up front") {
        io::write_cube_file(radiance, dir.path() / "alreadyrad");
        ConvertArgs args;
        args.cube = dir.path() / "alreadyrad.hdr";
        args.sensor_spec = sensor_json;
        args.e_per_dc = dir.path() / "epdc.txt";
        args.irradiance_log = dir.path() / "irr.txt";
        args.timestamp_s = 102.0;
        args.out_dir = dir.path() / "o2";
        std::ostringstream log;
        CHECK_THROWS_WITH_AS(cmd_convert(args, quiet_config(), log),
                             doctest::Contains("UnitMismatch"), Error);
    }
    SUBCASE("timestamps outside the log window fail") {
        ConvertArgs args;
        args.cube = dir.path() / "raw.hdr";
        args.sensor_spec = sensor_json;
        args.e_per_dc = dir.path() / "epdc.txt";
        args.irradiance_log = dir.path() / "irr.txt";
        args.timestamp_s = 120.0;
        args.out_dir = dir.path() / "o3";
        std::ostringstream log;
        CHECK_THROWS_WITH_AS(cmd_convert(args, quiet_config(), log),
                             doctest::Contains("OutOfWindow"), Error);
    }
}

TEST_CASE("roi and extract commands") {
    TempDir dir("roi");
    const SensorModel sensor = default_sensor(0.0);
    const fs::path sensor_json = write_sensor_json(dir.path(), 0.0);
    const auto& grid = sensor.grid();

    // 6x6 DC cube: mostly paint, one saturated pixel, one glint pixel
    std::vector<double> sky(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b)
        sky[b] = smooth_curve(grid[b], 460.0, 220.0, 0.15);
    std::vector<double> paint(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b)
        paint[b] = 300.0 * smooth_curve(grid[b], 620.0, 140.0, 0.3);

    std::vector<double> data;
    for (int p = 0; p < 36; ++p) {
        std::vector<double> v = paint;
        if (p == 7) {
            v.assign(grid.size(), 4095.0);
        } else if (p == 14) {
            const double target = 10.0 * 200.0;
            double sky_mean = 0.0;
            for (double x : sky)
                sky_mean += x;
            sky_mean /= static_cast<double>(grid.size());
            v = sky;
            for (double& x : v)
                x = std::nearbyint(x * target / sky_mean);
        }
        data.insert(data.end(), v.begin(), v.end());
    }
    for (double& v : data)
        v = std::nearbyint(std::clamp(v, 0.0, 4095.0));
    io::write_cube_file(HyperCube(6, 6, grid, Unit::digital_count, data),
                        dir.path() / "cube");
    io::write_spectrum_file(dir.path() / "down.txt",
                            Spectrum(grid, sky, Unit::irradiance), {});
    write_text(dir.path() / "rois.txt", "hood, 0, 0, 5, 5\n");

    RoiArgs rargs;
    rargs.cube = dir.path() / "cube.hdr";
    rargs.roi_file = dir.path() / "rois.txt";
    rargs.downwelling = dir.path() / "down.txt";
    rargs.sensor_spec = sensor_json;
    rargs.out_dir = dir.path() / "rout";
    std::ostringstream rlog;
    cmd_roi(rargs, quiet_config(), rlog);

    const auto masks = io::read_roi_masks(dir.path() / "rout" / "roi_mask.txt");
    REQUIRE(masks.count("hood") == 1);
    const auto& entries = masks.at("hood");
    REQUIRE(entries.size() == 36);
    std::size_t kept = 0;
    for (const auto& [pixel, keep] : entries)
        kept += keep;
    CHECK(kept == 34);
    CHECK_FALSE(entries[7].second);
    CHECK_FALSE(entries[14].second);
    CHECK(rlog.str().find("hood") != std::string::npos);

    // extract from a reflectance cube using the mask
    std::vector<double> rho_data;
    for (int p = 0; p < 36; ++p) {
        for (std::size_t b = 0; b < grid.size(); ++b) {
            double v = paint[b] / 300.0;
            if (p == 7 || p == 14)
                v = 1.4; // corrupted pixels would skew the mean
            rho_data.push_back(v);
        }
    }
    io::write_cube_file(HyperCube(6, 6, grid, Unit::reflectance, rho_data),
                        dir.path() / "rho");

    ExtractArgs eargs;
    eargs.cube = dir.path() / "rho.hdr";
    eargs.roi_file = dir.path() / "rois.txt";
    eargs.mask_file = dir.path() / "rout" / "roi_mask.txt";
    eargs.metadata = {{"name", "test-paint"}, {"make", "Honda"}};
    eargs.timestamp_s = 55.0;
    eargs.out_dir = dir.path() / "lib";
    std::ostringstream elog;
    cmd_extract(eargs, quiet_config(), elog);

    const SignatureRecord record =
        io::read_signature_record(dir.path() / "lib" / "test-paint.sig.txt");
    CHECK(*record.find_metadata("make") == "Honda");
    CHECK(record.timestamp_s == 55.0);
    // corrupted pixels were masked out, so the signature is the paint
    // curve after the default width-5 box filter
    std::vector<double> rho_paint(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b)
        rho_paint[b] = paint[b] / 300.0;
    const Spectrum expected =
        box_smooth(Spectrum(grid, rho_paint, Unit::reflectance), 5);
    for (std::size_t b = 0; b < grid.size(); ++b)
        CHECK(record.reflectance[b] ==
              doctest::Approx(expected[b]).epsilon(1e-9));
}

TEST_CASE("simulate command") {
    TempDir dir("sim");
    const SensorModel sensor = default_sensor(100.0);
    const fs::path sensor_json = write_sensor_json(dir.path());
    const auto& grid = sensor.grid();

    std::vector<double> paint(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b)
        paint[b] = smooth_curve(grid[b], 540.0, 110.0, 0.2);
    io::write_spectrum_file(dir.path() / "m0.txt",
                            Spectrum(grid, paint, Unit::reflectance), {});
    io::write_spectrum_file(
        dir.path() / "m1.txt",
        Spectrum::constant(grid, 0.5, Unit::reflectance), {});
    write_text(dir.path() / "scene.txt",
               "2 2\n0 paint m0.txt\n1 gray m1.txt\n0 1\n1 0\n");
    io::write_spectrum_file(dir.path() / "noon.txt",
                            Spectrum::constant(grid, 1.0, Unit::irradiance),
                            {{"name", "noon"}});
    std::vector<double> cloudy(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b)
        cloudy[b] = 0.4;
    io::write_spectrum_file(dir.path() / "cloudy.txt",
                            Spectrum(grid, cloudy, Unit::irradiance),
                            {{"name", "cloudy"}});
    io::write_spectrum_file(dir.path() / "epdc.txt",
                            Spectrum::constant(grid, 0.001, Unit::irradiance),
                            {});

    SUBCASE("radiance and DC cubes per scenario") {
        SimulateArgs args;
        args.scene = dir.path() / "scene.txt";
        args.scenarios = {dir.path() / "noon.txt", dir.path() / "cloudy.txt"};
        args.sensor_spec = sensor_json;
        args.e_per_dc = dir.path() / "epdc.txt";
        args.with_dc = true;
        args.out_dir = dir.path() / "out";
        std::ostringstream log;
        cmd_simulate(args, quiet_config(), log);

        const HyperCube noon_l =
            io::read_cube_file(dir.path() / "out" / "radiance_noon.hdr");
        const HyperCube cloudy_l =
            io::read_cube_file(dir.path() / "out" / "radiance_cloudy.hdr");
        CHECK(noon_l.unit() == Unit::radiance);
        for (std::size_t i = 0; i < noon_l.data().size(); ++i)
            CHECK(cloudy_l.data()[i] == 0.4 * noon_l.data()[i]);
        const HyperCube dc =
            io::read_cube_file(dir.path() / "out" / "dc_noon.hdr");
        CHECK(dc.unit() == Unit::digital_count);
    }
    SUBCASE("an empty scenario list renders nothing") {
        SimulateArgs args;
        args.scene = dir.path() / "scene.txt";
        args.sensor_spec = sensor_json;
        args.out_dir = dir.path() / "empty";
        std::ostringstream log;
        cmd_simulate(args, quiet_config(), log);
        CHECK(log.str().find("nothing to render") != std::string::npos);
        CHECK_FALSE(fs::exists(dir.path() / "empty" / "radiance_noon.hdr"));
    }
}

TEST_CASE("compare command") {
    TempDir dir("cmp");
    const auto grid = small_grid(61);
    std::vector<double> a(grid.size()), b(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        a[i] = smooth_curve(grid[i], 560.0, 130.0, 0.2);
        b[i] = a[i] + 0.01;
    }
    io::write_spectrum_file(dir.path() / "a.txt",
                            Spectrum(grid, a, Unit::reflectance), {});
    io::write_spectrum_file(dir.path() / "b.txt",
                            Spectrum(grid, b, Unit::reflectance), {});

    SUBCASE("identical files give zero metrics") {
        std::ostringstream log;
        const CompareResult result = cmd_compare(
            {dir.path() / "a.txt", dir.path() / "a.txt", std::nullopt},
            quiet_config(), log);
        CHECK(result.angle_rad == 0.0);
        CHECK(result.rmse_value == 0.0);
        CHECK_FALSE(result.resampled);
    }
    SUBCASE("metrics match the spectral-core operations") {
        std::ostringstream log;
        CompareArgs args{dir.path() / "a.txt", dir.path() / "b.txt",
                         dir.path() / "cout"};
        const CompareResult result = cmd_compare(args, quiet_config(), log);
        const Spectrum sa(grid, a, Unit::reflectance);
        const Spectrum sb(grid, b, Unit::reflectance);
        CHECK(result.angle_rad == spectral_angle(sa, sb));
        CHECK(result.rmse_value == rmse(sa, sb));
        CHECK(fs::exists(dir.path() / "cout" / "compare.txt"));
    }
    SUBCASE("overlapping grids resample with a warning") {
        const auto other = small_grid(41, 500.0, 1100.0);
        std::vector<double> c(other.size(), 0.3);
        io::write_spectrum_file(dir.path() / "c.txt",
                                Spectrum(other, c, Unit::reflectance), {});
        std::ostringstream log;
        const CompareResult result = cmd_compare(
            {dir.path() / "a.txt", dir.path() / "c.txt", std::nullopt},
            quiet_config(), log);
        CHECK(result.resampled);
        CHECK(log.str().find("warning") != std::string::npos);
    }
    SUBCASE("disjoint ranges are an error") {
        const auto far = small_grid(11, 1200.0, 1500.0);
        io::write_spectrum_file(
            dir.path() / "far.txt",
            Spectrum::constant(far, 0.2, Unit::reflectance), {});
        std::ostringstream log;
        CHECK_THROWS_WITH_AS(
            cmd_compare({dir.path() / "a.txt", dir.path() / "far.txt",
                         std::nullopt},
                        quiet_config(), log),
            doctest::Contains("disjoint"), Error);
    }
}

TEST_CASE("errors map to the documented exit codes") {
    // validation problems exit 1, computation failures exit 2
    CHECK(cli_exit_code(errc::io_error) == 1);
    CHECK(cli_exit_code(errc::parse_error) == 1);
    CHECK(cli_exit_code(errc::unit_mismatch) == 1);
    CHECK(cli_exit_code(errc::out_of_window) == 1);
    CHECK(cli_exit_code(errc::insufficient_steps) == 1);
    CHECK(cli_exit_code(errc::no_peak) == 2);
    CHECK(cli_exit_code(errc::fit_diverged) == 2);
    CHECK(cli_exit_code(errc::saturated_profile) == 2);
    CHECK(cli_exit_code(errc::zero_responsivity) == 2);
    CHECK(cli_exit_code(errc::zero_irradiance) == 2);
}

TEST_CASE("run config file round trip and overrides") {
    TempDir dir("cfg");
    RunConfig config;
    config.quality.glint_bright_ratio = 2.5;
    config.smoothing_width = 7;
    config.seed = 99;
    write_text(dir.path() / "config.json", serialize_run_config(config));
    const RunConfig back = load_run_config(dir.path() / "config.json");
    CHECK(back.quality.glint_bright_ratio == 2.5);
    CHECK(back.smoothing_width == 7);
    CHECK(back.seed == 99);
    CHECK(back.clip_max == 1.5);

    write_text(dir.path() / "bad.json", "{ not json");
    CHECK_THROWS_WITH_AS(load_run_config(dir.path() / "bad.json"),
                         doctest::Contains("BadConfig"), Error);
    write_text(dir.path() / "wrongtype.json", "{\"clip_max\": \"big\"}");
    CHECK_THROWS_AS(load_run_config(dir.path() / "wrongtype.json"), Error);
}
