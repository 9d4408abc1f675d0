// Generates a self-contained demo workspace: a sensor spec, a 61-step
// monochromator sweep, a raw flight-line chip rendered from four paint
// signatures, a downwelling irradiance log, scenario spectra, a scene
// file, and ROI definitions. Everything the README walkthrough needs.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hypercal/calibration.hpp"
#include "hypercal/forward_sim.hpp"
#include "hypercal/io/envi.hpp"
#include "hypercal/io/text.hpp"
#include "hypercal/radcal.hpp"
#include "hypercal/random.hpp"

using namespace hypercal;
namespace fs = std::filesystem;
namespace io = hypercal::io;

namespace {

double curve(double lambda_nm, double center, double width, double floor_value) {
    const double d = (lambda_nm - center) / width;
    return floor_value + (1.0 - floor_value) * std::exp(-0.5 * d * d);
}

SensorModel demo_sensor() {
    WavelengthGrid grid = WavelengthGrid::linspace(400.0, 1000.0, 272);
    std::vector<double> bandwidths(grid.size(), 600.0 / 271.0);
    return SensorModel(grid, bandwidths, 12, 0.005, 1e-3, 0.008,
                       Spectrum::constant(grid, 100.0, Unit::digital_count));
}

void write_sensor_json(const fs::path& path) {
    std::ofstream out(path);
    out << "{\n"
        << "  \"wavelengths_nm\": {\"min\": 400, \"max\": 1000, \"bands\": 272},\n"
        << "  \"bandwidth_nm\": 2.2140221402214022,\n"
        << "  \"bit_depth\": 12,\n"
        << "  \"exposure_s\": 0.005,\n"
        << "  \"ifov_rad\": 0.001,\n"
        << "  \"gsd_m\": 0.008,\n"
        << "  \"dark_frame\": {\"constant\": 100}\n"
        << "}\n";
}

// Writes the sweep and returns the steps so the demo's E/DC curve can be
// derived from the very frames the user will calibrate against.
std::vector<MonochromatorStep> write_sweep(const fs::path& dir,
                                           const SensorModel& sensor,
                                           std::uint64_t seed) {
    fs::create_directories(dir / "frames");
    std::ofstream manifest(dir / "sweep.txt");
    manifest << "# monochromator sweep, 61 steps of 10 nm\n";
    const std::size_t bands = sensor.bands();
    std::vector<MonochromatorStep> steps;
    for (int i = 0; i < 61; ++i) {
        const double lambda = 400.0 + 10.0 * i;
        const double amplitude = 3000.0 * curve(lambda, 640.0, 170.0, 0.3);
        const double center =
            (lambda - 400.0) / 600.0 * static_cast<double>(bands - 1);
        Xoshiro256 rng(seed * 61 + static_cast<std::uint64_t>(i));
        const int spatial = 8;
        std::vector<double> data(static_cast<std::size_t>(spatial) * bands);
        for (int s = 0; s < spatial; ++s)
            for (std::size_t b = 0; b < bands; ++b) {
                const double d = (static_cast<double>(b) - center) / 1.5;
                const double v = amplitude * std::exp(-0.5 * d * d) +
                                 sensor.dark_frame()[b] + 3.0 * rng.gaussian();
                data[static_cast<std::size_t>(s) * bands + b] =
                    std::clamp(std::nearbyint(v), 0.0, sensor.max_dc() - 1.0);
            }
        const std::string name =
            "frames/step_" + std::to_string(static_cast<int>(lambda)) + "nm";
        HyperCube frame(1, spatial, sensor.grid(), Unit::digital_count, data);
        io::write_cube_file(frame, dir / name);
        manifest << lambda << ", " << name << ".hdr, 2e-6, 0.01, 10\n";
        MonochromatorStep step;
        step.lambda_nm = lambda;
        step.frame = std::move(frame);
        step.flux_ref_w = 2e-6;
        step.exposure_ref_s = 0.01;
        step.bandwidth_ref_nm = 10.0;
        steps.push_back(std::move(step));
    }
    return steps;
}

std::vector<Material> demo_paints(const WavelengthGrid& grid) {
    struct Paint {
        const char* name;
        double center, width, floor_value;
    };
    const Paint paints[] = {
        {"sedan-red", 690.0, 60.0, 0.06},
        {"suv-white", 700.0, 800.0, 0.72},
        {"hatch-blue", 460.0, 55.0, 0.05},
        {"coupe-gray", 640.0, 400.0, 0.28},
    };
    std::vector<Material> materials;
    for (const Paint& p : paints) {
        std::vector<double> rho(grid.size());
        for (std::size_t b = 0; b < grid.size(); ++b)
            rho[b] = curve(grid[b], p.center, p.width, p.floor_value);
        materials.emplace_back(p.name, Spectrum(grid, rho, Unit::reflectance));
    }
    return materials;
}

void write_scenarios(const fs::path& dir, const WavelengthGrid& grid,
                     double scale) {
    fs::create_directories(dir);
    const Spectrum noon = Spectrum::constant(grid, scale, Unit::irradiance);
    io::write_spectrum_file(dir / "noon.txt", noon, {{"name", "noon"}});
    std::vector<double> cloudy(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b)
        cloudy[b] = 0.4 * noon[b];
    io::write_spectrum_file(dir / "cloudy.txt",
                            Spectrum(grid, cloudy, Unit::irradiance),
                            {{"name", "cloudy"}});
    std::vector<double> sunset(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b) {
        const double dip =
            1.0 - 0.6 * std::exp(-0.5 * std::pow((grid[b] - 760.0) / 6.0, 2));
        sunset[b] = 0.25 * noon[b] * dip;
    }
    io::write_spectrum_file(dir / "sunset.txt",
                            Spectrum(grid, sunset, Unit::irradiance),
                            {{"name", "sunset"}});
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: hypercal-demo OUTPUT_DIR\n";
        return 1;
    }
    const fs::path dir = argv[1];
    try {
        fs::create_directories(dir);
        const SensorModel sensor = demo_sensor();
        const auto& grid = sensor.grid();

        write_sensor_json(dir / "sensor.json");
        const auto sweep_steps = write_sweep(dir, sensor, 7);

        // parking-row scene: four paints plus glint and shadow stripes
        const std::vector<Material> paints = demo_paints(grid);
        fs::create_directories(dir / "paints");
        for (std::size_t m = 0; m < paints.size(); ++m)
            io::write_spectrum_file(dir / "paints" /
                                        (paints[m].name + ".txt"),
                                    paints[m].reflectance,
                                    {{"name", paints[m].name}});

        SceneSpec scene;
        scene.rows = 32;
        scene.cols = 32;
        scene.materials = paints;
        scene.material_map.resize(scene.pixel_count());
        for (int r = 0; r < scene.rows; ++r)
            for (int c = 0; c < scene.cols; ++c)
                scene.material_map[static_cast<std::size_t>(r * scene.cols + c)] =
                    (r / 8 + c / 8) % 4;

        {
            std::ofstream sc(dir / "scene.txt");
            sc << "# demo parking row\n" << scene.rows << " " << scene.cols
               << "\n";
            for (std::size_t m = 0; m < paints.size(); ++m)
                sc << m << " " << paints[m].name << " paints/"
                   << paints[m].name << ".txt\n";
            for (int r = 0; r < scene.rows; ++r) {
                for (int c = 0; c < scene.cols; ++c)
                    sc << scene.material_map[static_cast<std::size_t>(
                              r * scene.cols + c)]
                       << (c + 1 < scene.cols ? " " : "");
                sc << "\n";
            }
        }

        // The flight chip is rendered with the E/DC curve this camera's
        // own sweep yields, so `calibrate` then `convert` closes the loop.
        // The demo illumination sits at the radiometric scale that curve
        // implies (mid-range counts on the 12-bit ADC).
        const ResponsivityCurve resp = build_responsivity(sweep_steps, sensor);
        const Spectrum e_per_dc = irradiance_per_count(
            resp, ReferenceParams::scalar(2e-6, 0.01, 10.0), sensor);
        CalibrationConfig cfg{sensor, e_per_dc};
        const double e_scale = 2e6;
        write_scenarios(dir / "scenarios", grid, e_scale);

        std::vector<double> e(grid.size());
        for (std::size_t b = 0; b < grid.size(); ++b)
            e[b] = e_scale * (0.9 + 0.3 * std::sin(grid[b] / 70.0));
        const Spectrum downwelling(grid, e, Unit::irradiance);

        const HyperCube radiance =
            simulate_radiance(scene, {"noon", downwelling});
        std::vector<double> dc_data =
            radiance_to_dc(radiance, cfg).data();
        // inject a glint row (saturating, an order of magnitude brighter)
        // and a shadow row so the roi command has work to do
        for (int c = 0; c < scene.cols; ++c) {
            for (std::size_t b = 0; b < grid.size(); ++b) {
                const std::size_t glint_idx =
                    (static_cast<std::size_t>(10) * scene.cols + c) *
                        grid.size() +
                    b;
                dc_data[glint_idx] = 4095.0;
                const std::size_t shadow_idx =
                    (static_cast<std::size_t>(20) * scene.cols + c) *
                        grid.size() +
                    b;
                dc_data[shadow_idx] =
                    std::nearbyint(0.15 * dc_data[shadow_idx]);
            }
        }
        io::write_cube_file(HyperCube(scene.rows, scene.cols, grid,
                                      Unit::digital_count, dc_data),
                            dir / "flightline");

        // 0.5 Hz irradiance log straddling the acquisition time
        std::vector<IrradianceSeries::Sample> samples;
        for (int i = 0; i < 8; ++i) {
            std::vector<double> et(grid.size());
            for (std::size_t b = 0; b < grid.size(); ++b)
                et[b] = e[b] * (1.0 + 0.002 * i);
            samples.emplace_back(100.0 + 2.0 * i,
                                 Spectrum(grid, et, Unit::irradiance));
        }
        io::write_irradiance_log(dir / "irradiance.txt",
                                 IrradianceSeries{samples});

        {
            // each ROI stays inside one 8x8 paint block, like picking a
            // planar patch on one hood
            std::ofstream rois(dir / "rois.txt");
            rois << "# hoods of the demo vehicles\n"
                 << "red-hood, 2, 2, 6, 6\n"
                 << "white-roof, 2, 10, 6, 14\n"
                 << "glint-patch, 9, 2, 11, 6\n"
                 << "shade-patch, 19, 2, 21, 6\n";
        }
        {
            std::ofstream config(dir / "config.json");
            config << "{\n  \"seed\": 7,\n  \"smoothing_width\": 5\n}\n";
        }
        std::cout << "demo workspace written to " << dir << "\n";
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
