#include "hypercal/forward_sim.hpp"

#include <algorithm>
#include <cmath>

#include "hypercal/parallel.hpp"
#include "hypercal/random.hpp"

namespace hypercal {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Material::Material(std::string name_, Spectrum reflectance_)
    : name(std::move(name_)), reflectance(std::move(reflectance_)) {
    if (name.empty())
        fail(errc::bad_value, "material name must be non-empty");
    if (reflectance.unit() != Unit::reflectance)
        fail(errc::unit_mismatch, "material spectrum must be reflectance");
    for (double v : reflectance.values())
        if (v < 0.0 || v > 1.5)
            fail(errc::bad_value, "material reflectance outside [0, 1.5]");
}

IlluminationScenario::IlluminationScenario(std::string name_, Spectrum down)
    : name(std::move(name_)), downwelling(std::move(down)) {
    if (downwelling.unit() != Unit::irradiance)
        fail(errc::unit_mismatch, "scenario spectrum must be irradiance");
    for (double v : downwelling.values())
        if (v < 0.0)
            fail(errc::bad_value, "downwelling irradiance must be >= 0");
}

void SceneSpec::validate() const {
    if (rows <= 0 || cols <= 0)
        fail(errc::bad_value, "scene dimensions must be positive");
    if (materials.empty())
        fail(errc::bad_value, "scene needs at least one material");
    if (material_map.size() != pixel_count())
        fail(errc::size_mismatch, "material map length does not match scene");
    for (int idx : material_map)
        if (idx < 0 || static_cast<std::size_t>(idx) >= materials.size())
            fail(errc::out_of_bounds,
                 "material index " + std::to_string(idx) + " out of range");
    const WavelengthGrid& g = materials.front().reflectance.grid();
    for (const auto& m : materials)
        if (m.reflectance.grid() != g)
            fail(errc::grid_mismatch,
                 "material '" + m.name + "' is on a different grid");
    if (!incidence_cos.empty()) {
        if (incidence_cos.size() != pixel_count())
            fail(errc::size_mismatch,
                 "incidence map length does not match scene");
        for (double c : incidence_cos)
            if (!(c > 0.0) || c > 1.0)
                fail(errc::bad_value, "incidence cosine must lie in (0, 1]");
    }
}

HyperCube simulate_radiance(const SceneSpec& scene,
                            const IlluminationScenario& illum) {
    scene.validate();
    const WavelengthGrid& grid = scene.materials.front().reflectance.grid();
    if (illum.downwelling.grid() != grid)
        fail(errc::grid_mismatch,
             "scenario irradiance is not on the material grid");

    const std::size_t bands = grid.size();
    const auto& e = illum.downwelling.values();
    std::vector<double> out(scene.pixel_count() * bands);
    parallel_for(scene.pixel_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto& rho =
                scene.materials[static_cast<std::size_t>(scene.material_map[p])]
                    .reflectance;
            const double cos_theta =
                scene.incidence_cos.empty() ? 1.0 : scene.incidence_cos[p];
            const std::size_t base = p * bands;
            for (std::size_t b = 0; b < bands; ++b)
                out[base + b] = e[b] * (rho[b] * cos_theta / kPi);
        }
    });
    return HyperCube(scene.rows, scene.cols, grid, Unit::radiance,
                     std::move(out));
}

double photon_electrons(double flux_w, double t_s, double lambda_nm,
                        double eta) {
    if (!(flux_w > 0.0) || !(t_s > 0.0) || !(lambda_nm > 0.0) || !(eta > 0.0))
        fail(errc::domain_error, "photon-electron inputs must be positive");
    if (eta > 1.0)
        fail(errc::domain_error, "quantum efficiency cannot exceed 1");
    return flux_w * t_s * (lambda_nm * 1e-9) /
           (PhysicalConstants::planck_js * PhysicalConstants::light_speed_m_s) *
           eta;
}

HyperCube radiance_to_dc(const HyperCube& cube, const CalibrationConfig& cfg,
                         const NoiseModel& noise) {
    cfg.validate();
    if (cube.unit() != Unit::radiance)
        fail(errc::unit_mismatch, "DC rendering expects a radiance cube");
    if (!cfg.e_per_dc)
        fail(errc::missing_calibration,
             "no irradiance-per-count curve configured");
    const Spectrum& e_per_dc = *cfg.e_per_dc;
    if (e_per_dc.grid() != cube.grid())
        fail(errc::grid_mismatch,
             "irradiance-per-count curve grid does not match cube");
    if (noise.enable_poisson && noise.quantum_efficiency) {
        if (noise.quantum_efficiency->grid() != cube.grid())
            fail(errc::grid_mismatch, "QE curve grid does not match cube");
        for (double v : noise.quantum_efficiency->values())
            if (!(v > 0.0) || v > 1.0)
                fail(errc::bad_value, "quantum efficiency must lie in (0, 1]");
    }

    const SensorModel& sensor = cfg.sensor;
    if (sensor.grid() != cube.grid())
        fail(errc::grid_mismatch, "sensor grid does not match cube");
    const std::size_t bands = cube.bands();
    const double max_dc = sensor.max_dc();
    const auto& dark = sensor.dark_frame();
    const auto& in = cube.data();
    // Etendue-bandwidth factor turning band radiance into band flux.
    const double aperture =
        sensor.gsd_m() * sensor.gsd_m() * sensor.ifov_rad() * sensor.ifov_rad();

    std::vector<double> out(in.size());
    parallel_for(cube.pixel_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            Xoshiro256 rng = Xoshiro256::for_index(noise.seed, p);
            const std::size_t base = p * bands;
            for (std::size_t b = 0; b < bands; ++b) {
                const double radiance = in[base + b];
                double value = radiance * kPi / e_per_dc[b];
                if (noise.enable_poisson && radiance > 0.0) {
                    const double eta = noise.quantum_efficiency
                                           ? (*noise.quantum_efficiency)[b]
                                           : 1.0;
                    const double flux =
                        radiance * aperture * sensor.bandwidths_nm()[b];
                    const double electrons = photon_electrons(
                        flux, sensor.exposure_s(), cube.grid()[b], eta);
                    if (electrons > 0.0) {
                        const double n = static_cast<double>(
                            poisson_sample(electrons, rng));
                        value *= n / electrons;
                    }
                }
                const double dc = std::nearbyint(value) + dark[b];
                out[base + b] = std::clamp(dc, 0.0, max_dc);
            }
        }
    });
    return HyperCube(cube.rows(), cube.cols(), cube.grid(),
                     Unit::digital_count, std::move(out));
}

std::vector<ScenarioRender> render_scenarios(
    const SceneSpec& scene, const std::vector<IlluminationScenario>& scenarios,
    const CalibrationConfig& cfg, const NoiseModel& noise,
    bool with_digital_counts) {
    std::vector<ScenarioRender> renders;
    renders.reserve(scenarios.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        ScenarioRender render;
        render.name = scenarios[i].name;
        render.radiance = simulate_radiance(scene, scenarios[i]);
        if (with_digital_counts) {
            // Distinct, reproducible noise stream per scenario.
            NoiseModel scenario_noise = noise;
            std::uint64_t mix = noise.seed + 0x9E3779B97F4A7C15ull * i;
            scenario_noise.seed = splitmix64(mix);
            render.digital_counts =
                radiance_to_dc(render.radiance, cfg, scenario_noise);
        }
        renders.push_back(std::move(render));
    }
    return renders;
}

} // namespace hypercal
