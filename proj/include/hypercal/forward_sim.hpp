#ifndef HYPERCAL_FORWARD_SIM_HPP
#define HYPERCAL_FORWARD_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypercal/cube.hpp"
#include "hypercal/radcal.hpp"

namespace hypercal {

struct Material {
    std::string name;
    Spectrum reflectance; // unitless, within [0, 1.5]

    Material() = default;
    Material(std::string name, Spectrum reflectance);
};

// Desk-scale Lambertian scene: a material index per pixel plus an
// optional per-pixel incidence cosine (empty means nadir everywhere).
struct SceneSpec {
    int rows = 0;
    int cols = 0;
    std::vector<int> material_map; // row-major, rows*cols entries
    std::vector<Material> materials;
    std::vector<double> incidence_cos; // empty or rows*cols entries

    void validate() const;
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }
};

struct IlluminationScenario {
    std::string name;
    Spectrum downwelling; // irradiance, >= 0 everywhere

    IlluminationScenario() = default;
    IlluminationScenario(std::string name, Spectrum downwelling);
};

struct NoiseModel {
    bool enable_poisson = false;
    std::uint64_t seed = 0;
    // Quantum efficiency per band in (0, 1]; missing means 1 everywhere.
    std::optional<Spectrum> quantum_efficiency;
};

// L = E * (rho * cos(theta) / pi), per pixel and band.
HyperCube simulate_radiance(const SceneSpec& scene,
                            const IlluminationScenario& illum);

// DC = round_half_even(L * pi / (E/DC)) + dark, clipped to [0, max_dc].
// With Poisson noise enabled the pre-round value is scaled by n/S_e where
// n ~ Poisson(S_e) and S_e is the photon-electron count for the band;
// the per-pixel generator is seeded by pixel index, so results are
// independent of the parallel schedule.
HyperCube radiance_to_dc(const HyperCube& cube, const CalibrationConfig& cfg,
                         const NoiseModel& noise = {});

// S_e = flux * t * lambda / (h c) * eta, with lambda given in nm.
double photon_electrons(double flux_w, double t_s, double lambda_nm, double eta);

struct ScenarioRender {
    std::string name;
    HyperCube radiance;
    std::optional<HyperCube> digital_counts;
};

std::vector<ScenarioRender> render_scenarios(
    const SceneSpec& scene, const std::vector<IlluminationScenario>& scenarios,
    const CalibrationConfig& cfg, const NoiseModel& noise = {},
    bool with_digital_counts = false);

} // namespace hypercal

#endif
