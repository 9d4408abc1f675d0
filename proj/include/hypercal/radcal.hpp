#ifndef HYPERCAL_RADCAL_HPP
#define HYPERCAL_RADCAL_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypercal/cube.hpp"
#include "hypercal/irradiance.hpp"
#include "hypercal/sensor.hpp"

namespace hypercal {

// Everything the DC -> radiance -> reflectance chain needs, fixed for
// the duration of a run.
struct CalibrationConfig {
    SensorModel sensor;
    std::optional<Spectrum> e_per_dc; // irradiance per count, sensor grid
    double incidence_cos = 1.0;       // cos(theta), (0, 1]
    bool exposure_ratio_inverted = false;
    bool eq6_as_printed = false; // debug: reflectance = L * E / pi
    int smoothing_width = 5;
    double clip_max = 1.5;
    double irradiance_window_s = 4.0;

    void validate() const;
};

struct RoiQualitySummary {
    double kept_fraction = 1.0;
    std::size_t total = 0;
    std::size_t saturated = 0;
    std::size_t glint = 0;
    std::size_t shadow = 0;
    std::size_t adjacency = 0;
    bool operator==(const RoiQualitySummary&) const = default;
};

// Exported paint signature: the smoothed mean ROI reflectance plus the
// provenance the library format stores alongside it.
struct SignatureRecord {
    Spectrum reflectance;
    std::string roi_definition;
    double timestamp_s = 0.0;
    std::vector<std::pair<std::string, std::string>> metadata; // ordered
    std::optional<RoiQualitySummary> quality;

    const std::string* find_metadata(const std::string& key) const;
    bool operator==(const SignatureRecord&) const = default;
};

// Per-pixel, per-band dark subtraction, clamped at zero.
HyperCube dark_correct(const HyperCube& cube, const Spectrum& dark);

// L = DC * (E/DC) * (1/pi); input must already be dark-corrected.
HyperCube dc_to_radiance(const HyperCube& cube, const CalibrationConfig& cfg);

// rho = pi * L / (E_downwell * cos(theta)), clipped into [0, clip_max].
// With eq6_as_printed the alternative form rho = L * E / pi is used.
Spectrum radiance_to_reflectance(const Spectrum& radiance,
                                 const Spectrum& downwelling,
                                 const CalibrationConfig& cfg);
HyperCube radiance_to_reflectance(const HyperCube& cube,
                                  const Spectrum& downwelling,
                                  const CalibrationConfig& cfg);

// Downwelling spectrum at time t: linear interpolation between the
// bracketing log samples, clamping to the nearest endpoint within
// window_s seconds of the log's ends.
Spectrum match_irradiance(const IrradianceSeries& series, double t,
                          double window_s = 4.0);

SignatureRecord extract_signature(
    const HyperCube& reflectance_cube, const Roi& roi,
    const std::optional<std::vector<bool>>& keep,
    std::vector<std::pair<std::string, std::string>> metadata,
    const CalibrationConfig& cfg, double timestamp_s = 0.0,
    std::optional<RoiQualitySummary> quality = std::nullopt);

} // namespace hypercal

#endif
