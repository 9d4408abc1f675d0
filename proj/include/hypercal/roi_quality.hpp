#ifndef HYPERCAL_ROI_QUALITY_HPP
#define HYPERCAL_ROI_QUALITY_HPP

#include <string>
#include <vector>

#include "hypercal/cube.hpp"
#include "hypercal/radcal.hpp"
#include "hypercal/sensor.hpp"

namespace hypercal {

// Screening thresholds. The defaults encode qualitative field guidance
// (glint an order of magnitude brighter and source-shaped, shadows well
// below the ROI median) and are meant to be tuned per collect.
struct QualityThresholds {
    double sat_frac = 0.98;        // DC fraction of max_dc counting as saturated
    double glint_angle_max = 0.10; // rad, shape match to the downwelling curve
    double glint_bright_ratio = 3.0;
    double shadow_ratio = 0.3;
    double adj_angle_min = 0.05;   // rad, shape deviation from the ROI median
};

struct PixelFlags {
    bool saturated = false;
    bool glint = false;
    bool shadow = false;
    bool adjacency = false;
    bool any() const { return saturated || glint || shadow || adjacency; }
};

struct RoiReport {
    std::string roi_name;
    std::vector<PixelCoord> pixels;
    std::vector<PixelFlags> flags;
    double kept_fraction = 1.0;
    Spectrum median_spectrum;
    std::vector<std::string> notes;

    std::vector<bool> keep_mask() const;
    RoiQualitySummary summary() const;
};

// True per pixel iff any band reaches sat_frac * max_dc.
std::vector<bool> detect_saturation(const HyperCube& cube,
                                    const SensorModel& sensor,
                                    double sat_frac = 0.98);

// Source-shaped and much brighter than the ROI: angle to the downwelling
// curve below glint_angle_max AND broadband mean at least
// glint_bright_ratio times the ROI median's.
bool detect_glint(const Spectrum& pixel, const Spectrum& downwelling,
                  const Spectrum& roi_median,
                  const QualityThresholds& thresholds = {});

// Broadband mean at or below shadow_ratio times the ROI median's.
bool detect_shadow(const Spectrum& pixel, const Spectrum& roi_median,
                   const QualityThresholds& thresholds = {});

// Shape deviation from the ROI median at ordinary brightness (secondary
// reflections tinge the spectrum without the glint/shadow signatures).
bool detect_adjacency(const Spectrum& pixel, const Spectrum& roi_median,
                      const QualityThresholds& thresholds = {});

// Runs all four detectors over the ROI against the per-band median
// spectrum. The cube may be in digital counts (saturation active) or
// radiance (saturation skipped).
RoiReport score_roi(const HyperCube& cube, const Roi& roi,
                    const Spectrum& downwelling, const SensorModel& sensor,
                    const QualityThresholds& thresholds = {});

} // namespace hypercal

#endif
