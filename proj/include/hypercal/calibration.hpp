#ifndef HYPERCAL_CALIBRATION_HPP
#define HYPERCAL_CALIBRATION_HPP

#include <utility>
#include <vector>

#include "hypercal/cube.hpp"
#include "hypercal/sensor.hpp"

namespace hypercal {

// One monochromator sweep step: the set wavelength, the captured frame,
// and the reference measurements taken alongside it.
struct MonochromatorStep {
    double lambda_nm = 0.0;
    HyperCube frame; // digital counts, typically 1 line x spatial x bands
    double flux_ref_w = 0.0;
    double exposure_ref_s = 0.0;
    double bandwidth_ref_nm = 0.0;

    void validate() const;
};

struct GaussianFit {
    double amplitude_dc = 0.0;
    double center_band = 0.0;  // fractional band index
    double sigma_bands = 0.0;
    double baseline_dc = 0.0;  // stray-light floor, reported
    double residual_rms = 0.0;
    int iterations = 0;
};

struct ResponsivityCurve {
    std::vector<std::pair<double, GaussianFit>> step_fits; // by wavelength
    Spectrum relative; // on the sensor grid, peak exactly 1
};

// Reference-side parameters entering the irradiance-per-count formula.
// Each list holds either one broadcast value or one value per sensor band.
struct ReferenceParams {
    std::vector<double> flux_ref_w;
    std::vector<double> exposure_ref_s;
    std::vector<double> bandwidth_ref_nm;

    static ReferenceParams scalar(double flux_ref_w, double exposure_ref_s,
                                  double bandwidth_ref_nm) {
        return {{flux_ref_w}, {exposure_ref_s}, {bandwidth_ref_nm}};
    }
};

// Least-squares fit of amplitude * exp(-(i - mu)^2 / (2 sigma^2)) + baseline
// to the dark-corrected, spatially averaged cross-band profile of one step.
GaussianFit fit_band_profile(const MonochromatorStep& step,
                             const SensorModel& sensor);

// Per-step responsivity (fit amplitude over reference flux), resampled
// onto the sensor grid and normalized so the peak is exactly 1.
ResponsivityCurve build_responsivity(const std::vector<MonochromatorStep>& steps,
                                     const SensorModel& sensor);

// Irradiance per digital count:
//   E/DC = (flux_ref * t_obs / t_ref)
//          / (gsd^2 * ifov^2 * (B_ref / B_obs) * R_rel)
// With exposure_ratio_inverted the time ratio flips to t_ref / t_obs.
Spectrum irradiance_per_count(const ResponsivityCurve& curve,
                              const ReferenceParams& ref,
                              const SensorModel& sensor,
                              bool exposure_ratio_inverted = false);

} // namespace hypercal

#endif
