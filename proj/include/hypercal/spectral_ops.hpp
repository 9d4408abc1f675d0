#ifndef HYPERCAL_SPECTRAL_OPS_HPP
#define HYPERCAL_SPECTRAL_OPS_HPP

#include <optional>
#include <vector>

#include "hypercal/cube.hpp"
#include "hypercal/spectrum.hpp"

namespace hypercal {

// Piecewise-linear resampling onto a target grid. Fails with
// TargetOutOfRange rather than extrapolate.
Spectrum resample(const Spectrum& src, const WavelengthGrid& target);

// arccos of the normalized inner product, clamped into [0, pi].
double spectral_angle(const Spectrum& a, const Spectrum& b);

double rmse(const Spectrum& a, const Spectrum& b);

// Moving average of odd width with edge replication. Computed as
// s[i] + mean(window deltas), so constant spectra pass through exactly.
Spectrum box_smooth(const Spectrum& s, int width);

// Per-band arithmetic mean over the ROI's kept pixels. Pixels are
// accumulated in canonical (row, col) order, so the result does not
// depend on the order the ROI lists them.
Spectrum roi_mean_spectrum(const HyperCube& cube, const Roi& roi,
                           const std::optional<std::vector<bool>>& keep = {});

} // namespace hypercal

#endif
