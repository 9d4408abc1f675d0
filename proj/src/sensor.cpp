#include "hypercal/sensor.hpp"

#include <cmath>

namespace hypercal {

SensorModel::SensorModel(WavelengthGrid grid, std::vector<double> bandwidths_nm,
                         int bit_depth, double exposure_s, double ifov_rad,
                         double gsd_m, Spectrum dark_frame,
                         std::optional<Spectrum> responsivity)
    : grid_(std::move(grid)), bandwidths_nm_(std::move(bandwidths_nm)),
      bit_depth_(bit_depth), exposure_s_(exposure_s), ifov_rad_(ifov_rad),
      gsd_m_(gsd_m), dark_frame_(std::move(dark_frame)),
      responsivity_(std::move(responsivity)) {
    if (grid_.size() < 2)
        fail(errc::bad_value, "sensor grid needs at least 2 bands");
    if (bandwidths_nm_.size() != grid_.size())
        fail(errc::size_mismatch, "bandwidth list length does not match grid");
    for (double b : bandwidths_nm_)
        if (!(b > 0.0) || !std::isfinite(b))
            fail(errc::bad_value, "bandwidths must be positive");
    if (bit_depth_ < 8 || bit_depth_ > 16)
        fail(errc::bad_value, "bit depth must be in [8, 16]");
    max_dc_ = std::ldexp(1.0, bit_depth_) - 1.0;
    if (!(exposure_s_ > 0.0))
        fail(errc::bad_value, "exposure time must be positive");
    if (!(ifov_rad_ > 0.0))
        fail(errc::bad_value, "IFOV must be positive");
    if (!(gsd_m_ > 0.0))
        fail(errc::bad_value, "GSD must be positive");
    if (dark_frame_.unit() != Unit::digital_count)
        fail(errc::unit_mismatch, "dark frame must be in digital counts");
    if (dark_frame_.grid() != grid_)
        fail(errc::grid_mismatch, "dark frame grid does not match sensor grid");
    if (responsivity_) {
        if (responsivity_->grid() != grid_)
            fail(errc::grid_mismatch,
                 "responsivity grid does not match sensor grid");
        if (responsivity_->unit() != Unit::responsivity)
            fail(errc::unit_mismatch, "responsivity unit must be relative");
        double max = 0.0;
        for (double v : responsivity_->values()) {
            if (!(v > 0.0) || v > 1.0)
                fail(errc::bad_value,
                     "relative responsivity values must lie in (0, 1]");
            max = std::max(max, v);
        }
        if (max != 1.0)
            fail(errc::bad_value, "relative responsivity peak must equal 1");
    }
}

SensorModel SensorModel::with_responsivity(Spectrum responsivity) const {
    return SensorModel(grid_, bandwidths_nm_, bit_depth_, exposure_s_,
                       ifov_rad_, gsd_m_, dark_frame_, std::move(responsivity));
}

} // namespace hypercal
