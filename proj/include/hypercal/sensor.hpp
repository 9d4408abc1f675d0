#ifndef HYPERCAL_SENSOR_HPP
#define HYPERCAL_SENSOR_HPP

#include <optional>
#include <vector>

#include "hypercal/spectrum.hpp"

namespace hypercal {

// Static description of the imaging system: band layout, radiometric
// acquisition parameters, dark frame, and (once calibrated) the relative
// responsivity curve.
class SensorModel {
public:
    SensorModel(WavelengthGrid grid, std::vector<double> bandwidths_nm,
                int bit_depth, double exposure_s, double ifov_rad, double gsd_m,
                Spectrum dark_frame,
                std::optional<Spectrum> responsivity = std::nullopt);

    const WavelengthGrid& grid() const { return grid_; }
    const std::vector<double>& bandwidths_nm() const { return bandwidths_nm_; }
    int bit_depth() const { return bit_depth_; }
    double max_dc() const { return max_dc_; }
    double exposure_s() const { return exposure_s_; }
    double ifov_rad() const { return ifov_rad_; }
    double gsd_m() const { return gsd_m_; }
    const Spectrum& dark_frame() const { return dark_frame_; }
    const std::optional<Spectrum>& responsivity() const { return responsivity_; }
    std::size_t bands() const { return grid_.size(); }

    SensorModel with_responsivity(Spectrum responsivity) const;

private:
    WavelengthGrid grid_;
    std::vector<double> bandwidths_nm_;
    int bit_depth_ = 12;
    double max_dc_ = 4095.0;
    double exposure_s_ = 0.0;
    double ifov_rad_ = 0.0;
    double gsd_m_ = 0.0;
    Spectrum dark_frame_;
    std::optional<Spectrum> responsivity_;
};

} // namespace hypercal

#endif
