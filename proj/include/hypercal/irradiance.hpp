#ifndef HYPERCAL_IRRADIANCE_HPP
#define HYPERCAL_IRRADIANCE_HPP

#include <utility>
#include <vector>

#include "hypercal/spectrum.hpp"

namespace hypercal {

// Time-ordered downwelling-irradiance log. All member spectra share one
// grid; timestamps strictly increase.
class IrradianceSeries {
public:
    using Sample = std::pair<double, Spectrum>;

    IrradianceSeries() = default;
    explicit IrradianceSeries(std::vector<Sample> samples);

    const std::vector<Sample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const WavelengthGrid& grid() const { return samples_.front().second.grid(); }
    double first_time() const { return samples_.front().first; }
    double last_time() const { return samples_.back().first; }

private:
    std::vector<Sample> samples_;
};

} // namespace hypercal

#endif
