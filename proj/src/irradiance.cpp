#include "hypercal/irradiance.hpp"

namespace hypercal {

IrradianceSeries::IrradianceSeries(std::vector<Sample> samples)
    : samples_(std::move(samples)) {
    if (samples_.empty())
        fail(errc::bad_value, "irradiance series must not be empty");
    const WavelengthGrid& g = samples_.front().second.grid();
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (i > 0 && samples_[i].first <= samples_[i - 1].first)
            fail(errc::non_monotone_time,
                 "timestamps must be strictly increasing (sample " +
                     std::to_string(i) + ")");
        if (samples_[i].second.unit() != Unit::irradiance)
            fail(errc::unit_mismatch,
                 "irradiance series sample " + std::to_string(i) +
                     " is not in irradiance units");
        if (samples_[i].second.grid() != g)
            fail(errc::grid_mismatch,
                 "irradiance series sample " + std::to_string(i) +
                     " is on a different grid");
    }
}

} // namespace hypercal
