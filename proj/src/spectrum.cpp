#include "hypercal/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace hypercal {

const char* unit_tag(Unit unit) {
    switch (unit) {
    case Unit::digital_count: return "DigitalCount";
    case Unit::radiance: return "Radiance_W_m2_sr_nm";
    case Unit::irradiance: return "Irradiance_W_m2_nm";
    case Unit::reflectance: return "Reflectance_unitless";
    case Unit::responsivity: return "Responsivity_relative";
    case Unit::flux: return "Flux_W";
    }
    return "DigitalCount";
}

Unit unit_from_tag(const std::string& tag) {
    if (tag == "DigitalCount") return Unit::digital_count;
    if (tag == "Radiance_W_m2_sr_nm") return Unit::radiance;
    if (tag == "Irradiance_W_m2_nm") return Unit::irradiance;
    if (tag == "Reflectance_unitless") return Unit::reflectance;
    if (tag == "Responsivity_relative") return Unit::responsivity;
    if (tag == "Flux_W") return Unit::flux;
    fail(errc::parse_error, "unknown unit tag '" + tag + "'");
}

WavelengthGrid::WavelengthGrid(std::vector<double> wavelengths_nm)
    : wavelengths_(std::move(wavelengths_nm)) {
    for (std::size_t i = 0; i < wavelengths_.size(); ++i) {
        const double w = wavelengths_[i];
        if (!std::isfinite(w) || w <= 0.0)
            fail(errc::bad_value, "wavelength " + std::to_string(w) +
                                      " at band " + std::to_string(i) +
                                      " is not finite and positive");
        if (i > 0 && w <= wavelengths_[i - 1])
            fail(errc::non_monotone_wavelength,
                 "wavelengths must be strictly increasing (band " +
                     std::to_string(i) + ")");
    }
}

WavelengthGrid WavelengthGrid::linspace(double first_nm, double last_nm,
                                        std::size_t bands) {
    if (bands < 2)
        fail(errc::bad_value, "linspace grid needs at least 2 bands");
    std::vector<double> wl(bands);
    const double span = last_nm - first_nm;
    for (std::size_t i = 0; i < bands; ++i)
        wl[i] = first_nm + span * static_cast<double>(i) /
                               static_cast<double>(bands - 1);
    wl.back() = last_nm; // exact endpoint
    return WavelengthGrid(std::move(wl));
}

Spectrum::Spectrum(WavelengthGrid grid, std::vector<double> values, Unit unit,
                   double reflectance_clip_max)
    : grid_(std::move(grid)), values_(std::move(values)), unit_(unit) {
    if (grid_.size() != values_.size())
        fail(errc::size_mismatch,
             "spectrum has " + std::to_string(values_.size()) +
                 " values for " + std::to_string(grid_.size()) + " bands");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!std::isfinite(v))
            fail(errc::bad_value,
                 "non-finite value at band " + std::to_string(i));
        if (unit_ == Unit::reflectance &&
            (v < 0.0 || v > reflectance_clip_max))
            fail(errc::bad_value,
                 "reflectance " + std::to_string(v) + " at band " +
                     std::to_string(i) + " outside [0, " +
                     std::to_string(reflectance_clip_max) + "]");
        if (unit_ == Unit::digital_count && (v < 0.0 || v > 65535.0))
            fail(errc::bad_value,
                 "digital count " + std::to_string(v) + " at band " +
                     std::to_string(i) + " outside [0, 65535]");
    }
}

Spectrum Spectrum::constant(const WavelengthGrid& grid, double value, Unit unit,
                            double reflectance_clip_max) {
    return Spectrum(grid, std::vector<double>(grid.size(), value), unit,
                    reflectance_clip_max);
}

double Spectrum::mean() const {
    if (values_.empty())
        return 0.0;
    double sum = 0.0;
    for (double v : values_)
        sum += v;
    return sum / static_cast<double>(values_.size());
}

double Spectrum::max_value() const {
    return values_.empty() ? 0.0
                           : *std::max_element(values_.begin(), values_.end());
}

} // namespace hypercal
