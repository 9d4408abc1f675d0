#ifndef HYPERCAL_SPECTRUM_HPP
#define HYPERCAL_SPECTRUM_HPP

#include <string>
#include <vector>

#include "hypercal/error.hpp"

namespace hypercal {

// Physical unit carried by a Spectrum or HyperCube.
enum class Unit {
    digital_count,
    radiance,     // W / (m^2 sr nm)
    irradiance,   // W / (m^2 nm); also used for irradiance-per-count curves
    reflectance,  // unitless
    responsivity, // relative, peak-normalized
    flux,         // W
};

const char* unit_tag(Unit unit);
Unit unit_from_tag(const std::string& tag);

struct PhysicalConstants {
    static constexpr double planck_js = 6.62607015e-34;
    static constexpr double light_speed_m_s = 299792458.0;
};

// Strictly increasing band centers in nanometres.
class WavelengthGrid {
public:
    WavelengthGrid() = default;
    explicit WavelengthGrid(std::vector<double> wavelengths_nm);

    // Evenly spaced grid with exact endpoints.
    static WavelengthGrid linspace(double first_nm, double last_nm, std::size_t bands);

    std::size_t size() const { return wavelengths_.size(); }
    bool empty() const { return wavelengths_.empty(); }
    double operator[](std::size_t i) const { return wavelengths_[i]; }
    double front() const { return wavelengths_.front(); }
    double back() const { return wavelengths_.back(); }
    const std::vector<double>& values() const { return wavelengths_; }

    bool operator==(const WavelengthGrid& other) const = default;

private:
    std::vector<double> wavelengths_;
};

// One 1-D spectral curve: a grid, one value per band, and a unit tag.
// Immutable after construction; construction validates the unit's value
// range (reflectance must stay within [0, clip_max]).
class Spectrum {
public:
    Spectrum() = default;
    Spectrum(WavelengthGrid grid, std::vector<double> values, Unit unit,
             double reflectance_clip_max = 1.5);

    static Spectrum constant(const WavelengthGrid& grid, double value, Unit unit,
                             double reflectance_clip_max = 1.5);

    const WavelengthGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    Unit unit() const { return unit_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }

    // Arithmetic mean over all bands ("broadband" brightness).
    double mean() const;
    double max_value() const;

    bool operator==(const Spectrum& other) const = default;

private:
    WavelengthGrid grid_;
    std::vector<double> values_;
    Unit unit_ = Unit::digital_count;
};

} // namespace hypercal

#endif
