#ifndef HYPERCAL_CUBE_HPP
#define HYPERCAL_CUBE_HPP

#include <span>
#include <string>
#include <vector>

#include "hypercal/spectrum.hpp"

namespace hypercal {

struct PixelCoord {
    int row = 0;
    int col = 0;
    bool operator==(const PixelCoord&) const = default;
    auto operator<=>(const PixelCoord&) const = default;
};

// rows x cols x bands raster, band-interleaved-by-pixel in memory so a
// pixel's spectrum is contiguous. Immutable after construction.
class HyperCube {
public:
    HyperCube() = default;
    HyperCube(int rows, int cols, WavelengthGrid grid, Unit unit,
              std::vector<double> data, double reflectance_clip_max = 1.5);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t bands() const { return grid_.size(); }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
    }
    const WavelengthGrid& grid() const { return grid_; }
    Unit unit() const { return unit_; }
    const std::vector<double>& data() const { return data_; }

    double at(int row, int col, std::size_t band) const {
        return data_[index(row, col, band)];
    }
    std::span<const double> pixel(int row, int col) const {
        return {data_.data() + index(row, col, 0), bands()};
    }
    std::size_t index(int row, int col, std::size_t band) const {
        return (static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
                static_cast<std::size_t>(col)) *
                   bands() +
               band;
    }
    Spectrum pixel_spectrum(int row, int col) const;
    bool in_bounds(PixelCoord p) const {
        return p.row >= 0 && p.row < rows_ && p.col >= 0 && p.col < cols_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    WavelengthGrid grid_;
    Unit unit_ = Unit::digital_count;
    std::vector<double> data_;
};

// A named set of pixels, built from an inclusive rectangle or an integer
// polygon (lattice points inside or on the boundary, even-odd rule).
class Roi {
public:
    static Roi rect(std::string name, int row0, int col0, int row1, int col1);
    static Roi polygon(std::string name, const std::vector<PixelCoord>& vertices);

    const std::string& name() const { return name_; }
    const std::vector<PixelCoord>& pixels() const { return pixels_; }
    std::size_t size() const { return pixels_.size(); }
    bool empty() const { return pixels_.empty(); }

    // Textual form using the ROI-file line syntax.
    const std::string& definition() const { return definition_; }

    void check_within(const HyperCube& cube) const;

private:
    std::string name_;
    std::string definition_;
    std::vector<PixelCoord> pixels_;
};

} // namespace hypercal

#endif
