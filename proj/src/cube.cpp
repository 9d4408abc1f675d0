#include "hypercal/cube.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypercal {

HyperCube::HyperCube(int rows, int cols, WavelengthGrid grid, Unit unit,
                     std::vector<double> data, double reflectance_clip_max)
    : rows_(rows), cols_(cols), grid_(std::move(grid)), unit_(unit),
      data_(std::move(data)) {
    if (rows_ <= 0 || cols_ <= 0)
        fail(errc::bad_value, "cube dimensions must be positive");
    if (grid_.size() < 1)
        fail(errc::bad_value, "cube needs at least one band");
    const std::size_t expected = pixel_count() * bands();
    if (data_.size() != expected)
        fail(errc::size_mismatch,
             "cube data has " + std::to_string(data_.size()) +
                 " samples, expected " + std::to_string(expected));
    for (std::size_t i = 0; i < data_.size(); ++i) {
        const double v = data_[i];
        if (!std::isfinite(v))
            fail(errc::bad_value,
                 "non-finite sample at index " + std::to_string(i));
        if (unit_ == Unit::digital_count && (v < 0.0 || v > 65535.0))
            fail(errc::bad_value,
                 "digital count " + std::to_string(v) + " outside [0, 65535]");
        if (unit_ == Unit::reflectance &&
            (v < 0.0 || v > reflectance_clip_max))
            fail(errc::bad_value,
                 "reflectance sample " + std::to_string(v) + " outside [0, " +
                     std::to_string(reflectance_clip_max) + "]");
    }
}

Spectrum HyperCube::pixel_spectrum(int row, int col) const {
    const auto view = pixel(row, col);
    return Spectrum(grid_, std::vector<double>(view.begin(), view.end()), unit_,
                    std::numeric_limits<double>::infinity());
}

namespace {

// Even-odd inside test with boundary points counted as inside.
bool point_in_polygon(double r, double c, const std::vector<PixelCoord>& verts) {
    const std::size_t n = verts.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double ri = verts[i].row, ci = verts[i].col;
        const double rj = verts[j].row, cj = verts[j].col;
        // on-segment check
        const double cross = (c - ci) * (rj - ri) - (r - ri) * (cj - ci);
        if (cross == 0.0 && c >= std::min(ci, cj) && c <= std::max(ci, cj) &&
            r >= std::min(ri, rj) && r <= std::max(ri, rj))
            return true;
        if ((ri > r) != (rj > r)) {
            const double c_at = ci + (r - ri) / (rj - ri) * (cj - ci);
            if (c < c_at)
                inside = !inside;
        }
    }
    return inside;
}

} // namespace

Roi Roi::rect(std::string name, int row0, int col0, int row1, int col1) {
    if (row1 < row0)
        std::swap(row0, row1);
    if (col1 < col0)
        std::swap(col0, col1);
    Roi roi;
    roi.name_ = std::move(name);
    roi.definition_ = roi.name_ + ", " + std::to_string(row0) + ", " +
                      std::to_string(col0) + ", " + std::to_string(row1) +
                      ", " + std::to_string(col1);
    roi.pixels_.reserve(static_cast<std::size_t>(row1 - row0 + 1) *
                        static_cast<std::size_t>(col1 - col0 + 1));
    for (int r = row0; r <= row1; ++r)
        for (int c = col0; c <= col1; ++c)
            roi.pixels_.push_back({r, c});
    return roi;
}

Roi Roi::polygon(std::string name, const std::vector<PixelCoord>& vertices) {
    if (vertices.size() < 3)
        fail(errc::bad_value, "polygon ROI needs at least 3 vertices");
    Roi roi;
    roi.name_ = std::move(name);
    roi.definition_ = roi.name_ + ", poly";
    for (const auto& v : vertices)
        roi.definition_ +=
            ", " + std::to_string(v.row) + ", " + std::to_string(v.col);

    int rmin = vertices[0].row, rmax = vertices[0].row;
    int cmin = vertices[0].col, cmax = vertices[0].col;
    for (const auto& v : vertices) {
        rmin = std::min(rmin, v.row);
        rmax = std::max(rmax, v.row);
        cmin = std::min(cmin, v.col);
        cmax = std::max(cmax, v.col);
    }
    for (int r = rmin; r <= rmax; ++r)
        for (int c = cmin; c <= cmax; ++c)
            if (point_in_polygon(r, c, vertices))
                roi.pixels_.push_back({r, c});
    if (roi.pixels_.empty())
        fail(errc::empty_roi, "polygon ROI '" + roi.name_ +
                                  "' contains no lattice points");
    return roi;
}

void Roi::check_within(const HyperCube& cube) const {
    for (const auto& p : pixels_)
        if (!cube.in_bounds(p))
            fail(errc::out_of_bounds,
                 "ROI '" + name_ + "' pixel (" + std::to_string(p.row) + ", " +
                     std::to_string(p.col) + ") outside cube " +
                     std::to_string(cube.rows()) + "x" +
                     std::to_string(cube.cols()));
}

} // namespace hypercal
