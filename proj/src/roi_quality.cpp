#include "hypercal/roi_quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypercal/spectral_ops.hpp"

namespace hypercal {

std::vector<bool> RoiReport::keep_mask() const {
    std::vector<bool> keep(flags.size());
    for (std::size_t i = 0; i < flags.size(); ++i)
        keep[i] = !flags[i].any();
    return keep;
}

RoiQualitySummary RoiReport::summary() const {
    RoiQualitySummary s;
    s.total = flags.size();
    s.kept_fraction = kept_fraction;
    for (const auto& f : flags) {
        s.saturated += f.saturated;
        s.glint += f.glint;
        s.shadow += f.shadow;
        s.adjacency += f.adjacency;
    }
    return s;
}

std::vector<bool> detect_saturation(const HyperCube& cube,
                                    const SensorModel& sensor,
                                    double sat_frac) {
    if (cube.unit() != Unit::digital_count)
        fail(errc::unit_mismatch, "saturation screening expects a DC cube");
    const double threshold = sat_frac * sensor.max_dc();
    const std::size_t bands = cube.bands();
    std::vector<bool> saturated(cube.pixel_count(), false);
    const auto& data = cube.data();
    for (std::size_t p = 0; p < saturated.size(); ++p) {
        const std::size_t base = p * bands;
        for (std::size_t b = 0; b < bands; ++b) {
            if (data[base + b] >= threshold) {
                saturated[p] = true;
                break;
            }
        }
    }
    return saturated;
}

bool detect_glint(const Spectrum& pixel, const Spectrum& downwelling,
                  const Spectrum& roi_median, const QualityThresholds& t) {
    if (pixel.grid() != downwelling.grid() || pixel.grid() != roi_median.grid())
        fail(errc::grid_mismatch, "glint detection requires one shared grid");
    const double median_mean = roi_median.mean();
    const bool bright =
        median_mean > 0.0 && pixel.mean() >= t.glint_bright_ratio * median_mean;
    if (!bright)
        return false;
    return spectral_angle(pixel, downwelling) < t.glint_angle_max;
}

bool detect_shadow(const Spectrum& pixel, const Spectrum& roi_median,
                   const QualityThresholds& t) {
    if (pixel.grid() != roi_median.grid())
        fail(errc::grid_mismatch, "shadow detection requires one shared grid");
    const double median_mean = roi_median.mean();
    if (median_mean <= 0.0)
        return false;
    return pixel.mean() <= t.shadow_ratio * median_mean;
}

bool detect_adjacency(const Spectrum& pixel, const Spectrum& roi_median,
                      const QualityThresholds& t) {
    if (pixel.grid() != roi_median.grid())
        fail(errc::grid_mismatch, "adjacency detection requires one shared grid");
    const double median_mean = roi_median.mean();
    if (median_mean <= 0.0)
        return false;
    // "ordinary brightness": neither glint-bright nor shadow-dark
    const double ratio = pixel.mean() / median_mean;
    if (ratio >= t.glint_bright_ratio || ratio <= t.shadow_ratio)
        return false;
    return spectral_angle(pixel, roi_median) > t.adj_angle_min;
}

RoiReport score_roi(const HyperCube& cube, const Roi& roi,
                    const Spectrum& downwelling, const SensorModel& sensor,
                    const QualityThresholds& thresholds) {
    roi.check_within(cube);
    if (roi.empty())
        fail(errc::empty_roi, "ROI '" + roi.name() + "' is empty");
    if (downwelling.grid() != cube.grid())
        fail(errc::grid_mismatch,
             "downwelling spectrum is not on the cube grid");

    const std::size_t n = roi.size();
    const std::size_t bands = cube.bands();

    // Per-band median anchors every ratio/angle test; it stays clean as
    // long as fewer than half the ROI pixels are corrupted.
    std::vector<double> median(bands);
    std::vector<double> column(n);
    for (std::size_t b = 0; b < bands; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = roi.pixels()[i];
            column[i] = cube.at(p.row, p.col, b);
        }
        const std::size_t mid = n / 2;
        std::nth_element(column.begin(), column.begin() + mid, column.end());
        double hi = column[mid];
        if (n % 2 == 1) {
            median[b] = hi;
        } else {
            std::nth_element(column.begin(), column.begin() + mid - 1,
                             column.begin() + mid);
            median[b] = 0.5 * (column[mid - 1] + hi);
        }
    }
    Spectrum median_spectrum(cube.grid(), median, cube.unit(),
                             std::numeric_limits<double>::infinity());
    const double median_mean = median_spectrum.mean();

    RoiReport report;
    report.roi_name = roi.name();
    report.pixels = roi.pixels();
    report.flags.resize(n);
    report.median_spectrum = median_spectrum;
    if (median_mean <= 0.0)
        report.notes.push_back(
            "ROI median spectrum is zero; brightness screening disabled");

    const bool dc_cube = cube.unit() == Unit::digital_count;
    const double sat_threshold = thresholds.sat_frac * sensor.max_dc();
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = roi.pixels()[i];
        const auto px = cube.pixel(p.row, p.col);
        PixelFlags& f = report.flags[i];

        if (dc_cube) {
            for (std::size_t b = 0; b < bands; ++b) {
                if (px[b] >= sat_threshold) {
                    f.saturated = true;
                    break;
                }
            }
        }
        if (f.saturated)
            f.glint = true; // saturation is glint evidence

        double mean = 0.0, norm = 0.0;
        for (std::size_t b = 0; b < bands; ++b) {
            mean += px[b];
            norm += px[b] * px[b];
        }
        mean /= static_cast<double>(bands);
        const bool zero_pixel = norm == 0.0;

        if (median_mean > 0.0) {
            const double ratio = mean / median_mean;
            if (!zero_pixel && !f.glint &&
                ratio >= thresholds.glint_bright_ratio) {
                Spectrum ps = cube.pixel_spectrum(p.row, p.col);
                if (spectral_angle(ps, downwelling) < thresholds.glint_angle_max)
                    f.glint = true;
            }
            if (ratio <= thresholds.shadow_ratio)
                f.shadow = true;
            if (!zero_pixel && !f.glint && !f.shadow &&
                ratio < thresholds.glint_bright_ratio &&
                ratio > thresholds.shadow_ratio) {
                Spectrum ps = cube.pixel_spectrum(p.row, p.col);
                if (spectral_angle(ps, median_spectrum) > thresholds.adj_angle_min)
                    f.adjacency = true;
            }
        }
        if (!f.any())
            ++kept;
    }
    report.kept_fraction =
        static_cast<double>(kept) / static_cast<double>(n);
    if (kept == 0)
        report.notes.push_back("no pixels kept: every pixel is flagged");
    return report;
}

} // namespace hypercal
