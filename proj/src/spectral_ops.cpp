#include "hypercal/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypercal {

Spectrum resample(const Spectrum& src, const WavelengthGrid& target) {
    const auto& wl = src.grid().values();
    if (wl.size() < 2)
        fail(errc::domain_error, "resampling needs a source grid of length >= 2");
    if (target.empty())
        fail(errc::bad_value, "empty target grid");
    if (target.front() < wl.front() || target.back() > wl.back())
        fail(errc::target_out_of_range,
             "target range [" + std::to_string(target.front()) + ", " +
                 std::to_string(target.back()) + "] nm exceeds source [" +
                 std::to_string(wl.front()) + ", " + std::to_string(wl.back()) +
                 "] nm");

    std::vector<double> out(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double t = target[i];
        auto it = std::upper_bound(wl.begin(), wl.end(), t);
        std::size_t hi = static_cast<std::size_t>(it - wl.begin());
        if (hi == 0) {
            out[i] = src[0];
            continue;
        }
        if (hi == wl.size()) {
            out[i] = src[wl.size() - 1];
            continue;
        }
        const std::size_t lo = hi - 1;
        if (t == wl[lo]) {
            out[i] = src[lo];
            continue;
        }
        const double f = (t - wl[lo]) / (wl[hi] - wl[lo]);
        out[i] = src[lo] + f * (src[hi] - src[lo]);
    }
    return Spectrum(WavelengthGrid(target), std::move(out), src.unit(),
                    std::numeric_limits<double>::infinity());
}

namespace {

void require_same_grid(const Spectrum& a, const Spectrum& b) {
    if (a.grid() != b.grid())
        fail(errc::grid_mismatch, "spectra are on different wavelength grids");
}

} // namespace

double spectral_angle(const Spectrum& a, const Spectrum& b) {
    require_same_grid(a, b);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        fail(errc::zero_vector, "spectral angle of a zero spectrum is undefined");
    const double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double rmse(const Spectrum& a, const Spectrum& b) {
    require_same_grid(a, b);
    if (a.unit() != b.unit())
        fail(errc::unit_mismatch, "rmse requires matching units");
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(a.size()));
}

Spectrum box_smooth(const Spectrum& s, int width) {
    const int n = static_cast<int>(s.size());
    if (width < 1 || width % 2 == 0 || width > n)
        fail(errc::bad_width, "box filter width " + std::to_string(width) +
                                  " must be odd and within [1, " +
                                  std::to_string(n) + "]");
    if (width == 1)
        return s;
    const int half = (width - 1) / 2;
    std::vector<double> out(s.size());
    for (int i = 0; i < n; ++i) {
        double delta_sum = 0.0;
        for (int k = -half; k <= half; ++k) {
            const int j = std::clamp(i + k, 0, n - 1);
            delta_sum += s[static_cast<std::size_t>(j)] -
                         s[static_cast<std::size_t>(i)];
        }
        out[static_cast<std::size_t>(i)] =
            s[static_cast<std::size_t>(i)] +
            delta_sum / static_cast<double>(width);
    }
    return Spectrum(s.grid(), std::move(out), s.unit(),
                    std::numeric_limits<double>::infinity());
}

Spectrum roi_mean_spectrum(const HyperCube& cube, const Roi& roi,
                           const std::optional<std::vector<bool>>& keep) {
    roi.check_within(cube);
    if (keep && keep->size() != roi.size())
        fail(errc::size_mismatch, "keep mask length does not match ROI");

    std::vector<PixelCoord> kept;
    kept.reserve(roi.size());
    for (std::size_t i = 0; i < roi.size(); ++i)
        if (!keep || (*keep)[i])
            kept.push_back(roi.pixels()[i]);
    if (kept.empty())
        fail(errc::empty_roi, "ROI '" + roi.name() + "' has no kept pixels");
    std::sort(kept.begin(), kept.end());

    // Mean as reference + mean of deltas, so a uniform ROI returns its
    // pixel value exactly.
    const std::size_t bands = cube.bands();
    const auto ref = cube.pixel(kept.front().row, kept.front().col);
    std::vector<double> delta(bands, 0.0);
    for (const auto& p : kept) {
        const auto px = cube.pixel(p.row, p.col);
        for (std::size_t b = 0; b < bands; ++b)
            delta[b] += px[b] - ref[b];
    }
    const double count = static_cast<double>(kept.size());
    for (std::size_t b = 0; b < bands; ++b)
        delta[b] = ref[b] + delta[b] / count;
    return Spectrum(cube.grid(), std::move(delta), cube.unit(),
                    std::numeric_limits<double>::infinity());
}

} // namespace hypercal
