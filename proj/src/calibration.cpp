#include "hypercal/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>

#include "hypercal/parallel.hpp"
#include "hypercal/spectral_ops.hpp"

namespace hypercal {

void MonochromatorStep::validate() const {
    if (!(lambda_nm > 0.0))
        fail(errc::bad_value, "step wavelength must be positive");
    if (!(flux_ref_w > 0.0))
        fail(errc::bad_value, "reference flux must be positive");
    if (!(exposure_ref_s > 0.0))
        fail(errc::bad_value, "reference exposure must be positive");
    if (!(bandwidth_ref_nm > 0.0))
        fail(errc::bad_value, "reference bandwidth must be positive");
    if (frame.unit() != Unit::digital_count)
        fail(errc::unit_mismatch, "sweep frame must be in digital counts");
}

namespace {

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (n % 2 == 1)
        return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    return 0.5 * (v[mid - 1] + hi);
}

// Spatially averaged cross-band profile. Spatial pixels whose peak falls
// below half the frame's global peak are treated as unilluminated
// (vignetted slit ends) and left out of the average.
std::vector<double> averaged_profile(const HyperCube& frame) {
    const std::size_t bands = frame.bands();
    double global_peak = 0.0;
    for (double v : frame.data())
        global_peak = std::max(global_peak, v);

    std::vector<double> sum(bands, 0.0);
    std::size_t used = 0;
    for (int r = 0; r < frame.rows(); ++r) {
        for (int c = 0; c < frame.cols(); ++c) {
            const auto px = frame.pixel(r, c);
            const double peak = *std::max_element(px.begin(), px.end());
            if (global_peak > 0.0 && peak < 0.5 * global_peak)
                continue;
            ++used;
            for (std::size_t b = 0; b < bands; ++b)
                sum[b] += px[b];
        }
    }
    if (used == 0)
        fail(errc::no_peak, "sweep frame contains no illuminated pixels");
    for (double& v : sum)
        v /= static_cast<double>(used);
    return sum;
}

struct ProfileModel {
    // residuals and Jacobian of A*exp(-(i-mu)^2/(2 s^2)) + c against y
    static double eval(const std::array<double, 4>& p, double x) {
        const double d = (x - p[1]) / p[2];
        return p[0] * std::exp(-0.5 * d * d) + p[3];
    }
};

bool solve4(std::array<std::array<double, 4>, 4>& m, std::array<double, 4>& rhs) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[pivot][col]))
                pivot = r;
        if (m[pivot][col] == 0.0)
            return false;
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (int r = col + 1; r < 4; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int k = col; k < 4; ++k)
                m[r][k] -= f * m[col][k];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int col = 3; col >= 0; --col) {
        double v = rhs[col];
        for (int k = col + 1; k < 4; ++k)
            v -= m[col][k] * rhs[k];
        rhs[col] = v / m[col][col];
    }
    return true;
}

double sum_squared_residuals(const std::array<double, 4>& p,
                             const std::vector<double>& y) {
    double ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = ProfileModel::eval(p, static_cast<double>(i)) - y[i];
        ss += r * r;
    }
    return ss;
}

// Initial sigma from the half-maximum crossings around the peak. At the
// grid edge only one crossing may exist; its one-sided half width still
// gives a usable estimate.
double sigma_from_fwhm(const std::vector<double>& y, std::size_t peak_idx,
                       double amplitude, double baseline) {
    const double half = baseline + 0.5 * amplitude;
    const int n = static_cast<int>(y.size());
    const int p = static_cast<int>(peak_idx);
    double left = -1.0, right = -1.0;
    for (int i = p; i > 0; --i) {
        if (y[static_cast<std::size_t>(i - 1)] <= half &&
            y[static_cast<std::size_t>(i)] > half) {
            const double y0 = y[static_cast<std::size_t>(i - 1)];
            const double y1 = y[static_cast<std::size_t>(i)];
            left = (i - 1) + (half - y0) / (y1 - y0);
            break;
        }
    }
    for (int i = p; i < n - 1; ++i) {
        if (y[static_cast<std::size_t>(i + 1)] <= half &&
            y[static_cast<std::size_t>(i)] > half) {
            const double y0 = y[static_cast<std::size_t>(i)];
            const double y1 = y[static_cast<std::size_t>(i + 1)];
            right = i + (y0 - half) / (y0 - y1);
            break;
        }
    }
    const double hwhm_to_sigma = 2.0 / 2.3548200450309493;
    if (left >= 0.0 && right > left)
        return (right - left) / 2.3548200450309493; // FWHM -> sigma
    if (right >= 0.0)
        return (right - p) * hwhm_to_sigma;
    if (left >= 0.0)
        return (p - left) * hwhm_to_sigma;
    return 1.0;
}

} // namespace

GaussianFit fit_band_profile(const MonochromatorStep& step,
                             const SensorModel& sensor) {
    step.validate();
    if (step.frame.grid() != sensor.grid())
        fail(errc::grid_mismatch, "sweep frame grid does not match sensor");

    const double max_dc = sensor.max_dc();
    for (double v : step.frame.data())
        if (v >= max_dc)
            fail(errc::saturated_profile,
                 "sweep frame at " + std::to_string(step.lambda_nm) +
                     " nm contains saturated samples");

    std::vector<double> y = averaged_profile(step.frame);
    const auto& dark = sensor.dark_frame();
    for (std::size_t b = 0; b < y.size(); ++b)
        y[b] -= dark[b];

    const double med = median_of(y);
    std::vector<double> dev(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        dev[i] = std::fabs(y[i] - med);
    const double mad = median_of(std::move(dev));

    const auto peak_it = std::max_element(y.begin(), y.end());
    const double peak = *peak_it;
    const std::size_t peak_idx = static_cast<std::size_t>(peak_it - y.begin());
    if (!(peak > 0.0) || (mad > 0.0 && peak < 5.0 * mad))
        fail(errc::no_peak, "no significant peak at " +
                                std::to_string(step.lambda_nm) + " nm (peak " +
                                std::to_string(peak) + ", noise floor " +
                                std::to_string(mad) + ")");

    // Initial parameters: peak amplitude, intensity-weighted centroid of
    // the window around the peak, FWHM-derived sigma, near-zero baseline.
    // A whole-profile centroid would be dragged away by noise over the
    // hundreds of unlit bands.
    const double sigma0 = sigma_from_fwhm(y, peak_idx, peak - med, med);
    const int n_bands = static_cast<int>(y.size());
    const int window = std::max(5, static_cast<int>(std::ceil(4.0 * sigma0)));
    const int lo = std::max(0, static_cast<int>(peak_idx) - window);
    const int hi = std::min(n_bands - 1, static_cast<int>(peak_idx) + window);
    double wsum = 0.0, wisum = 0.0;
    for (int i = lo; i <= hi; ++i) {
        const double w = std::max(y[static_cast<std::size_t>(i)] - med, 0.0);
        wsum += w;
        wisum += w * static_cast<double>(i);
    }
    std::array<double, 4> p{peak - med,
                            wsum > 0.0 ? wisum / wsum
                                       : static_cast<double>(peak_idx),
                            sigma0, med};

    double lambda = 1e-3;
    double ss = sum_squared_residuals(p, y);
    const int max_iterations = 200;
    bool converged = false;
    int it = 0;
    for (; it < max_iterations && !converged; ++it) {
        std::array<std::array<double, 4>, 4> h{};
        std::array<double, 4> g{};
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double x = static_cast<double>(i);
            const double d = (x - p[1]) / p[2];
            const double e = std::exp(-0.5 * d * d);
            const double r = p[0] * e + p[3] - y[i];
            const std::array<double, 4> j{
                e, p[0] * e * d / p[2], p[0] * e * d * d / p[2], 1.0};
            for (int a = 0; a < 4; ++a) {
                g[a] += j[a] * r;
                for (int b = 0; b < 4; ++b)
                    h[a][b] += j[a] * j[b];
            }
        }

        auto damped = h;
        for (int a = 0; a < 4; ++a)
            damped[a][a] += lambda * h[a][a];
        std::array<double, 4> delta = g;
        for (double& v : delta)
            v = -v;
        if (!solve4(damped, delta)) {
            lambda = std::min(lambda * 10.0, 1e12);
            continue;
        }

        std::array<double, 4> trial{p[0] + delta[0], p[1] + delta[1],
                                    p[2] + delta[2], p[3] + delta[3]};
        if (trial[2] == 0.0)
            trial[2] = std::numeric_limits<double>::min();
        const double bands_span = static_cast<double>(y.size());
        // Keep the search inside the physically meaningful region: a
        // positive peak somewhere on (or just off) the grid.
        const bool sane = trial[0] > 0.0 && std::fabs(trial[2]) >= 0.05 &&
                          std::fabs(trial[2]) <= bands_span &&
                          trial[1] > -0.5 * bands_span &&
                          trial[1] < 1.5 * bands_span;
        const double trial_ss =
            sane ? sum_squared_residuals(trial, y)
                 : std::numeric_limits<double>::infinity();
        double max_change = 0.0;
        for (int a = 0; a < 4; ++a)
            max_change = std::max(max_change,
                                  std::fabs(delta[a]) / (std::fabs(p[a]) + 1e-30));
        if (trial_ss <= ss) {
            p = trial;
            ss = trial_ss;
            lambda = std::max(lambda * 0.1, 1e-12);
        } else {
            lambda = std::min(lambda * 10.0, 1e12);
        }
        // Converged once the solver can no longer move the parameters,
        // whether the last proposal was accepted or not.
        if (max_change < 1e-10)
            converged = true;
    }
    if (!converged)
        fail(errc::fit_diverged, "Gaussian fit at " +
                                     std::to_string(step.lambda_nm) +
                                     " nm did not converge in " +
                                     std::to_string(max_iterations) +
                                     " iterations");

    GaussianFit fit;
    fit.amplitude_dc = p[0];
    fit.center_band = p[1];
    fit.sigma_bands = std::fabs(p[2]);
    fit.baseline_dc = p[3];
    fit.residual_rms = std::sqrt(ss / static_cast<double>(y.size()));
    fit.iterations = it;
    const double last_band = static_cast<double>(y.size() - 1);
    // Edge steps may converge a hair past the first/last band; allow half
    // a band of slack, then clamp onto the grid.
    if (!(fit.amplitude_dc > 0.0) || !(fit.sigma_bands > 0.0) ||
        fit.center_band < -0.5 || fit.center_band > last_band + 0.5)
        fail(errc::fit_diverged,
             "Gaussian fit at " + std::to_string(step.lambda_nm) +
                 " nm converged to an invalid peak (A=" +
                 std::to_string(fit.amplitude_dc) + ", mu=" +
                 std::to_string(fit.center_band) + ")");
    fit.center_band = std::clamp(fit.center_band, 0.0, last_band);
    return fit;
}

ResponsivityCurve build_responsivity(const std::vector<MonochromatorStep>& steps,
                                     const SensorModel& sensor) {
    if (steps.size() < 2)
        fail(errc::insufficient_steps,
             "responsivity needs at least 2 sweep steps, got " +
                 std::to_string(steps.size()));
    for (std::size_t i = 1; i < steps.size(); ++i)
        if (steps[i].lambda_nm <= steps[i - 1].lambda_nm)
            fail(errc::non_monotone_wavelength,
                 "sweep wavelengths must be strictly increasing (step " +
                     std::to_string(i) + ")");

    // Per-step fits are independent; merge order is fixed by index.
    std::vector<GaussianFit> fits(steps.size());
    std::exception_ptr error;
    std::mutex error_mutex;
    parallel_for(steps.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                fits[i] = fit_band_profile(steps[i], sensor);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                return;
            }
        }
    });
    if (error)
        std::rethrow_exception(error);

    std::vector<double> lambdas(steps.size());
    std::vector<double> response(steps.size());
    ResponsivityCurve curve;
    curve.step_fits.reserve(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        lambdas[i] = steps[i].lambda_nm;
        response[i] = fits[i].amplitude_dc / steps[i].flux_ref_w;
        curve.step_fits.emplace_back(steps[i].lambda_nm, fits[i]);
    }

    Spectrum swept(WavelengthGrid(std::move(lambdas)), std::move(response),
                   Unit::responsivity);
    Spectrum on_grid = resample(swept, sensor.grid());
    const double peak = on_grid.max_value();
    if (!(peak > 0.0))
        fail(errc::zero_responsivity, "responsivity peak is not positive");
    std::vector<double> rel(on_grid.values());
    for (double& v : rel)
        v /= peak;
    curve.relative = Spectrum(sensor.grid(), std::move(rel), Unit::responsivity);
    return curve;
}

namespace {

double pick(const std::vector<double>& v, std::size_t band, const char* what,
            std::size_t bands) {
    if (v.size() == 1)
        return v[0];
    if (v.size() != bands)
        fail(errc::size_mismatch, std::string(what) +
                                      " must hold 1 value or one per band");
    return v[band];
}

} // namespace

Spectrum irradiance_per_count(const ResponsivityCurve& curve,
                              const ReferenceParams& ref,
                              const SensorModel& sensor,
                              bool exposure_ratio_inverted) {
    const std::size_t bands = sensor.bands();
    if (curve.relative.grid() != sensor.grid())
        fail(errc::grid_mismatch,
             "responsivity curve is not on the sensor grid");
    const double t_obs = sensor.exposure_s();
    const double x_obs = sensor.gsd_m();
    const double ifov = sensor.ifov_rad();

    std::vector<double> out(bands);
    for (std::size_t b = 0; b < bands; ++b) {
        const double flux = pick(ref.flux_ref_w, b, "flux_ref_w", bands);
        const double t_ref = pick(ref.exposure_ref_s, b, "exposure_ref_s", bands);
        const double b_ref = pick(ref.bandwidth_ref_nm, b, "bandwidth_ref_nm", bands);
        const double b_obs = sensor.bandwidths_nm()[b];
        if (!(flux > 0.0) || !(t_ref > 0.0) || !(b_ref > 0.0))
            fail(errc::domain_error,
                 "reference parameters must be positive at band " +
                     std::to_string(b));
        const double r = curve.relative[b];
        if (!(r > 0.0))
            fail(errc::zero_responsivity,
                 "relative responsivity is zero at band " + std::to_string(b));
        const double time_ratio =
            exposure_ratio_inverted ? t_ref / t_obs : t_obs / t_ref;
        out[b] = (flux * time_ratio) /
                 (x_obs * x_obs * ifov * ifov * (b_ref / b_obs) * r);
    }
    return Spectrum(sensor.grid(), std::move(out), Unit::irradiance);
}

} // namespace hypercal
