#include "hypercal/radcal.hpp"

#include <algorithm>
#include <cmath>

#include "hypercal/parallel.hpp"
#include "hypercal/spectral_ops.hpp"

namespace hypercal {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void CalibrationConfig::validate() const {
    if (!(incidence_cos > 0.0) || incidence_cos > 1.0)
        fail(errc::bad_value, "incidence cosine must lie in (0, 1]");
    if (smoothing_width < 1 || smoothing_width % 2 == 0)
        fail(errc::bad_width, "smoothing width must be odd and positive");
    if (!(clip_max > 0.0))
        fail(errc::bad_value, "clip_max must be positive");
    if (e_per_dc) {
        if (e_per_dc->grid() != sensor.grid())
            fail(errc::grid_mismatch,
                 "irradiance-per-count curve is not on the sensor grid");
        for (double v : e_per_dc->values())
            if (!(v > 0.0))
                fail(errc::bad_value,
                     "irradiance-per-count values must be positive");
    }
}

const std::string* SignatureRecord::find_metadata(const std::string& key) const {
    for (const auto& [k, v] : metadata)
        if (k == key)
            return &v;
    return nullptr;
}

HyperCube dark_correct(const HyperCube& cube, const Spectrum& dark) {
    if (cube.unit() != Unit::digital_count)
        fail(errc::unit_mismatch, "dark correction expects a DC cube");
    if (dark.unit() != Unit::digital_count)
        fail(errc::unit_mismatch, "dark frame must be in digital counts");
    if (dark.grid() != cube.grid())
        fail(errc::grid_mismatch, "dark frame grid does not match cube");

    const std::size_t bands = cube.bands();
    std::vector<double> out(cube.data().size());
    const auto& in = cube.data();
    parallel_for(cube.pixel_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const std::size_t base = p * bands;
            for (std::size_t b = 0; b < bands; ++b)
                out[base + b] = std::max(0.0, in[base + b] - dark[b]);
        }
    });
    return HyperCube(cube.rows(), cube.cols(), cube.grid(),
                     Unit::digital_count, std::move(out));
}

HyperCube dc_to_radiance(const HyperCube& cube, const CalibrationConfig& cfg) {
    cfg.validate();
    if (cube.unit() != Unit::digital_count)
        fail(errc::unit_mismatch, "radiance conversion expects a DC cube");
    if (!cfg.e_per_dc)
        fail(errc::missing_calibration,
             "no irradiance-per-count curve configured");
    const Spectrum& e = *cfg.e_per_dc;
    if (e.grid() != cube.grid())
        fail(errc::grid_mismatch,
             "irradiance-per-count curve grid does not match cube");

    const std::size_t bands = cube.bands();
    const double inv_pi = 1.0 / kPi;
    std::vector<double> out(cube.data().size());
    const auto& in = cube.data();
    parallel_for(cube.pixel_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const std::size_t base = p * bands;
            for (std::size_t b = 0; b < bands; ++b)
                out[base + b] = in[base + b] * e[b] * inv_pi;
        }
    });
    return HyperCube(cube.rows(), cube.cols(), cube.grid(), Unit::radiance,
                     std::move(out));
}

namespace {

void check_reflectance_inputs(const WavelengthGrid& grid,
                              const Spectrum& downwelling,
                              const CalibrationConfig& cfg) {
    cfg.validate();
    if (downwelling.grid() != grid)
        fail(errc::grid_mismatch,
             "downwelling spectrum is not on the cube grid");
    if (downwelling.unit() != Unit::irradiance)
        fail(errc::unit_mismatch, "downwelling spectrum must be irradiance");
    for (std::size_t b = 0; b < downwelling.size(); ++b)
        if (!(downwelling[b] > 0.0))
            fail(errc::zero_irradiance,
                 "downwelling irradiance is not positive at band " +
                     std::to_string(b));
}

double to_reflectance(double radiance, double e_down, const CalibrationConfig& cfg) {
    const double rho = cfg.eq6_as_printed
                           ? radiance * e_down / kPi
                           : kPi * radiance / (e_down * cfg.incidence_cos);
    return std::clamp(rho, 0.0, cfg.clip_max);
}

} // namespace

Spectrum radiance_to_reflectance(const Spectrum& radiance,
                                 const Spectrum& downwelling,
                                 const CalibrationConfig& cfg) {
    check_reflectance_inputs(radiance.grid(), downwelling, cfg);
    if (radiance.unit() != Unit::radiance)
        fail(errc::unit_mismatch, "input spectrum must be radiance");
    std::vector<double> out(radiance.size());
    for (std::size_t b = 0; b < radiance.size(); ++b)
        out[b] = to_reflectance(radiance[b], downwelling[b], cfg);
    return Spectrum(radiance.grid(), std::move(out), Unit::reflectance,
                    cfg.clip_max);
}

HyperCube radiance_to_reflectance(const HyperCube& cube,
                                  const Spectrum& downwelling,
                                  const CalibrationConfig& cfg) {
    check_reflectance_inputs(cube.grid(), downwelling, cfg);
    if (cube.unit() != Unit::radiance)
        fail(errc::unit_mismatch, "input cube must be radiance");
    const std::size_t bands = cube.bands();
    std::vector<double> out(cube.data().size());
    const auto& in = cube.data();
    parallel_for(cube.pixel_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const std::size_t base = p * bands;
            for (std::size_t b = 0; b < bands; ++b)
                out[base + b] =
                    to_reflectance(in[base + b], downwelling[b], cfg);
        }
    });
    return HyperCube(cube.rows(), cube.cols(), cube.grid(), Unit::reflectance,
                     std::move(out), cfg.clip_max);
}

Spectrum match_irradiance(const IrradianceSeries& series, double t,
                          double window_s) {
    if (series.empty())
        fail(errc::bad_value, "irradiance series is empty");
    const auto& samples = series.samples();
    if (t < series.first_time()) {
        if (series.first_time() - t > window_s)
            fail(errc::out_of_window,
                 "time " + std::to_string(t) + " s precedes the log by more than " +
                     std::to_string(window_s) + " s");
        return samples.front().second;
    }
    if (t > series.last_time()) {
        if (t - series.last_time() > window_s)
            fail(errc::out_of_window,
                 "time " + std::to_string(t) + " s follows the log by more than " +
                     std::to_string(window_s) + " s");
        return samples.back().second;
    }
    auto it = std::lower_bound(
        samples.begin(), samples.end(), t,
        [](const IrradianceSeries::Sample& s, double value) {
            return s.first < value;
        });
    if (it != samples.end() && it->first == t)
        return it->second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (t - lo.first) / (hi.first - lo.first);
    std::vector<double> out(lo.second.size());
    for (std::size_t b = 0; b < out.size(); ++b)
        out[b] = lo.second[b] + f * (hi.second[b] - lo.second[b]);
    return Spectrum(lo.second.grid(), std::move(out), Unit::irradiance);
}

SignatureRecord extract_signature(
    const HyperCube& reflectance_cube, const Roi& roi,
    const std::optional<std::vector<bool>>& keep,
    std::vector<std::pair<std::string, std::string>> metadata,
    const CalibrationConfig& cfg, double timestamp_s,
    std::optional<RoiQualitySummary> quality) {
    cfg.validate();
    if (reflectance_cube.unit() != Unit::reflectance)
        fail(errc::unit_mismatch, "signature extraction expects a reflectance cube");
    for (const auto& [k, v] : metadata)
        if (k.empty())
            fail(errc::bad_value, "metadata keys must be non-empty");

    Spectrum mean = roi_mean_spectrum(reflectance_cube, roi, keep);
    Spectrum smoothed = box_smooth(mean, cfg.smoothing_width);
    std::vector<double> values = smoothed.values();
    for (double& v : values)
        v = std::clamp(v, 0.0, cfg.clip_max);

    SignatureRecord record;
    record.reflectance = Spectrum(smoothed.grid(), std::move(values),
                                  Unit::reflectance, cfg.clip_max);
    record.roi_definition = roi.definition();
    record.timestamp_s = timestamp_s;
    record.metadata = std::move(metadata);
    record.quality = std::move(quality);
    return record;
}

} // namespace hypercal
