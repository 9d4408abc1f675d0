#include "hypercal/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hypercal/calibration.hpp"
#include "hypercal/forward_sim.hpp"
#include "hypercal/io/envi.hpp"
#include "hypercal/io/text.hpp"
#include "hypercal/parallel.hpp"
#include "hypercal/radcal.hpp"
#include "hypercal/spectral_ops.hpp"

namespace hypercal {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require_file(const fs::path& path, const char* what) {
    if (!fs::exists(path))
        fail(errc::io_error,
             std::string(what) + " '" + path.string() + "' does not exist");
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        fail(errc::io_error, "cannot create '" + dir.string() + "'");
}

json parse_json_file(const fs::path& path) {
    require_file(path, "config file");
    std::ifstream in(path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        fail(errc::bad_config, "'" + path.string() + "' is not valid JSON");
    return j;
}

double get_num(const json& j, const char* key, double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j[key].is_number())
        fail(errc::bad_config, std::string("config key '") + key +
                                   "' must be a number");
    return j[key].get<double>();
}

bool get_bool(const json& j, const char* key, bool fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j[key].is_boolean())
        fail(errc::bad_config, std::string("config key '") + key +
                                   "' must be a boolean");
    return j[key].get<bool>();
}

CalibrationConfig make_calibration_config(SensorModel sensor,
                                          std::optional<Spectrum> e_per_dc,
                                          const RunConfig& run) {
    CalibrationConfig cfg{std::move(sensor), std::move(e_per_dc)};
    cfg.incidence_cos = run.incidence_cos;
    cfg.exposure_ratio_inverted = run.exposure_ratio_inverted;
    cfg.eq6_as_printed = run.eq6_as_printed;
    cfg.smoothing_width = run.smoothing_width;
    cfg.clip_max = run.clip_max;
    cfg.irradiance_window_s = run.irradiance_window_s;
    cfg.validate();
    return cfg;
}

} // namespace

RunConfig load_run_config(const fs::path& path) {
    const json j = parse_json_file(path);
    RunConfig c;
    c.quality.sat_frac = get_num(j, "sat_frac", c.quality.sat_frac);
    c.quality.glint_angle_max =
        get_num(j, "glint_angle_max", c.quality.glint_angle_max);
    c.quality.glint_bright_ratio =
        get_num(j, "glint_bright_ratio", c.quality.glint_bright_ratio);
    c.quality.shadow_ratio = get_num(j, "shadow_ratio", c.quality.shadow_ratio);
    c.quality.adj_angle_min =
        get_num(j, "adj_angle_min", c.quality.adj_angle_min);
    c.smoothing_width =
        static_cast<int>(get_num(j, "smoothing_width", c.smoothing_width));
    c.clip_max = get_num(j, "clip_max", c.clip_max);
    c.eq6_as_printed = get_bool(j, "eq6_as_printed", c.eq6_as_printed);
    c.exposure_ratio_inverted =
        get_bool(j, "exposure_ratio_inverted", c.exposure_ratio_inverted);
    c.incidence_cos = get_num(j, "incidence_cos", c.incidence_cos);
    c.irradiance_window_s =
        get_num(j, "irradiance_window_s", c.irradiance_window_s);
    c.seed = static_cast<std::uint64_t>(get_num(j, "seed", 0.0));
    c.threads = static_cast<unsigned>(get_num(j, "threads", c.threads));
    return c;
}

std::string serialize_run_config(const RunConfig& c) {
    json j;
    j["sat_frac"] = c.quality.sat_frac;
    j["glint_angle_max"] = c.quality.glint_angle_max;
    j["glint_bright_ratio"] = c.quality.glint_bright_ratio;
    j["shadow_ratio"] = c.quality.shadow_ratio;
    j["adj_angle_min"] = c.quality.adj_angle_min;
    j["smoothing_width"] = c.smoothing_width;
    j["clip_max"] = c.clip_max;
    j["eq6_as_printed"] = c.eq6_as_printed;
    j["exposure_ratio_inverted"] = c.exposure_ratio_inverted;
    j["incidence_cos"] = c.incidence_cos;
    j["irradiance_window_s"] = c.irradiance_window_s;
    j["seed"] = c.seed;
    // thread count is an execution detail, not part of the run record
    return j.dump(2) + "\n";
}

void echo_run_config(const RunConfig& config, const fs::path& out_dir) {
    ensure_dir(out_dir);
    std::ofstream out(out_dir / "config_used.json",
                      std::ios::binary | std::ios::trunc);
    if (!out)
        fail(errc::io_error, "cannot write config echo");
    const std::string text = serialize_run_config(config);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

SensorModel load_sensor_spec(const fs::path& path) {
    const json j = parse_json_file(path);
    const fs::path base_dir = path.parent_path();

    WavelengthGrid grid;
    if (!j.contains("wavelengths_nm"))
        fail(errc::bad_config, "sensor spec missing 'wavelengths_nm'");
    const json& w = j["wavelengths_nm"];
    if (w.is_array()) {
        grid = WavelengthGrid(w.get<std::vector<double>>());
    } else if (w.is_object()) {
        grid = WavelengthGrid::linspace(
            get_num(w, "min", 0.0), get_num(w, "max", 0.0),
            static_cast<std::size_t>(get_num(w, "bands", 0.0)));
    } else {
        fail(errc::bad_config,
             "'wavelengths_nm' must be a list or {min, max, bands}");
    }

    std::vector<double> bandwidths;
    if (!j.contains("bandwidth_nm"))
        fail(errc::bad_config, "sensor spec missing 'bandwidth_nm'");
    if (j["bandwidth_nm"].is_array())
        bandwidths = j["bandwidth_nm"].get<std::vector<double>>();
    else
        bandwidths.assign(grid.size(), get_num(j, "bandwidth_nm", 0.0));

    Spectrum dark;
    if (!j.contains("dark_frame"))
        fail(errc::bad_config, "sensor spec missing 'dark_frame'");
    const json& d = j["dark_frame"];
    if (d.is_object() && d.contains("path")) {
        fs::path p = d["path"].get<std::string>();
        if (p.is_relative())
            p = base_dir / p;
        io::SpectrumFileData data = io::read_spectrum_file(p);
        dark = resample(data.spectrum, grid);
        if (dark.unit() != Unit::digital_count)
            fail(errc::unit_mismatch, "dark frame file must be digital counts");
    } else if (d.is_object() && d.contains("constant")) {
        dark = Spectrum::constant(grid, get_num(d, "constant", 0.0),
                                  Unit::digital_count);
    } else {
        fail(errc::bad_config, "'dark_frame' needs a 'path' or a 'constant'");
    }

    std::optional<Spectrum> responsivity;
    if (j.contains("responsivity")) {
        fs::path p = j["responsivity"]["path"].get<std::string>();
        if (p.is_relative())
            p = base_dir / p;
        io::SpectrumFileData data = io::read_spectrum_file(p);
        if (data.spectrum.unit() != Unit::responsivity)
            fail(errc::unit_mismatch, "responsivity file must be relative");
        if (data.spectrum.grid() != grid)
            fail(errc::grid_mismatch,
                 "responsivity curve is not on the sensor grid");
        responsivity = data.spectrum;
    }

    if (!j.contains("bit_depth") || !j.contains("exposure_s") ||
        !j.contains("ifov_rad") || !j.contains("gsd_m"))
        fail(errc::bad_config,
             "sensor spec needs bit_depth, exposure_s, ifov_rad, gsd_m");
    return SensorModel(std::move(grid), std::move(bandwidths),
                       static_cast<int>(get_num(j, "bit_depth", 12)),
                       get_num(j, "exposure_s", 0.0),
                       get_num(j, "ifov_rad", 0.0), get_num(j, "gsd_m", 0.0),
                       std::move(dark), std::move(responsivity));
}

void cmd_calibrate(const CalibrateArgs& args, const RunConfig& config,
                   std::ostream& log) {
    set_default_thread_count(config.threads);
    require_file(args.manifest, "sweep manifest");
    require_file(args.sensor_spec, "sensor spec");
    const SensorModel sensor = load_sensor_spec(args.sensor_spec);
    const auto manifest = io::read_sweep_manifest(args.manifest);

    // Fail fast on missing frames before any fitting starts.
    for (const auto& entry : manifest)
        require_file(entry.frame_path, "sweep frame");
    if (manifest.size() < 2)
        fail(errc::insufficient_steps,
             "sweep manifest lists " + std::to_string(manifest.size()) +
                 " steps; at least 2 are required");

    std::vector<MonochromatorStep> steps;
    steps.reserve(manifest.size());
    for (const auto& entry : manifest) {
        MonochromatorStep step;
        step.lambda_nm = entry.lambda_nm;
        step.frame = io::read_cube_file(entry.frame_path);
        step.flux_ref_w = entry.flux_ref_w;
        step.exposure_ref_s = entry.exposure_ref_s;
        step.bandwidth_ref_nm = entry.bandwidth_ref_nm;
        steps.push_back(std::move(step));
    }

    const ResponsivityCurve curve = build_responsivity(steps, sensor);

    // Reference parameters per band, interpolated across the sweep.
    std::vector<double> lambdas, flux, exposure, bandwidth;
    for (const auto& entry : manifest) {
        lambdas.push_back(entry.lambda_nm);
        flux.push_back(entry.flux_ref_w);
        exposure.push_back(entry.exposure_ref_s);
        bandwidth.push_back(entry.bandwidth_ref_nm);
    }
    const WavelengthGrid sweep_grid{lambdas};
    ReferenceParams ref;
    ref.flux_ref_w =
        resample(Spectrum(sweep_grid, flux, Unit::flux), sensor.grid()).values();
    ref.exposure_ref_s =
        resample(Spectrum(sweep_grid, exposure, Unit::flux), sensor.grid())
            .values();
    ref.bandwidth_ref_nm =
        resample(Spectrum(sweep_grid, bandwidth, Unit::flux), sensor.grid())
            .values();

    const Spectrum e_per_dc = irradiance_per_count(
        curve, ref, sensor, config.exposure_ratio_inverted);

    ensure_dir(args.out_dir);
    echo_run_config(config, args.out_dir);
    io::write_spectrum_file(args.out_dir / "responsivity.txt", curve.relative,
                            {{"name", "relative spectral responsivity"}});
    io::write_spectrum_file(args.out_dir / "e_per_dc.txt", e_per_dc,
                            {{"name", "irradiance per digital count"}});

    std::string report = "# per-step Gaussian fit quality\n";
    report += "# columns: lambda_nm amplitude_dc center_band sigma_bands "
              "baseline_dc residual_rms\n";
    for (const auto& [lambda, fit] : curve.step_fits)
        report += format_double(lambda) + " " + format_double(fit.amplitude_dc) +
                  " " + format_double(fit.center_band) + " " +
                  format_double(fit.sigma_bands) + " " +
                  format_double(fit.baseline_dc) + " " +
                  format_double(fit.residual_rms) + "\n";
    std::ofstream rep(args.out_dir / "fit_report.txt",
                      std::ios::binary | std::ios::trunc);
    rep.write(report.data(), static_cast<std::streamsize>(report.size()));

    log << "calibrate: " << manifest.size() << " steps, responsivity peak 1 at "
        << "band "
        << (std::max_element(curve.relative.values().begin(),
                             curve.relative.values().end()) -
            curve.relative.values().begin())
        << "\n";
}

void cmd_convert(const ConvertArgs& args, const RunConfig& config,
                 std::ostream& log) {
    set_default_thread_count(config.threads);
    require_file(args.sensor_spec, "sensor spec");
    require_file(args.e_per_dc, "irradiance-per-count file");
    require_file(args.irradiance_log, "irradiance log");

    const SensorModel sensor = load_sensor_spec(args.sensor_spec);
    const HyperCube raw = io::read_cube_file(args.cube, config.clip_max);
    if (raw.unit() != Unit::digital_count)
        fail(errc::unit_mismatch,
             "convert expects a DigitalCount cube, got " +
                 std::string(unit_tag(raw.unit())));
    if (raw.grid() != sensor.grid())
        fail(errc::grid_mismatch, "cube grid does not match sensor grid");
    for (double v : raw.data())
        if (v > sensor.max_dc())
            fail(errc::bad_value,
                 "cube contains counts above the sensor's max DC");

    io::SpectrumFileData e_data = io::read_spectrum_file(args.e_per_dc);
    if (e_data.spectrum.unit() != Unit::irradiance)
        fail(errc::unit_mismatch,
             "irradiance-per-count file must be in irradiance units");
    CalibrationConfig cfg = make_calibration_config(
        sensor, Spectrum(e_data.spectrum.grid(), e_data.spectrum.values(),
                         Unit::irradiance),
        config);

    const IrradianceSeries series = io::read_irradiance_log(args.irradiance_log);
    Spectrum downwelling =
        match_irradiance(series, args.timestamp_s, config.irradiance_window_s);
    downwelling = resample(downwelling, sensor.grid());

    const HyperCube dark_corrected = dark_correct(raw, sensor.dark_frame());
    const HyperCube radiance = dc_to_radiance(dark_corrected, cfg);
    const HyperCube reflectance =
        radiance_to_reflectance(radiance, downwelling, cfg);

    ensure_dir(args.out_dir);
    echo_run_config(config, args.out_dir);
    if (args.keep_radiance)
        io::write_cube_file(radiance, args.out_dir / "radiance");
    io::write_cube_file(reflectance, args.out_dir / "reflectance");
    log << "convert: " << raw.rows() << "x" << raw.cols() << "x" << raw.bands()
        << " cube -> reflectance\n";
}

void cmd_roi(const RoiArgs& args, const RunConfig& config, std::ostream& log) {
    set_default_thread_count(config.threads);
    require_file(args.roi_file, "ROI file");
    require_file(args.downwelling, "downwelling spectrum");
    require_file(args.sensor_spec, "sensor spec");

    const SensorModel sensor = load_sensor_spec(args.sensor_spec);
    const HyperCube cube = io::read_cube_file(args.cube, config.clip_max);
    io::SpectrumFileData down = io::read_spectrum_file(args.downwelling);
    const Spectrum downwelling = resample(down.spectrum, cube.grid());

    const auto specs = io::read_roi_file(args.roi_file);
    std::vector<RoiReport> reports;
    std::string table = "# roi quality report\n";
    table += "# columns: name total kept_fraction saturated glint shadow "
             "adjacency\n";
    for (const auto& spec : specs) {
        const Roi roi = spec.resolve();
        RoiReport report =
            score_roi(cube, roi, downwelling, sensor, config.quality);
        const RoiQualitySummary s = report.summary();
        table += report.roi_name + " " + std::to_string(s.total) + " " +
                 format_double(report.kept_fraction) + " " +
                 std::to_string(s.saturated) + " " + std::to_string(s.glint) +
                 " " + std::to_string(s.shadow) + " " +
                 std::to_string(s.adjacency) + "\n";
        for (const auto& note : report.notes)
            table += "# note (" + report.roi_name + "): " + note + "\n";
        reports.push_back(std::move(report));
    }

    ensure_dir(args.out_dir);
    echo_run_config(config, args.out_dir);
    std::ofstream tf(args.out_dir / "roi_report.txt",
                     std::ios::binary | std::ios::trunc);
    tf.write(table.data(), static_cast<std::streamsize>(table.size()));
    const std::string masks = io::serialize_roi_masks(reports);
    std::ofstream mf(args.out_dir / "roi_mask.txt",
                     std::ios::binary | std::ios::trunc);
    mf.write(masks.data(), static_cast<std::streamsize>(masks.size()));
    log << table;
}

void cmd_extract(const ExtractArgs& args, const RunConfig& config,
                 std::ostream& log) {
    set_default_thread_count(config.threads);
    require_file(args.roi_file, "ROI file");

    const HyperCube cube = io::read_cube_file(args.cube, config.clip_max);
    if (cube.unit() != Unit::reflectance)
        fail(errc::unit_mismatch, "extract expects a reflectance cube");

    std::map<std::string, std::vector<std::pair<PixelCoord, bool>>> masks;
    if (args.mask_file) {
        require_file(*args.mask_file, "mask file");
        masks = io::read_roi_masks(*args.mask_file);
    }

    SensorModel sensor(
        cube.grid(), std::vector<double>(cube.bands(), 1.0), 12, 1.0, 1.0, 1.0,
        Spectrum::constant(cube.grid(), 0.0, Unit::digital_count));
    CalibrationConfig cfg = make_calibration_config(sensor, std::nullopt, config);

    ensure_dir(args.out_dir);
    echo_run_config(config, args.out_dir);
    const auto specs = io::read_roi_file(args.roi_file);
    for (const auto& spec : specs) {
        const Roi roi = spec.resolve();
        std::optional<std::vector<bool>> keep;
        if (!masks.empty()) {
            auto it = masks.find(roi.name());
            if (it == masks.end())
                fail(errc::missing_key,
                     "mask file has no section for ROI '" + roi.name() + "'");
            std::map<PixelCoord, bool> by_pixel(it->second.begin(),
                                                it->second.end());
            std::vector<bool> flags(roi.size(), true);
            for (std::size_t i = 0; i < roi.size(); ++i) {
                auto found = by_pixel.find(roi.pixels()[i]);
                if (found == by_pixel.end())
                    fail(errc::missing_key,
                         "mask is missing pixel (" +
                             std::to_string(roi.pixels()[i].row) + ", " +
                             std::to_string(roi.pixels()[i].col) + ") of ROI '" +
                             roi.name() + "'");
                flags[i] = found->second;
            }
            keep = std::move(flags);
        }

        std::vector<std::pair<std::string, std::string>> metadata =
            args.metadata;
        bool has_name = false;
        for (const auto& [k, v] : metadata)
            has_name = has_name || k == "name";
        if (!has_name)
            metadata.emplace_back("name", roi.name());

        const SignatureRecord record = extract_signature(
            cube, roi, keep, std::move(metadata), cfg, args.timestamp_s);
        const std::string filename = io::signature_filename(record);
        io::write_signature_record(args.out_dir / filename, record);
        log << "extract: " << roi.name() << " -> " << filename << "\n";
    }
}

void cmd_simulate(const SimulateArgs& args, const RunConfig& config,
                  std::ostream& log) {
    set_default_thread_count(config.threads);
    require_file(args.scene, "scene file");
    require_file(args.sensor_spec, "sensor spec");
    if (args.scenarios.empty()) {
        ensure_dir(args.out_dir);
        echo_run_config(config, args.out_dir);
        log << "simulate: no scenarios, nothing to render\n";
        return;
    }
    for (const auto& p : args.scenarios)
        require_file(p, "scenario spectrum");

    const SensorModel sensor = load_sensor_spec(args.sensor_spec);
    const SceneSpec scene = io::read_scene_file(args.scene);

    std::optional<Spectrum> e_per_dc;
    if (args.e_per_dc) {
        require_file(*args.e_per_dc, "irradiance-per-count file");
        io::SpectrumFileData data = io::read_spectrum_file(*args.e_per_dc);
        e_per_dc = Spectrum(data.spectrum.grid(), data.spectrum.values(),
                            Unit::irradiance);
    }
    if (args.with_dc && !e_per_dc)
        fail(errc::missing_calibration,
             "DC rendering needs an irradiance-per-count file");

    CalibrationConfig cfg = make_calibration_config(sensor, e_per_dc, config);

    NoiseModel noise;
    noise.enable_poisson = args.with_noise;
    noise.seed = config.seed;
    if (args.qe_curve) {
        require_file(*args.qe_curve, "QE curve");
        io::SpectrumFileData data = io::read_spectrum_file(*args.qe_curve);
        noise.quantum_efficiency =
            Spectrum(data.spectrum.grid(), data.spectrum.values(),
                     Unit::responsivity);
    }

    std::vector<IlluminationScenario> scenarios;
    for (const auto& path : args.scenarios) {
        io::SpectrumFileData data = io::read_spectrum_file(path);
        if (data.spectrum.unit() != Unit::irradiance)
            fail(errc::unit_mismatch,
                 "scenario '" + path.string() + "' is not irradiance");
        std::string name = path.stem().string();
        if (const std::string* n = data.find("name"))
            name = *n;
        scenarios.emplace_back(
            name, resample(data.spectrum, scene.materials.front()
                                              .reflectance.grid()));
    }

    const auto renders =
        render_scenarios(scene, scenarios, cfg, noise, args.with_dc);

    ensure_dir(args.out_dir);
    echo_run_config(config, args.out_dir);
    for (const auto& render : renders) {
        io::write_cube_file(render.radiance,
                            args.out_dir / ("radiance_" + render.name));
        if (render.digital_counts)
            io::write_cube_file(*render.digital_counts,
                                args.out_dir / ("dc_" + render.name));
        log << "simulate: scenario '" << render.name << "' rendered\n";
    }
}

CompareResult cmd_compare(const CompareArgs& args, const RunConfig& config,
                          std::ostream& log) {
    set_default_thread_count(config.threads);
    require_file(args.a, "first spectrum");
    require_file(args.b, "second spectrum");
    io::SpectrumFileData da = io::read_spectrum_file(args.a);
    io::SpectrumFileData db = io::read_spectrum_file(args.b);
    Spectrum a = da.spectrum;
    Spectrum b = db.spectrum;
    if (a.unit() != b.unit())
        fail(errc::unit_mismatch,
             "cannot compare " + std::string(unit_tag(a.unit())) + " against " +
                 std::string(unit_tag(b.unit())));

    CompareResult result;
    if (a.grid() != b.grid()) {
        const double lo = std::max(a.grid().front(), b.grid().front());
        const double hi = std::min(a.grid().back(), b.grid().back());
        if (lo > hi)
            fail(errc::target_out_of_range,
                 "spectra cover disjoint wavelength ranges");
        std::vector<double> target;
        for (double w : a.grid().values())
            if (w >= lo && w <= hi)
                target.push_back(w);
        if (target.size() < 2)
            fail(errc::target_out_of_range,
                 "wavelength overlap is too narrow to compare");
        const WavelengthGrid grid{target};
        a = resample(a, grid);
        b = resample(b, grid);
        result.resampled = true;
        log << "warning: grids differ; comparing on the " << target.size()
            << "-band overlap [" << format_double(lo) << ", "
            << format_double(hi) << "] nm\n";
    }

    result.angle_rad = spectral_angle(a, b);
    result.rmse_value = rmse(a, b);
    log << "spectral_angle_rad " << format_double(result.angle_rad) << "\n";
    log << "rmse " << format_double(result.rmse_value) << "\n";

    if (args.out_dir) {
        ensure_dir(*args.out_dir);
        echo_run_config(config, *args.out_dir);
        std::string table = "# per-band comparison\n";
        table += "# columns: wavelength_nm a b difference\n";
        for (std::size_t i = 0; i < a.size(); ++i)
            table += format_double(a.grid()[i]) + " " + format_double(a[i]) +
                     " " + format_double(b[i]) + " " +
                     format_double(a[i] - b[i]) + "\n";
        std::ofstream out(*args.out_dir / "compare.txt",
                          std::ios::binary | std::ios::trunc);
        out.write(table.data(), static_cast<std::streamsize>(table.size()));
    }
    return result;
}

} // namespace hypercal
