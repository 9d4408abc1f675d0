#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypercal/commands.hpp"
#include "hypercal/error.hpp"

namespace {

using hypercal::RunConfig;

struct GlobalOptions {
    std::string config_path;
    bool seed_set = false;
    std::uint64_t seed = 0;
    bool threads_set = false;
    unsigned threads = 1;
    bool smoothing_set = false;
    int smoothing_width = 5;
    bool clip_set = false;
    double clip_max = 1.5;
    bool eq6_as_printed = false;
    bool exposure_ratio_inverted = false;
    bool incidence_set = false;
    double incidence_cos = 1.0;
    bool window_set = false;
    double irradiance_window_s = 4.0;
};

void add_global_options(CLI::App& app, GlobalOptions& g) {
    app.add_option("--config", g.config_path,
                   "JSON config file with run defaults");
    app.add_option("--seed", g.seed, "Noise seed")->each([&](const std::string&) {
        g.seed_set = true;
    });
    app.add_option("--threads", g.threads, "Worker thread count")
        ->each([&](const std::string&) { g.threads_set = true; });
    app.add_option("--smoothing-width", g.smoothing_width,
                   "Box filter width in bands (odd)")
        ->each([&](const std::string&) { g.smoothing_set = true; });
    app.add_option("--clip-max", g.clip_max, "Reflectance clip ceiling")
        ->each([&](const std::string&) { g.clip_set = true; });
    app.add_flag("--eq6-as-printed", g.eq6_as_printed,
                 "Use the multiplicative reflectance form (debug)");
    app.add_flag("--exposure-ratio-inverted", g.exposure_ratio_inverted,
                 "Flip the exposure-time ratio in the E/DC formula");
    app.add_option("--incidence-cos", g.incidence_cos,
                   "cos(theta) for the ROI plane")
        ->each([&](const std::string&) { g.incidence_set = true; });
    app.add_option("--irradiance-window", g.irradiance_window_s,
                   "Endpoint clamp window for the irradiance log [s]")
        ->each([&](const std::string&) { g.window_set = true; });
}

RunConfig resolve_config(const GlobalOptions& g) {
    RunConfig config;
    if (!g.config_path.empty())
        config = hypercal::load_run_config(g.config_path);
    if (g.seed_set)
        config.seed = g.seed;
    if (g.threads_set)
        config.threads = g.threads;
    if (g.smoothing_set)
        config.smoothing_width = g.smoothing_width;
    if (g.clip_set)
        config.clip_max = g.clip_max;
    if (g.eq6_as_printed)
        config.eq6_as_printed = true;
    if (g.exposure_ratio_inverted)
        config.exposure_ratio_inverted = true;
    if (g.incidence_set)
        config.incidence_cos = g.incidence_cos;
    if (g.window_set)
        config.irradiance_window_s = g.irradiance_window_s;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hypercal: pushbroom hyperspectral calibration toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // global options are accepted after the subcommand too

    GlobalOptions g;
    add_global_options(app, g);

    hypercal::CalibrateArgs cal;
    CLI::App* calibrate =
        app.add_subcommand("calibrate", "Build responsivity and E/DC curves "
                                        "from a monochromator sweep");
    calibrate->add_option("--manifest", cal.manifest, "Sweep manifest file")
        ->required();
    calibrate->add_option("--sensor", cal.sensor_spec, "Sensor spec (JSON)")
        ->required();
    calibrate->add_option("--out", cal.out_dir, "Output directory")->required();

    hypercal::ConvertArgs conv;
    CLI::App* convert = app.add_subcommand(
        "convert", "Raw DC cube -> radiance -> reflectance cube");
    convert->add_option("--cube", conv.cube, "Raw cube (.hdr or base path)")
        ->required();
    convert->add_option("--sensor", conv.sensor_spec, "Sensor spec (JSON)")
        ->required();
    convert->add_option("--e-per-dc", conv.e_per_dc, "E/DC spectrum file")
        ->required();
    convert
        ->add_option("--irradiance", conv.irradiance_log,
                     "Downwelling irradiance log")
        ->required();
    convert
        ->add_option("--timestamp", conv.timestamp_s,
                     "Cube acquisition time [s] in the log's clock")
        ->required();
    convert->add_option("--out", conv.out_dir, "Output directory")->required();
    convert->add_flag("--keep-radiance", conv.keep_radiance,
                      "Also write the intermediate radiance cube");

    hypercal::RoiArgs roi;
    CLI::App* roi_cmd =
        app.add_subcommand("roi", "Screen ROI pixels for glint, saturation, "
                                  "shadow, and adjacency");
    roi_cmd->add_option("--cube", roi.cube, "Cube (.hdr or base path)")
        ->required();
    roi_cmd->add_option("--roi", roi.roi_file, "ROI definition file")
        ->required();
    roi_cmd
        ->add_option("--downwelling", roi.downwelling,
                     "Downwelling spectrum file")
        ->required();
    roi_cmd->add_option("--sensor", roi.sensor_spec, "Sensor spec (JSON)")
        ->required();
    roi_cmd->add_option("--out", roi.out_dir, "Output directory")->required();

    hypercal::ExtractArgs ext;
    std::vector<std::string> meta_args;
    CLI::App* extract = app.add_subcommand(
        "extract", "Extract smoothed paint signatures from a reflectance cube");
    extract->add_option("--cube", ext.cube, "Reflectance cube")->required();
    extract->add_option("--roi", ext.roi_file, "ROI definition file")
        ->required();
    std::string mask_path;
    extract->add_option("--mask", mask_path, "ROI mask file from `roi`");
    extract->add_option("--meta", meta_args,
                        "Metadata key=value (repeatable; e.g. make=Honda)");
    extract->add_option("--timestamp", ext.timestamp_s, "Acquisition time [s]");
    extract->add_option("--out", ext.out_dir, "Signature library directory")
        ->required();

    hypercal::SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Render radiance (and optional DC) cubes for scenarios");
    simulate->add_option("--scene", sim.scene, "Scene file")->required();
    simulate->add_option("--scenario", sim.scenarios,
                         "Scenario irradiance spectrum (repeatable)");
    simulate->add_option("--sensor", sim.sensor_spec, "Sensor spec (JSON)")
        ->required();
    std::string sim_epdc;
    simulate->add_option("--e-per-dc", sim_epdc, "E/DC spectrum file");
    simulate->add_flag("--dc", sim.with_dc, "Also render DC cubes");
    simulate->add_flag("--noise", sim.with_noise, "Enable Poisson shot noise");
    std::string qe_path;
    simulate->add_option("--qe", qe_path, "Quantum efficiency curve");
    simulate->add_option("--out", sim.out_dir, "Output directory")->required();

    hypercal::CompareArgs cmp;
    std::string cmp_out;
    CLI::App* compare = app.add_subcommand(
        "compare", "Spectral angle / RMSE between two spectrum files");
    compare->add_option("--a", cmp.a, "First spectrum or signature file")
        ->required();
    compare->add_option("--b", cmp.b, "Second spectrum or signature file")
        ->required();
    compare->add_option("--out", cmp_out, "Directory for the per-band table");

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig config = resolve_config(g);
        if (calibrate->parsed()) {
            hypercal::cmd_calibrate(cal, config, std::cout);
        } else if (convert->parsed()) {
            hypercal::cmd_convert(conv, config, std::cout);
        } else if (roi_cmd->parsed()) {
            hypercal::cmd_roi(roi, config, std::cout);
        } else if (extract->parsed()) {
            if (!mask_path.empty())
                ext.mask_file = mask_path;
            for (const auto& kv : meta_args) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos || eq == 0)
                    hypercal::fail(hypercal::errc::bad_config,
                                   "--meta expects key=value, got '" + kv + "'");
                ext.metadata.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
            }
            hypercal::cmd_extract(ext, config, std::cout);
        } else if (simulate->parsed()) {
            if (!sim_epdc.empty())
                sim.e_per_dc = sim_epdc;
            if (!qe_path.empty())
                sim.qe_curve = qe_path;
            hypercal::cmd_simulate(sim, config, std::cout);
        } else if (compare->parsed()) {
            if (!cmp_out.empty())
                cmp.out_dir = cmp_out;
            hypercal::cmd_compare(cmp, config, std::cout);
        }
    } catch (const hypercal::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return hypercal::cli_exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
