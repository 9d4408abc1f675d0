#ifndef HYPERCAL_COMMANDS_HPP
#define HYPERCAL_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hypercal/roi_quality.hpp"
#include "hypercal/sensor.hpp"

namespace hypercal {

// Run-wide options. CLI flags override values loaded from the JSON
// config file; the effective config is echoed into the output directory.
struct RunConfig {
    QualityThresholds quality;
    int smoothing_width = 5;
    double clip_max = 1.5;
    bool eq6_as_printed = false;
    bool exposure_ratio_inverted = false;
    double incidence_cos = 1.0;
    double irradiance_window_s = 4.0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

RunConfig load_run_config(const std::filesystem::path& path);
std::string serialize_run_config(const RunConfig& config);
void echo_run_config(const RunConfig& config,
                     const std::filesystem::path& out_dir);

// Sensor description (JSON): band layout, acquisition parameters, dark
// frame, optional responsivity curve.
SensorModel load_sensor_spec(const std::filesystem::path& path);

struct CalibrateArgs {
    std::filesystem::path manifest;
    std::filesystem::path sensor_spec;
    std::filesystem::path out_dir;
};
void cmd_calibrate(const CalibrateArgs& args, const RunConfig& config,
                   std::ostream& log);

struct ConvertArgs {
    std::filesystem::path cube;
    std::filesystem::path sensor_spec;
    std::filesystem::path e_per_dc;
    std::filesystem::path irradiance_log;
    double timestamp_s = 0.0;
    std::filesystem::path out_dir;
    bool keep_radiance = false;
};
void cmd_convert(const ConvertArgs& args, const RunConfig& config,
                 std::ostream& log);

struct RoiArgs {
    std::filesystem::path cube;
    std::filesystem::path roi_file;
    std::filesystem::path downwelling; // spectrum file, resampled to cube grid
    std::filesystem::path sensor_spec;
    std::filesystem::path out_dir;
};
void cmd_roi(const RoiArgs& args, const RunConfig& config, std::ostream& log);

struct ExtractArgs {
    std::filesystem::path cube; // reflectance
    std::filesystem::path roi_file;
    std::optional<std::filesystem::path> mask_file;
    std::vector<std::pair<std::string, std::string>> metadata;
    double timestamp_s = 0.0;
    std::filesystem::path out_dir;
};
void cmd_extract(const ExtractArgs& args, const RunConfig& config,
                 std::ostream& log);

struct SimulateArgs {
    std::filesystem::path scene;
    std::vector<std::filesystem::path> scenarios; // spectrum files
    std::filesystem::path sensor_spec;
    std::optional<std::filesystem::path> e_per_dc;
    bool with_dc = false;
    bool with_noise = false;
    std::optional<std::filesystem::path> qe_curve;
    std::filesystem::path out_dir;
};
void cmd_simulate(const SimulateArgs& args, const RunConfig& config,
                  std::ostream& log);

struct CompareArgs {
    std::filesystem::path a;
    std::filesystem::path b;
    std::optional<std::filesystem::path> out_dir;
};
struct CompareResult {
    double angle_rad = 0.0;
    double rmse_value = 0.0;
    bool resampled = false;
};
CompareResult cmd_compare(const CompareArgs& args, const RunConfig& config,
                          std::ostream& log);

} // namespace hypercal

#endif
