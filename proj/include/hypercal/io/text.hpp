#ifndef HYPERCAL_IO_TEXT_HPP
#define HYPERCAL_IO_TEXT_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypercal/cube.hpp"
#include "hypercal/forward_sim.hpp"
#include "hypercal/irradiance.hpp"
#include "hypercal/radcal.hpp"
#include "hypercal/roi_quality.hpp"
#include "hypercal/spectrum.hpp"

namespace hypercal::io {

// ---- two-column spectrum files -------------------------------------------

struct SpectrumFileData {
    Spectrum spectrum;
    std::vector<std::pair<std::string, std::string>> metadata; // ordered
    const std::string* find(const std::string& key) const;
};

SpectrumFileData parse_spectrum_text(std::string_view text);
std::string serialize_spectrum_text(
    const Spectrum& spectrum,
    const std::vector<std::pair<std::string, std::string>>& metadata = {});

SpectrumFileData read_spectrum_file(const std::filesystem::path& path);
void write_spectrum_file(
    const std::filesystem::path& path, const Spectrum& spectrum,
    const std::vector<std::pair<std::string, std::string>>& metadata = {});

// ---- irradiance logs ------------------------------------------------------

IrradianceSeries parse_irradiance_log(std::string_view text);
std::string serialize_irradiance_log(const IrradianceSeries& series);
IrradianceSeries read_irradiance_log(const std::filesystem::path& path);
void write_irradiance_log(const std::filesystem::path& path,
                          const IrradianceSeries& series);

// Assembles a series from individual spectrum files carrying a
// `timestamp_s` metadata key; samples are sorted by time.
IrradianceSeries irradiance_series_from_files(
    const std::vector<std::filesystem::path>& paths);

// ---- signature records ----------------------------------------------------

SignatureRecord parse_signature_text(std::string_view text);
std::string serialize_signature_text(const SignatureRecord& record);
SignatureRecord read_signature_record(const std::filesystem::path& path);
void write_signature_record(const std::filesystem::path& path,
                            const SignatureRecord& record);

// Deterministic library filename for a record ("<name>.sig.txt",
// lowercased, non-alphanumerics folded to '-').
std::string signature_filename(const SignatureRecord& record);

// ---- ROI definition files -------------------------------------------------

struct RoiSpec {
    std::string name;
    bool is_polygon = false;
    std::vector<int> coords; // rect: r0 c0 r1 c1; polygon: r1 c1 r2 c2 ...

    Roi resolve() const;
};

std::vector<RoiSpec> parse_roi_file(std::string_view text);
std::vector<RoiSpec> read_roi_file(const std::filesystem::path& path);

// ---- ROI quality masks ------------------------------------------------------

std::string serialize_roi_masks(const std::vector<RoiReport>& reports);
// keep flags per ROI name, pixel-aligned with the ROI definition order
std::map<std::string, std::vector<std::pair<PixelCoord, bool>>> parse_roi_masks(
    std::string_view text);
std::map<std::string, std::vector<std::pair<PixelCoord, bool>>> read_roi_masks(
    const std::filesystem::path& path);

// ---- scene files ------------------------------------------------------------

// Palette spectra are loaded relative to the scene file's directory.
SceneSpec read_scene_file(const std::filesystem::path& path);

// ---- monochromator sweep manifests ------------------------------------------

struct SweepManifestEntry {
    double lambda_nm = 0.0;
    std::filesystem::path frame_path;
    double flux_ref_w = 0.0;
    double exposure_ref_s = 0.0;
    double bandwidth_ref_nm = 0.0;
};

std::vector<SweepManifestEntry> parse_sweep_manifest(
    std::string_view text, const std::filesystem::path& base_dir = {});
std::vector<SweepManifestEntry> read_sweep_manifest(
    const std::filesystem::path& path);

} // namespace hypercal::io

#endif
