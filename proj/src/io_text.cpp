#include "hypercal/io/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hypercal/io/envi.hpp"

namespace hypercal::io {

namespace {

std::string trim(std::string_view s) {
    const char* ws = " \t\r\n\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(ws);
    return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& token, int line, const char* what) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        fail(errc::parse_error, "line " + std::to_string(line) + ": bad " +
                                    what + " '" + token + "'");
    return value;
}

long parse_long(const std::string& token, int line, const char* what) {
    long value = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        fail(errc::parse_error, "line " + std::to_string(line) + ": bad " +
                                    what + " '" + token + "'");
    return value;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok)
        out.push_back(tok);
    return out;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string token;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(token));
            token.clear();
        } else {
            token += c;
        }
    }
    out.push_back(trim(token));
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(errc::io_error, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(errc::io_error, "cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

// Shared scanner for `# key: value` headers followed by data rows.
struct TextScanner {
    std::istringstream in;
    int line_no = 0;

    explicit TextScanner(std::string_view text) : in(std::string(text)) {}

    // Returns false at end of input. Metadata lines land in `meta`,
    // data lines in `row`.
    bool next(std::vector<std::pair<std::string, std::string>>& meta,
              std::string& row) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string t = trim(line);
            if (t.empty())
                continue;
            if (t.front() == '#') {
                const std::string body = trim(t.substr(1));
                if (body.empty())
                    continue;
                const auto colon = body.find(':');
                if (colon == std::string::npos)
                    continue; // bare comment
                std::string key = trim(body.substr(0, colon));
                std::string value = trim(body.substr(colon + 1));
                if (!key.empty())
                    meta.emplace_back(std::move(key), std::move(value));
                continue;
            }
            row = t;
            return true;
        }
        return false;
    }
};

} // namespace

// ---- spectrum files ---------------------------------------------------------

const std::string* SpectrumFileData::find(const std::string& key) const {
    for (const auto& [k, v] : metadata)
        if (k == key)
            return &v;
    return nullptr;
}

SpectrumFileData parse_spectrum_text(std::string_view text) {
    TextScanner scanner(text);
    SpectrumFileData out;
    std::vector<double> wl, values;
    std::string row;
    while (scanner.next(out.metadata, row)) {
        const auto tokens = split_ws(row);
        if (tokens.size() != 2)
            fail(errc::parse_error, "line " + std::to_string(scanner.line_no) +
                                        ": expected 'wavelength value'");
        const double w = parse_double(tokens[0], scanner.line_no, "wavelength");
        const double v = parse_double(tokens[1], scanner.line_no, "value");
        if (!wl.empty() && w <= wl.back())
            fail(errc::non_monotone_wavelength,
                 "line " + std::to_string(scanner.line_no) + ": wavelength " +
                     tokens[0] + " does not increase");
        wl.push_back(w);
        values.push_back(v);
    }
    if (wl.empty())
        fail(errc::parse_error, "spectrum file has no data rows");

    Unit unit = Unit::reflectance;
    bool saw_unit = false;
    for (const auto& [k, v] : out.metadata)
        if (k == "unit") {
            unit = unit_from_tag(v);
            saw_unit = true;
        }
    if (!saw_unit)
        fail(errc::missing_key, "spectrum file has no '# unit:' line");
    std::erase_if(out.metadata,
                  [](const auto& kv) { return kv.first == "unit"; });

    out.spectrum = Spectrum(WavelengthGrid(std::move(wl)), std::move(values),
                            unit, std::numeric_limits<double>::infinity());
    return out;
}

std::string serialize_spectrum_text(
    const Spectrum& spectrum,
    const std::vector<std::pair<std::string, std::string>>& metadata) {
    std::string out = "# hypercal spectrum\n";
    out += "# unit: " + std::string(unit_tag(spectrum.unit())) + "\n";
    for (const auto& [k, v] : metadata)
        if (k != "unit")
            out += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        out += format_double(spectrum.grid()[i]) + " " +
               format_double(spectrum[i]) + "\n";
    return out;
}

SpectrumFileData read_spectrum_file(const std::filesystem::path& path) {
    return parse_spectrum_text(read_text_file(path));
}

void write_spectrum_file(
    const std::filesystem::path& path, const Spectrum& spectrum,
    const std::vector<std::pair<std::string, std::string>>& metadata) {
    write_text_file(path, serialize_spectrum_text(spectrum, metadata));
}

// ---- irradiance logs --------------------------------------------------------

IrradianceSeries parse_irradiance_log(std::string_view text) {
    TextScanner scanner(text);
    std::vector<std::pair<std::string, std::string>> meta;
    std::string row;
    std::optional<WavelengthGrid> grid;
    std::vector<IrradianceSeries::Sample> samples;
    while (scanner.next(meta, row)) {
        if (!grid) {
            for (const auto& [k, v] : meta)
                if (k == "wavelengths_nm") {
                    const auto tokens = split_ws(v);
                    std::vector<double> wl;
                    wl.reserve(tokens.size());
                    for (const auto& t : tokens)
                        wl.push_back(
                            parse_double(t, scanner.line_no, "wavelength"));
                    grid = WavelengthGrid(std::move(wl));
                }
            if (!grid)
                fail(errc::missing_key,
                     "irradiance log has no '# wavelengths_nm:' line before data");
        }
        const auto tokens = split_ws(row);
        if (tokens.size() != grid->size() + 1)
            fail(errc::parse_error,
                 "line " + std::to_string(scanner.line_no) + ": expected " +
                     std::to_string(grid->size() + 1) + " columns, got " +
                     std::to_string(tokens.size()));
        const double t = parse_double(tokens[0], scanner.line_no, "timestamp");
        if (!samples.empty() && t <= samples.back().first)
            fail(errc::non_monotone_time,
                 "line " + std::to_string(scanner.line_no) + ": timestamp " +
                     tokens[0] + " does not increase");
        std::vector<double> values(grid->size());
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] =
                parse_double(tokens[i + 1], scanner.line_no, "irradiance");
        samples.emplace_back(
            t, Spectrum(*grid, std::move(values), Unit::irradiance));
    }
    if (samples.empty())
        fail(errc::parse_error, "irradiance log has no samples");
    return IrradianceSeries(std::move(samples));
}

std::string serialize_irradiance_log(const IrradianceSeries& series) {
    std::string out = "# hypercal irradiance log\n";
    out += "# unit: " + std::string(unit_tag(Unit::irradiance)) + "\n";
    out += "# wavelengths_nm:";
    for (double w : series.grid().values())
        out += " " + format_double(w);
    out += "\n";
    for (const auto& [t, spectrum] : series.samples()) {
        out += format_double(t);
        for (double v : spectrum.values())
            out += " " + format_double(v);
        out += "\n";
    }
    return out;
}

IrradianceSeries read_irradiance_log(const std::filesystem::path& path) {
    return parse_irradiance_log(read_text_file(path));
}

void write_irradiance_log(const std::filesystem::path& path,
                          const IrradianceSeries& series) {
    write_text_file(path, serialize_irradiance_log(series));
}

IrradianceSeries irradiance_series_from_files(
    const std::vector<std::filesystem::path>& paths) {
    std::vector<IrradianceSeries::Sample> samples;
    for (const auto& path : paths) {
        SpectrumFileData data = read_spectrum_file(path);
        const std::string* t = data.find("timestamp_s");
        if (!t)
            fail(errc::missing_key,
                 "'" + path.string() + "' has no '# timestamp_s:' line");
        samples.emplace_back(parse_double(*t, 0, "timestamp"),
                             std::move(data.spectrum));
    }
    std::sort(samples.begin(), samples.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return IrradianceSeries(std::move(samples));
}

// ---- signature records ------------------------------------------------------

SignatureRecord parse_signature_text(std::string_view text) {
    SpectrumFileData data = parse_spectrum_text(text);
    if (data.spectrum.unit() != Unit::reflectance)
        fail(errc::unit_mismatch, "signature record must hold reflectance");

    SignatureRecord record;
    record.reflectance =
        Spectrum(data.spectrum.grid(), data.spectrum.values(),
                 Unit::reflectance, std::numeric_limits<double>::infinity());
    for (auto& [k, v] : data.metadata) {
        if (k == "roi") {
            record.roi_definition = v;
        } else if (k == "timestamp_s") {
            record.timestamp_s = parse_double(v, 0, "timestamp");
        } else if (k == "quality") {
            RoiQualitySummary q;
            for (const auto& field : split_ws(v)) {
                const auto eq = field.find('=');
                if (eq == std::string::npos)
                    fail(errc::parse_error,
                         "bad quality field '" + field + "'");
                const std::string key = field.substr(0, eq);
                const std::string val = field.substr(eq + 1);
                if (key == "kept")
                    q.kept_fraction = parse_double(val, 0, "kept fraction");
                else if (key == "total")
                    q.total = static_cast<std::size_t>(
                        parse_long(val, 0, "total"));
                else if (key == "saturated")
                    q.saturated = static_cast<std::size_t>(
                        parse_long(val, 0, "saturated"));
                else if (key == "glint")
                    q.glint = static_cast<std::size_t>(
                        parse_long(val, 0, "glint"));
                else if (key == "shadow")
                    q.shadow = static_cast<std::size_t>(
                        parse_long(val, 0, "shadow"));
                else if (key == "adjacency")
                    q.adjacency = static_cast<std::size_t>(
                        parse_long(val, 0, "adjacency"));
                else
                    fail(errc::parse_error,
                         "unknown quality field '" + key + "'");
            }
            record.quality = q;
        } else {
            record.metadata.emplace_back(std::move(k), std::move(v));
        }
    }
    if (!record.find_metadata("name"))
        fail(errc::missing_metadata_key,
             "signature record has no 'name' metadata");
    return record;
}

std::string serialize_signature_text(const SignatureRecord& record) {
    if (!record.find_metadata("name"))
        fail(errc::missing_metadata_key,
             "signature record has no 'name' metadata");
    std::vector<std::pair<std::string, std::string>> meta = record.metadata;
    meta.emplace_back("roi", record.roi_definition);
    meta.emplace_back("timestamp_s", format_double(record.timestamp_s));
    if (record.quality) {
        const RoiQualitySummary& q = *record.quality;
        std::string v = "kept=" + format_double(q.kept_fraction) +
                        " total=" + std::to_string(q.total) +
                        " saturated=" + std::to_string(q.saturated) +
                        " glint=" + std::to_string(q.glint) +
                        " shadow=" + std::to_string(q.shadow) +
                        " adjacency=" + std::to_string(q.adjacency);
        meta.emplace_back("quality", v);
    }
    return serialize_spectrum_text(record.reflectance, meta);
}

SignatureRecord read_signature_record(const std::filesystem::path& path) {
    return parse_signature_text(read_text_file(path));
}

void write_signature_record(const std::filesystem::path& path,
                            const SignatureRecord& record) {
    write_text_file(path, serialize_signature_text(record));
}

std::string signature_filename(const SignatureRecord& record) {
    const std::string* name = record.find_metadata("name");
    if (!name)
        fail(errc::missing_metadata_key,
             "signature record has no 'name' metadata");
    std::string slug;
    for (char c : *name) {
        const unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u))
            slug += static_cast<char>(std::tolower(u));
        else if (!slug.empty() && slug.back() != '-')
            slug += '-';
    }
    while (!slug.empty() && slug.back() == '-')
        slug.pop_back();
    if (slug.empty())
        slug = "signature";
    return slug + ".sig.txt";
}

// ---- ROI files -------------------------------------------------------------

Roi RoiSpec::resolve() const {
    if (is_polygon) {
        std::vector<PixelCoord> vertices;
        for (std::size_t i = 0; i + 1 < coords.size(); i += 2)
            vertices.push_back({coords[i], coords[i + 1]});
        return Roi::polygon(name, vertices);
    }
    return Roi::rect(name, coords[0], coords[1], coords[2], coords[3]);
}

std::vector<RoiSpec> parse_roi_file(std::string_view text) {
    TextScanner scanner(text);
    std::vector<std::pair<std::string, std::string>> meta;
    std::string row;
    std::vector<RoiSpec> out;
    while (scanner.next(meta, row)) {
        const auto fields = split_commas(row);
        if (fields.size() < 2 || fields[0].empty())
            fail(errc::parse_error, "line " + std::to_string(scanner.line_no) +
                                        ": expected 'name, coords...'");
        RoiSpec spec;
        spec.name = fields[0];
        std::size_t first_coord = 1;
        if (fields[1] == "poly") {
            spec.is_polygon = true;
            first_coord = 2;
        }
        for (std::size_t i = first_coord; i < fields.size(); ++i)
            spec.coords.push_back(static_cast<int>(
                parse_long(fields[i], scanner.line_no, "coordinate")));
        if (spec.is_polygon) {
            if (spec.coords.size() < 6 || spec.coords.size() % 2 != 0)
                fail(errc::parse_error,
                     "line " + std::to_string(scanner.line_no) +
                         ": polygon needs at least 3 'row, col' pairs");
        } else if (spec.coords.size() != 4) {
            fail(errc::parse_error,
                 "line " + std::to_string(scanner.line_no) +
                     ": rectangle needs 'name, row0, col0, row1, col1'");
        }
        out.push_back(std::move(spec));
    }
    if (out.empty())
        fail(errc::parse_error, "ROI file defines no regions");
    return out;
}

std::vector<RoiSpec> read_roi_file(const std::filesystem::path& path) {
    return parse_roi_file(read_text_file(path));
}

// ---- ROI quality masks ------------------------------------------------------

std::string serialize_roi_masks(const std::vector<RoiReport>& reports) {
    std::string out = "# hypercal roi mask\n";
    out += "# columns: row col keep saturated glint shadow adjacency\n";
    for (const auto& report : reports) {
        out += "# roi: " + report.roi_name + "\n";
        for (std::size_t i = 0; i < report.pixels.size(); ++i) {
            const auto& p = report.pixels[i];
            const auto& f = report.flags[i];
            out += std::to_string(p.row) + " " + std::to_string(p.col) + " " +
                   (f.any() ? "0" : "1") + " " + (f.saturated ? "1" : "0") +
                   " " + (f.glint ? "1" : "0") + " " + (f.shadow ? "1" : "0") +
                   " " + (f.adjacency ? "1" : "0") + "\n";
        }
    }
    return out;
}

std::map<std::string, std::vector<std::pair<PixelCoord, bool>>> parse_roi_masks(
    std::string_view text) {
    std::map<std::string, std::vector<std::pair<PixelCoord, bool>>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string current;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '#') {
            const std::string body = trim(t.substr(1));
            if (body.rfind("roi:", 0) == 0) {
                current = trim(body.substr(4));
                out[current]; // section may stay empty
            }
            continue;
        }
        if (current.empty())
            fail(errc::parse_error, "line " + std::to_string(line_no) +
                                        ": pixel row before any '# roi:' section");
        const auto tokens = split_ws(t);
        if (tokens.size() != 7)
            fail(errc::parse_error, "line " + std::to_string(line_no) +
                                        ": expected 7 columns");
        PixelCoord p{static_cast<int>(parse_long(tokens[0], line_no, "row")),
                     static_cast<int>(parse_long(tokens[1], line_no, "col"))};
        const long keep = parse_long(tokens[2], line_no, "keep flag");
        if (keep != 0 && keep != 1)
            fail(errc::parse_error, "line " + std::to_string(line_no) +
                                        ": keep flag must be 0 or 1");
        out[current].emplace_back(p, keep == 1);
    }
    if (out.empty())
        fail(errc::parse_error, "mask file has no ROI sections");
    return out;
}

std::map<std::string, std::vector<std::pair<PixelCoord, bool>>> read_roi_masks(
    const std::filesystem::path& path) {
    return parse_roi_masks(read_text_file(path));
}

// ---- scene files -------------------------------------------------------------

SceneSpec read_scene_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const std::filesystem::path base_dir = path.parent_path();
    TextScanner scanner(text);
    std::vector<std::pair<std::string, std::string>> meta;
    std::string row;

    if (!scanner.next(meta, row))
        fail(errc::parse_error, "scene file is empty");
    const auto header = split_ws(row);
    if (header.size() != 2)
        fail(errc::parse_error, "line " + std::to_string(scanner.line_no) +
                                    ": expected 'rows cols' header");
    SceneSpec scene;
    scene.rows = static_cast<int>(parse_long(header[0], scanner.line_no, "rows"));
    scene.cols = static_cast<int>(parse_long(header[1], scanner.line_no, "cols"));
    if (scene.rows <= 0 || scene.cols <= 0)
        fail(errc::bad_value, "scene dimensions must be positive");

    // Palette lines are `index name spectrum_path`; the grid starts at the
    // first all-integer line. Material names must not be bare integers.
    std::vector<std::string> grid_rows;
    bool in_grid = false;
    struct PaletteEntry {
        int index;
        std::string name;
        std::filesystem::path path;
    };
    std::vector<PaletteEntry> palette;
    while (scanner.next(meta, row)) {
        const auto tokens = split_ws(row);
        bool is_palette = false;
        if (!in_grid && tokens.size() == 3) {
            long idx = 0;
            const auto& t0 = tokens[0];
            auto [p0, e0] = std::from_chars(t0.data(), t0.data() + t0.size(), idx);
            long dummy = 0;
            const auto& t1 = tokens[1];
            auto [p1, e1] =
                std::from_chars(t1.data(), t1.data() + t1.size(), dummy);
            const bool t0_int = e0 == std::errc() && p0 == t0.data() + t0.size();
            const bool t1_int = e1 == std::errc() && p1 == t1.data() + t1.size();
            if (t0_int && !t1_int)
                is_palette = true;
        }
        if (is_palette) {
            PaletteEntry entry;
            entry.index = static_cast<int>(
                parse_long(tokens[0], scanner.line_no, "material index"));
            entry.name = tokens[1];
            entry.path = tokens[2];
            if (entry.path.is_relative())
                entry.path = base_dir / entry.path;
            palette.push_back(std::move(entry));
        } else {
            in_grid = true;
            grid_rows.push_back(row);
        }
    }
    if (palette.empty())
        fail(errc::parse_error, "scene file defines no materials");
    if (grid_rows.size() != static_cast<std::size_t>(scene.rows))
        fail(errc::size_mismatch,
             "scene grid has " + std::to_string(grid_rows.size()) +
                 " rows, header says " + std::to_string(scene.rows));

    std::sort(palette.begin(), palette.end(),
              [](const auto& a, const auto& b) { return a.index < b.index; });
    for (std::size_t i = 0; i < palette.size(); ++i)
        if (palette[i].index != static_cast<int>(i))
            fail(errc::parse_error,
                 "material indices must be 0..N-1 without gaps");

    for (const auto& entry : palette) {
        SpectrumFileData data = read_spectrum_file(entry.path);
        if (data.spectrum.unit() != Unit::reflectance)
            fail(errc::unit_mismatch, "material spectrum '" +
                                          entry.path.string() +
                                          "' is not reflectance");
        scene.materials.emplace_back(
            entry.name, Spectrum(data.spectrum.grid(), data.spectrum.values(),
                                 Unit::reflectance));
    }

    scene.material_map.reserve(scene.pixel_count());
    for (std::size_t r = 0; r < grid_rows.size(); ++r) {
        const auto tokens = split_ws(grid_rows[r]);
        if (tokens.size() != static_cast<std::size_t>(scene.cols))
            fail(errc::size_mismatch,
                 "scene grid row " + std::to_string(r) + " has " +
                     std::to_string(tokens.size()) + " columns, header says " +
                     std::to_string(scene.cols));
        for (const auto& t : tokens)
            scene.material_map.push_back(
                static_cast<int>(parse_long(t, 0, "material index")));
    }
    scene.validate();
    return scene;
}

// ---- sweep manifests ----------------------------------------------------------

std::vector<SweepManifestEntry> parse_sweep_manifest(
    std::string_view text, const std::filesystem::path& base_dir) {
    TextScanner scanner(text);
    std::vector<std::pair<std::string, std::string>> meta;
    std::string row;
    std::vector<SweepManifestEntry> out;
    while (scanner.next(meta, row)) {
        const auto fields = split_commas(row);
        if (fields.size() != 5)
            fail(errc::parse_error,
                 "line " + std::to_string(scanner.line_no) +
                     ": expected 'lambda_nm, frame_path, flux_ref_w, "
                     "exposure_ref_s, bandwidth_ref_nm'");
        SweepManifestEntry entry;
        entry.lambda_nm = parse_double(fields[0], scanner.line_no, "wavelength");
        entry.frame_path = fields[1];
        if (entry.frame_path.is_relative() && !base_dir.empty())
            entry.frame_path = base_dir / entry.frame_path;
        entry.flux_ref_w = parse_double(fields[2], scanner.line_no, "flux");
        entry.exposure_ref_s =
            parse_double(fields[3], scanner.line_no, "exposure");
        entry.bandwidth_ref_nm =
            parse_double(fields[4], scanner.line_no, "bandwidth");
        out.push_back(std::move(entry));
    }
    if (out.empty())
        fail(errc::parse_error, "sweep manifest has no steps");
    return out;
}

std::vector<SweepManifestEntry> read_sweep_manifest(
    const std::filesystem::path& path) {
    return parse_sweep_manifest(read_text_file(path), path.parent_path());
}

} // namespace hypercal::io
