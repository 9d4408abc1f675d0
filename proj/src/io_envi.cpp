#include "hypercal/io/envi.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

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

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
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

long parse_int(const std::string& token, int line, const char* what) {
    long value = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        fail(errc::parse_error, "line " + std::to_string(line) + ": bad " +
                                    what + " '" + token + "'");
    return value;
}

std::vector<double> parse_list(const std::string& body, int line) {
    std::vector<double> values;
    std::string token;
    for (char c : body) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            if (!token.empty()) {
                values.push_back(parse_double(token, line, "list entry"));
                token.clear();
            }
        } else {
            token += c;
        }
    }
    if (!token.empty())
        values.push_back(parse_double(token, line, "list entry"));
    if (values.empty())
        fail(errc::malformed_list,
             "line " + std::to_string(line) + ": empty { } list");
    return values;
}

std::size_t bytes_per_sample(int data_type) {
    switch (data_type) {
    case 4: return 4;
    case 5: return 8;
    case 12: return 2;
    default:
        fail(errc::unsupported_data_type,
             "ENVI data type " + std::to_string(data_type) +
                 " is not supported (use 4, 5, or 12)");
    }
}

// Sample offset within the payload for a given interleave.
std::size_t sample_offset(Interleave il, std::size_t line, std::size_t samp,
                          std::size_t band, std::size_t lines,
                          std::size_t samples, std::size_t bands) {
    (void)lines;
    switch (il) {
    case Interleave::bsq:
        return (band * lines + line) * samples + samp;
    case Interleave::bil:
        return (line * bands + band) * samples + samp;
    case Interleave::bip:
        return (line * samples + samp) * bands + band;
    }
    return 0;
}

std::uint64_t load_word(const std::uint8_t* p, std::size_t width,
                        int byte_order) {
    std::uint64_t w = 0;
    if (byte_order == 0) {
        for (std::size_t i = 0; i < width; ++i)
            w |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    } else {
        for (std::size_t i = 0; i < width; ++i)
            w = (w << 8) | p[i];
    }
    return w;
}

void store_word(std::uint8_t* p, std::uint64_t w, std::size_t width,
                int byte_order) {
    if (byte_order == 0) {
        for (std::size_t i = 0; i < width; ++i)
            p[i] = static_cast<std::uint8_t>(w >> (8 * i));
    } else {
        for (std::size_t i = 0; i < width; ++i)
            p[i] = static_cast<std::uint8_t>(w >> (8 * (width - 1 - i)));
    }
}

double decode_sample(const std::uint8_t* p, int data_type, int byte_order) {
    switch (data_type) {
    case 4: {
        const std::uint32_t w =
            static_cast<std::uint32_t>(load_word(p, 4, byte_order));
        float f;
        std::memcpy(&f, &w, sizeof f);
        return static_cast<double>(f);
    }
    case 5: {
        const std::uint64_t w = load_word(p, 8, byte_order);
        double d;
        std::memcpy(&d, &w, sizeof d);
        return d;
    }
    default: // 12
        return static_cast<double>(load_word(p, 2, byte_order));
    }
}

void encode_sample(std::uint8_t* p, double value, int data_type,
                   int byte_order) {
    switch (data_type) {
    case 4: {
        const float f = static_cast<float>(value);
        std::uint32_t w;
        std::memcpy(&w, &f, sizeof w);
        store_word(p, w, 4, byte_order);
        break;
    }
    case 5: {
        std::uint64_t w;
        std::memcpy(&w, &value, sizeof w);
        store_word(p, w, 8, byte_order);
        break;
    }
    default: { // 12
        if (value < 0.0 || value > 65535.0 || value != std::nearbyint(value))
            fail(errc::bad_value,
                 "sample " + std::to_string(value) +
                     " cannot be stored as an unsigned 16-bit count");
        store_word(p, static_cast<std::uint64_t>(value), 2, byte_order);
        break;
    }
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

const char* interleave_tag(Interleave il) {
    switch (il) {
    case Interleave::bil: return "bil";
    case Interleave::bsq: return "bsq";
    case Interleave::bip: return "bip";
    }
    return "bil";
}

Interleave interleave_from_tag(std::string tag) {
    tag = lower(std::move(tag));
    if (tag == "bil") return Interleave::bil;
    if (tag == "bsq") return Interleave::bsq;
    if (tag == "bip") return Interleave::bip;
    fail(errc::parse_error, "unknown interleave '" + tag + "'");
}

EnviHeader parse_envi_header(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;

    // Magic token on the first non-blank line.
    bool magic = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (t == "ENVI")
            magic = true;
        break;
    }
    if (!magic)
        fail(errc::bad_magic, "missing ENVI magic on line 1");

    EnviHeader h;
    bool saw_samples = false, saw_lines = false, saw_bands = false;
    bool saw_interleave = false, saw_data_type = false;

    while (std::getline(in, line)) {
        ++line_no;
        const int key_line = line_no;
        std::string work = line;
        if (trim(work).empty())
            continue;
        const auto eq = work.find('=');
        if (eq == std::string::npos)
            fail(errc::parse_error,
                 "line " + std::to_string(key_line) + ": expected 'key = value'");
        const std::string key = lower(trim(work.substr(0, eq)));
        std::string value = trim(work.substr(eq + 1));
        if (key.empty())
            fail(errc::parse_error,
                 "line " + std::to_string(key_line) + ": empty key");

        if (!value.empty() && value.front() == '{') {
            // Collect until the closing brace.
            while (value.find('}') == std::string::npos) {
                if (!std::getline(in, line))
                    fail(errc::malformed_list,
                         "line " + std::to_string(key_line) +
                             ": unterminated { } list for '" + key + "'");
                ++line_no;
                value += ' ';
                value += trim(line);
            }
            const auto close = value.find('}');
            if (trim(value.substr(close + 1)).size() > 0)
                fail(errc::malformed_list,
                     "line " + std::to_string(key_line) +
                         ": trailing text after } in '" + key + "'");
        }

        if (key == "samples") {
            h.samples = static_cast<int>(parse_int(value, key_line, "samples"));
            saw_samples = true;
        } else if (key == "lines") {
            h.lines = static_cast<int>(parse_int(value, key_line, "lines"));
            saw_lines = true;
        } else if (key == "bands") {
            h.bands = static_cast<int>(parse_int(value, key_line, "bands"));
            saw_bands = true;
        } else if (key == "data type") {
            h.data_type =
                static_cast<int>(parse_int(value, key_line, "data type"));
            saw_data_type = true;
        } else if (key == "interleave") {
            h.interleave = interleave_from_tag(value);
            saw_interleave = true;
        } else if (key == "byte order") {
            const long bo = parse_int(value, key_line, "byte order");
            if (bo != 0 && bo != 1)
                fail(errc::parse_error, "line " + std::to_string(key_line) +
                                            ": byte order must be 0 or 1");
            h.byte_order = static_cast<int>(bo);
        } else if (key == "header offset") {
            const long off = parse_int(value, key_line, "header offset");
            if (off < 0)
                fail(errc::parse_error, "line " + std::to_string(key_line) +
                                            ": negative header offset");
            h.header_offset = static_cast<int>(off);
        } else if (key == "wavelength") {
            if (value.empty() || value.front() != '{' || value.back() != '}')
                fail(errc::malformed_list,
                     "line " + std::to_string(key_line) +
                         ": wavelength must be a { } list");
            h.wavelengths_nm =
                parse_list(value.substr(1, value.size() - 2), key_line);
        } else if (key == "data units") {
            h.data_units = value;
        } else {
            h.extra.emplace_back(key, value);
        }
    }

    if (!saw_samples)
        fail(errc::missing_key, "header is missing required key 'samples'");
    if (!saw_lines)
        fail(errc::missing_key, "header is missing required key 'lines'");
    if (!saw_bands)
        fail(errc::missing_key, "header is missing required key 'bands'");
    if (!saw_interleave)
        fail(errc::missing_key, "header is missing required key 'interleave'");
    if (!saw_data_type)
        fail(errc::missing_key, "header is missing required key 'data type'");
    if (h.samples <= 0 || h.lines <= 0 || h.bands <= 0)
        fail(errc::bad_value, "samples, lines, and bands must be positive");
    bytes_per_sample(h.data_type); // rejects unsupported codes
    if (h.wavelengths_nm &&
        h.wavelengths_nm->size() != static_cast<std::size_t>(h.bands))
        fail(errc::size_mismatch,
             "wavelength list has " + std::to_string(h.wavelengths_nm->size()) +
                 " entries for " + std::to_string(h.bands) + " bands");
    return h;
}

std::string serialize_envi_header(const EnviHeader& h) {
    std::string out = "ENVI\n";
    out += "samples = " + std::to_string(h.samples) + "\n";
    out += "lines = " + std::to_string(h.lines) + "\n";
    out += "bands = " + std::to_string(h.bands) + "\n";
    out += "header offset = " + std::to_string(h.header_offset) + "\n";
    out += "data type = " + std::to_string(h.data_type) + "\n";
    out += "interleave = " + std::string(interleave_tag(h.interleave)) + "\n";
    out += "byte order = " + std::to_string(h.byte_order) + "\n";
    if (h.data_units)
        out += "data units = " + *h.data_units + "\n";
    if (h.wavelengths_nm) {
        out += "wavelength = {";
        for (std::size_t i = 0; i < h.wavelengths_nm->size(); ++i) {
            if (i)
                out += ", ";
            out += format_double((*h.wavelengths_nm)[i]);
        }
        out += "}\n";
    }
    for (const auto& [key, value] : h.extra)
        out += key + " = " + value + "\n";
    return out;
}

HyperCube decode_cube(const EnviHeader& h, std::span<const std::uint8_t> payload,
                      double reflectance_clip_max) {
    const std::size_t width = bytes_per_sample(h.data_type);
    const std::size_t lines = static_cast<std::size_t>(h.lines);
    const std::size_t samples = static_cast<std::size_t>(h.samples);
    const std::size_t bands = static_cast<std::size_t>(h.bands);
    const std::size_t offset = static_cast<std::size_t>(h.header_offset);
    const std::size_t expected = lines * samples * bands * width + offset;
    if (payload.size() != expected)
        fail(errc::size_mismatch,
             "payload holds " + std::to_string(payload.size()) +
                 " bytes, expected " + std::to_string(expected));
    if (!h.wavelengths_nm)
        fail(errc::missing_key, "header has no wavelength list");

    Unit unit = Unit::digital_count;
    if (h.data_units) {
        unit = unit_from_tag(*h.data_units);
    } else if (h.data_type != 12) {
        fail(errc::missing_key,
             "float cubes need a 'data units' key naming the unit");
    }

    const std::uint8_t* base = payload.data() + offset;
    std::vector<double> data(lines * samples * bands);
    for (std::size_t l = 0; l < lines; ++l)
        for (std::size_t s = 0; s < samples; ++s)
            for (std::size_t b = 0; b < bands; ++b) {
                const std::size_t src =
                    sample_offset(h.interleave, l, s, b, lines, samples, bands);
                data[(l * samples + s) * bands + b] = decode_sample(
                    base + src * width, h.data_type, h.byte_order);
            }
    return HyperCube(static_cast<int>(lines), static_cast<int>(samples),
                     WavelengthGrid(*h.wavelengths_nm), unit, std::move(data),
                     reflectance_clip_max);
}

std::pair<EnviHeader, std::vector<std::uint8_t>> encode_cube(
    const HyperCube& cube, Interleave interleave, int byte_order) {
    if (byte_order != 0 && byte_order != 1)
        fail(errc::bad_value, "byte order must be 0 or 1");
    EnviHeader h;
    h.samples = cube.cols();
    h.lines = cube.rows();
    h.bands = static_cast<int>(cube.bands());
    h.data_type = cube.unit() == Unit::digital_count ? 12 : 5;
    h.interleave = interleave;
    h.byte_order = byte_order;
    h.wavelengths_nm = cube.grid().values();
    h.data_units = unit_tag(cube.unit());

    const std::size_t width = bytes_per_sample(h.data_type);
    const std::size_t lines = static_cast<std::size_t>(h.lines);
    const std::size_t samples = static_cast<std::size_t>(h.samples);
    const std::size_t bands = static_cast<std::size_t>(h.bands);
    std::vector<std::uint8_t> payload(lines * samples * bands * width);
    for (std::size_t l = 0; l < lines; ++l)
        for (std::size_t s = 0; s < samples; ++s)
            for (std::size_t b = 0; b < bands; ++b) {
                const std::size_t dst =
                    sample_offset(interleave, l, s, b, lines, samples, bands);
                encode_sample(payload.data() + dst * width,
                              cube.data()[(l * samples + s) * bands + b],
                              h.data_type, byte_order);
            }
    return {std::move(h), std::move(payload)};
}

namespace {

std::filesystem::path header_path(const std::filesystem::path& path) {
    if (path.extension() == ".hdr")
        return path;
    std::filesystem::path p = path;
    p += ".hdr";
    return p;
}

std::filesystem::path raw_path(const std::filesystem::path& path) {
    if (path.extension() == ".hdr") {
        std::filesystem::path p = path;
        p.replace_extension(".img");
        return p;
    }
    if (path.extension() == ".img")
        return path;
    std::filesystem::path p = path;
    p += ".img";
    return p;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(errc::io_error, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(errc::io_error, "cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

} // namespace

HyperCube read_cube_file(const std::filesystem::path& path,
                         double reflectance_clip_max) {
    std::filesystem::path hdr = path;
    std::filesystem::path raw = path;
    if (path.extension() == ".hdr") {
        raw = raw_path(path);
    } else if (path.extension() == ".img") {
        hdr = header_path(path.parent_path() / path.stem());
    } else {
        hdr = header_path(path);
        raw = raw_path(path);
    }
    const EnviHeader h = parse_envi_header(read_text_file(hdr));
    const std::vector<std::uint8_t> payload = read_binary_file(raw);
    return decode_cube(h, payload, reflectance_clip_max);
}

void write_cube_file(const HyperCube& cube, const std::filesystem::path& base,
                     Interleave interleave, int byte_order) {
    auto [h, payload] = encode_cube(cube, interleave, byte_order);
    const std::filesystem::path hdr = header_path(base);
    const std::filesystem::path raw = raw_path(base);
    {
        std::ofstream out(hdr, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(errc::io_error, "cannot write '" + hdr.string() + "'");
        const std::string text = serialize_envi_header(h);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
    }
    {
        std::ofstream out(raw, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(errc::io_error, "cannot write '" + raw.string() + "'");
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size()));
    }
}

} // namespace hypercal::io
