#ifndef HYPERCAL_IO_ENVI_HPP
#define HYPERCAL_IO_ENVI_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypercal/cube.hpp"

namespace hypercal::io {

enum class Interleave { bil, bsq, bip };

const char* interleave_tag(Interleave il);
Interleave interleave_from_tag(std::string tag);

// ENVI-style header. Unknown keys are preserved verbatim, in order, so
// serialize(parse(text)) keeps foreign metadata intact.
struct EnviHeader {
    int samples = 0; // cross-track pixels (cube cols)
    int lines = 0;   // along-track pixels (cube rows)
    int bands = 0;
    int data_type = 12; // 4 = float32, 5 = float64, 12 = uint16
    Interleave interleave = Interleave::bil;
    int byte_order = 0; // 0 little endian, 1 big endian
    int header_offset = 0;
    std::optional<std::vector<double>> wavelengths_nm;
    std::optional<std::string> data_units;
    std::vector<std::pair<std::string, std::string>> extra;

    bool operator==(const EnviHeader&) const = default;
};

EnviHeader parse_envi_header(std::string_view text);
std::string serialize_envi_header(const EnviHeader& header);

// Payload decoding/encoding between the on-disk interleave and the
// in-memory band-interleaved-by-pixel layout.
HyperCube decode_cube(const EnviHeader& header,
                      std::span<const std::uint8_t> payload,
                      double reflectance_clip_max = 1.5);
std::pair<EnviHeader, std::vector<std::uint8_t>> encode_cube(
    const HyperCube& cube, Interleave interleave = Interleave::bil,
    int byte_order = 0);

// File pair <base>.hdr / <base>.img. Accepts either path on read.
HyperCube read_cube_file(const std::filesystem::path& path,
                         double reflectance_clip_max = 1.5);
void write_cube_file(const HyperCube& cube, const std::filesystem::path& base,
                     Interleave interleave = Interleave::bil,
                     int byte_order = 0);

} // namespace hypercal::io

#endif
