#pragma once

// Plain-text portable graymap (P2) reading and writing.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace twinbeam {

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint32_t maxval = 255;
    // Row-major, top row first.
    std::vector<std::uint32_t> pixels;
};

// Throws ParseError with line/column context on malformed input.
GrayImage parse_pgm(std::string_view text, const std::string& source = "<pgm>");
GrayImage read_pgm(const std::filesystem::path& path);

// "P2\n<w> <h>\n<maxval>\n" then one line of space-separated values per row.
std::string format_pgm(const GrayImage& image);

std::string read_text_file(const std::filesystem::path& path);
// Throws IoError naming the path.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace twinbeam
