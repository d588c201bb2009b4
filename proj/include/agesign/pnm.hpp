#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "agesign/raster.hpp"

namespace agesign {

using AnyImage = std::variant<ColorImage, GrayImage>;

/// Parses binary P5/P6 with maxval 255. Header tokens may be separated by
/// any whitespace or comments; exactly one whitespace byte precedes the payload.
AnyImage read_pnm(std::span<const std::uint8_t> bytes);

/// Canonical serialization: "P6\n<w> <h>\n255\n" followed by the payload.
std::vector<std::uint8_t> write_pnm(const ColorImage& img);
std::vector<std::uint8_t> write_pnm(const GrayImage& img);

AnyImage load_pnm(const std::filesystem::path& path);
ColorImage load_color(const std::filesystem::path& path);
void save_pnm(const std::filesystem::path& path, const ColorImage& img);
void save_pnm(const std::filesystem::path& path, const GrayImage& img);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace agesign
