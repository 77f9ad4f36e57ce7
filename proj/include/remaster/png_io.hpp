#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "remaster/image.hpp"

namespace remaster {

/// Reads an 8-bit PNG as RGB (channels = 3) or greyscale (channels = 1),
/// values scaled to [0, 1]. Alpha is dropped. Throws DataError.
Image load_png(const std::filesystem::path& path, int channels = 3);

/// Writes a 1- or 3-channel image as an 8-bit PNG, clamped and rounded.
void save_png(const std::filesystem::path& path, const Image& img);

/// Sorted list of *.png files in a directory (lexicographic).
std::vector<std::filesystem::path> list_pngs(const std::filesystem::path& dir);

/// frame_0000001.png style name for a 0-based frame index.
std::string frame_name(std::size_t index);

}  // namespace remaster
