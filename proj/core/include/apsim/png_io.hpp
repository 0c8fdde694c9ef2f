#pragma once

#include <filesystem>

#include "apsim/image.hpp"

namespace apsim {

struct PngInfo {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;
};

// Reads only the IHDR chunk.
PngInfo read_png_info(const std::filesystem::path& path);

// Gray and gray+alpha inputs are expanded to RGB; alpha is dropped.
RgbImage read_rgb_png(const std::filesystem::path& path);
void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);

// Real-valued read in 8-bit gray units: 16-bit files are scaled by 255/65535,
// so a 16-bit response frame keeps sub-gray-level precision.
PlanarImage read_planar_png(const std::filesystem::path& path);

// 16-bit single-channel depth map.
DepthMap read_depth_png(const std::filesystem::path& path, double depth_scale = 0.01);
void write_depth_png(const std::filesystem::path& path, const DepthMap& depth);

}  // namespace apsim
