#pragma once

#include <string>
#include <vector>

#include "meshforge/core/image.h"

namespace meshforge {

// Raw float raster: little-endian int32 header {magic, width, height,
// channels} followed by width*height*channels little-endian f32 values in
// row-major interleaved order.
inline constexpr std::int32_t kRasterMagic = 0x46333252;  // "R2 3F"

void writeRasterF32(const std::string& path, const ImageF& image);
ImageF readRasterF32(const std::string& path);

// Raw float grid: little-endian int32 header {magic, version, nx, ny, nz,
// 0, 0, 0} followed by nx*ny*nz f32 values, x varying fastest.
inline constexpr std::int32_t kGridMagic = 0x44473346;  // "F3GD"
inline constexpr std::int32_t kGridVersion = 1;

struct GridFile {
  int nx = 0, ny = 0, nz = 0;
  std::vector<float> values;  // index = x + nx * (y + ny * z)
};

void writeGridF32(const std::string& path, const GridFile& grid);
GridFile readGridF32(const std::string& path);

}  // namespace meshforge
