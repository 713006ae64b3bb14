#include "meshforge/io/raster_io.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "meshforge/core/error.h"

// All on-disk integers and floats are little endian; the build targets
// little-endian hosts only.
static_assert(std::endian::native == std::endian::little);

namespace meshforge {

namespace {

void writeExact(std::ofstream& out, const void* data, std::size_t bytes, const std::string& path) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

void readExact(std::ifstream& in, void* data, std::size_t bytes, const std::string& path) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (in.gcount() != static_cast<std::streamsize>(bytes))
    throw Error(ErrorCode::IoError, "truncated file " + path);
}

}  // namespace

void writeRasterF32(const std::string& path, const ImageF& image) {
  if (image.empty()) throw Error(ErrorCode::IoError, "refusing to write empty raster " + path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  std::int32_t header[4] = {kRasterMagic, image.width, image.height, image.channels};
  writeExact(out, header, sizeof(header), path);
  writeExact(out, image.data.data(), image.data.size() * sizeof(float), path);
}

ImageF readRasterF32(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::int32_t header[4];
  readExact(in, header, sizeof(header), path);
  if (header[0] != kRasterMagic) throw Error(ErrorCode::IoError, "bad raster magic in " + path);
  if (header[1] <= 0 || header[2] <= 0 || header[3] <= 0 || header[3] > 16)
    throw Error(ErrorCode::IoError, "bad raster dimensions in " + path);
  ImageF image(header[1], header[2], header[3]);
  readExact(in, image.data.data(), image.data.size() * sizeof(float), path);
  return image;
}

void writeGridF32(const std::string& path, const GridFile& grid) {
  std::size_t expected = static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz;
  if (expected == 0 || grid.values.size() != expected)
    throw Error(ErrorCode::ShapeMismatch, "grid value count does not match dimensions");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  std::int32_t header[8] = {kGridMagic, kGridVersion, grid.nx, grid.ny, grid.nz, 0, 0, 0};
  writeExact(out, header, sizeof(header), path);
  writeExact(out, grid.values.data(), grid.values.size() * sizeof(float), path);
}

GridFile readGridF32(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::int32_t header[8];
  readExact(in, header, sizeof(header), path);
  if (header[0] != kGridMagic || header[1] != kGridVersion)
    throw Error(ErrorCode::IoError, "bad grid header in " + path);
  if (header[2] <= 0 || header[3] <= 0 || header[4] <= 0)
    throw Error(ErrorCode::IoError, "bad grid dimensions in " + path);
  GridFile grid;
  grid.nx = header[2];
  grid.ny = header[3];
  grid.nz = header[4];
  grid.values.resize(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz);
  readExact(in, grid.values.data(), grid.values.size() * sizeof(float), path);
  return grid;
}

}  // namespace meshforge
