#include "meshforge/io/png_io.h"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>

#include "meshforge/core/error.h"

namespace meshforge {

namespace {

struct ByteSink {
  std::vector<std::uint8_t>* out;
};

void sinkWrite(png_structp png, png_bytep data, png_size_t len) {
  auto* sink = static_cast<ByteSink*>(png_get_io_ptr(png));
  sink->out->insert(sink->out->end(), data, data + len);
}

void sinkFlush(png_structp) {}

struct ByteSource {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void sourceRead(png_structp png, png_bytep out, png_size_t len) {
  auto* src = static_cast<ByteSource*>(png_get_io_ptr(png));
  if (src->pos + len > src->size) png_error(png, "png read past end of buffer");
  std::memcpy(out, src->data + src->pos, len);
  src->pos += len;
}

void encodeTo(png_structp png, png_infop info, const ImageU8& image) {
  int colorType = image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, image.width, image.height, 8, colorType, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y)
    rows[y] = const_cast<png_bytep>(image.data.data() + image.index(0, y));
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
}

ImageU8 decodeFrom(png_structp png, png_infop info) {
  png_read_info(png, info);
  png_uint_32 width = png_get_image_width(png, info);
  png_uint_32 height = png_get_image_height(png, info);
  int depth = png_get_bit_depth(png, info);
  int colorType = png_get_color_type(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (colorType == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (colorType == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (colorType & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3)
    throw Error(ErrorCode::IoError, "png must decode to gray or rgb");

  ImageU8 image(static_cast<int>(width), static_cast<int>(height), channels);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = image.data.data() + image.index(0, y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return image;
}

void checkWritable(const ImageU8& image) {
  if (image.empty() || (image.channels != 1 && image.channels != 3))
    throw Error(ErrorCode::IoError, "png writer requires non-empty gray or rgb image");
}

}  // namespace

std::vector<std::uint8_t> encodePng(const ImageU8& image) {
  checkWritable(image);
  std::vector<std::uint8_t> bytes;
  ByteSink sink{&bytes};

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::IoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::IoError, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoError, "png encode failed");
  }
  png_set_write_fn(png, &sink, sinkWrite, sinkFlush);
  encodeTo(png, info, image);
  png_destroy_write_struct(&png, &info);
  return bytes;
}

ImageU8 decodePng(const std::uint8_t* bytes, std::size_t size) {
  ByteSource source{bytes, size, 0};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::IoError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::IoError, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::IoError, "png decode failed");
  }
  png_set_read_fn(png, &source, sourceRead);
  ImageU8 image = decodeFrom(png, info);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void writePng(const std::string& path, const ImageU8& image) {
  std::vector<std::uint8_t> bytes = encodePng(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

ImageU8 readPng(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.empty()) throw Error(ErrorCode::IoError, "empty png file " + path);
  return decodePng(bytes.data(), bytes.size());
}

}  // namespace meshforge
