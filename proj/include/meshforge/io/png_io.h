#pragma once

#include <string>
#include <vector>

#include "meshforge/core/image.h"

namespace meshforge {

// 8-bit PNG, 1 (gray) or 3 (RGB) channels. Other layouts are rejected on
// read; alpha is stripped.
ImageU8 readPng(const std::string& path);
void writePng(const std::string& path, const ImageU8& image);

// In-memory encode used for embedding the same bytes in binary glTF.
std::vector<std::uint8_t> encodePng(const ImageU8& image);
ImageU8 decodePng(const std::uint8_t* bytes, std::size_t size);

}  // namespace meshforge
