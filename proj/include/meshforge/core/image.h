#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace meshforge {

// Row-major, interleaved-channel image. Pixel (x, y) with y = 0 at the top row.
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, int c, T fill = T{}) : width(w), height(h), channels(c) {
    data.assign(static_cast<std::size_t>(w) * h * c, fill);
  }

  bool empty() const { return data.empty(); }
  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  T& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }
  bool inside(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

  // Bilinear sample at continuous pixel coordinates where (0, 0) is the
  // center of the top-left texel. Clamps to the border.
  double bilinear(double x, double y, int c) const {
    double cx = std::clamp(x, 0.0, static_cast<double>(width - 1));
    double cy = std::clamp(y, 0.0, static_cast<double>(height - 1));
    int x0 = static_cast<int>(std::floor(cx));
    int y0 = static_cast<int>(std::floor(cy));
    int x1 = std::min(x0 + 1, width - 1);
    int y1 = std::min(y0 + 1, height - 1);
    double fx = cx - x0, fy = cy - y0;
    double v00 = static_cast<double>(at(x0, y0, c));
    double v10 = static_cast<double>(at(x1, y0, c));
    double v01 = static_cast<double>(at(x0, y1, c));
    double v11 = static_cast<double>(at(x1, y1, c));
    return (v00 * (1 - fx) + v10 * fx) * (1 - fy) + (v01 * (1 - fx) + v11 * fx) * fy;
  }
};

using ImageF = Image<float>;
using ImageU8 = Image<std::uint8_t>;

}  // namespace meshforge
