#include "meshforge/texfuse/mips.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "meshforge/core/error.h"

namespace meshforge {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  double px = M_PI * x;
  return std::sin(px) / px;
}

// Factor-2 reduction kernel. An output center sits at offset 0.5 between two
// input centers, so the 8 taps at integer offsets -3..4 sample the Lanczos-2
// window at (d - 0.5) / 2, which covers its full support.
std::array<double, 8> reductionKernel() {
  std::array<double, 8> k{};
  double sum = 0.0;
  for (int d = -3; d <= 4; ++d) {
    double t = (d - 0.5) / 2.0;
    k[d + 3] = sinc(t) * sinc(t / 2.0);
    sum += k[d + 3];
  }
  for (double& w : k) w /= sum;
  return k;
}

ImageF halveX(const ImageF& in) {
  static const std::array<double, 8> kernel = reductionKernel();
  int ow = std::max(1, (in.width + 1) / 2);
  ImageF out(ow, in.height, in.channels);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < ow; ++x)
      for (int c = 0; c < in.channels; ++c) {
        double acc = 0.0;
        for (int d = -3; d <= 4; ++d) {
          int sx = std::clamp(2 * x + d, 0, in.width - 1);
          acc += kernel[d + 3] * in.at(sx, y, c);
        }
        out.at(x, y, c) = static_cast<float>(acc);
      }
  return out;
}

ImageF halveY(const ImageF& in) {
  static const std::array<double, 8> kernel = reductionKernel();
  int oh = std::max(1, (in.height + 1) / 2);
  ImageF out(in.width, oh, in.channels);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < in.width; ++x)
      for (int c = 0; c < in.channels; ++c) {
        double acc = 0.0;
        for (int d = -3; d <= 4; ++d) {
          int sy = std::clamp(2 * y + d, 0, in.height - 1);
          acc += kernel[d + 3] * in.at(x, sy, c);
        }
        out.at(x, y, c) = static_cast<float>(acc);
      }
  return out;
}

// out = in + strength * (in - blur3x3(in)), binomial blur, edge-clamped.
ImageF unsharp(const ImageF& in, float strength) {
  if (strength == 0.0f) return in;
  static const double w[3] = {0.25, 0.5, 0.25};
  ImageF blurX(in.width, in.height, in.channels);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x)
      for (int c = 0; c < in.channels; ++c) {
        double acc = 0.0;
        for (int d = -1; d <= 1; ++d)
          acc += w[d + 1] * in.at(std::clamp(x + d, 0, in.width - 1), y, c);
        blurX.at(x, y, c) = static_cast<float>(acc);
      }
  ImageF out(in.width, in.height, in.channels);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x)
      for (int c = 0; c < in.channels; ++c) {
        double blur = 0.0;
        for (int d = -1; d <= 1; ++d)
          blur += w[d + 1] * blurX.at(x, std::clamp(y + d, 0, in.height - 1), c);
        double v = in.at(x, y, c);
        out.at(x, y, c) = static_cast<float>(v + strength * (v - blur));
      }
  return out;
}

}  // namespace

std::vector<ImageF> buildMips(const ImageF& base, int levels, float sharpenStrength) {
  if (base.width < 1 || base.height < 1 || base.channels < 1)
    throw Error(ErrorCode::InvalidConfig, "mip base image is empty");
  if (levels < 1) throw Error(ErrorCode::InvalidConfig, "mip chain needs >= 1 level");
  if (!(sharpenStrength >= 0.0f))
    throw Error(ErrorCode::InvalidConfig, "sharpen strength must be >= 0");

  std::vector<ImageF> chain;
  chain.reserve(levels);
  chain.push_back(base);
  while (static_cast<int>(chain.size()) < levels) {
    const ImageF& cur = chain.back();
    if (cur.width == 1 && cur.height == 1) break;
    chain.push_back(unsharp(halveY(halveX(cur)), sharpenStrength));
  }
  return chain;
}

}  // namespace meshforge
