#include "meshforge/texfuse/fuse.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meshforge/core/error.h"
#include "meshforge/texfuse/mips.h"

namespace meshforge {

namespace {

// Pixel-center coordinates of a world point in a view image.
Eigen::Vector2d imagePixel(const OrthoCamera& cam, const Eigen::Vector3d& uv) {
  double s = cam.resolution / (2.0 * cam.halfExtent);
  return {(uv.x() + cam.halfExtent) * s - 0.5, (cam.halfExtent - uv.y()) * s - 0.5};
}

// Trilinear fetch: bilinear within the two straddling mip levels, linear
// across them. `px, py` are full-resolution pixel-center coordinates.
double sampleTrilinear(const std::vector<ImageF>& mips, double px, double py,
                       double mip, int c) {
  int last = static_cast<int>(mips.size()) - 1;
  double m = std::clamp(mip, 0.0, static_cast<double>(last));
  int l0 = static_cast<int>(std::floor(m));
  int l1 = std::min(l0 + 1, last);
  double f = m - l0;
  auto level = [&](int l) {
    double scale = std::ldexp(1.0, -l);  // 1 / 2^l
    return mips[l].bilinear((px + 0.5) * scale - 0.5, (py + 0.5) * scale - 0.5, c);
  };
  double v0 = level(l0);
  return f == 0.0 ? v0 : (1.0 - f) * v0 + f * level(l1);
}

}  // namespace

TexelFootprint footprintFromJacobian(const Eigen::Matrix2d& jacobian) {
  TexelFootprint fp;
  fp.jacobian = jacobian;

  // Singular values via the eigen-decomposition of J J^T (closed form, 2x2).
  Eigen::Matrix2d m = jacobian * jacobian.transpose();
  double mean = 0.5 * (m(0, 0) + m(1, 1));
  double disc = std::hypot(0.5 * (m(0, 0) - m(1, 1)), m(0, 1));
  double s1 = std::sqrt(std::max(0.0, mean + disc));
  double s2 = std::sqrt(std::max(0.0, mean - disc));

  constexpr double kTiny = 1e-12;
  if (!(s1 > kTiny)) return fp;  // collapsed projection: one full-res tap

  Eigen::Vector2d axis(m(0, 1), mean + disc - m(0, 0));
  Eigen::Vector2d alt(mean + disc - m(1, 1), m(0, 1));
  if (alt.squaredNorm() > axis.squaredNorm()) axis = alt;
  fp.majorAxis = axis.squaredNorm() > 0.0 ? axis.normalized() : Eigen::Vector2d::UnitX();
  fp.majorLength = s1;
  fp.minorLength = s2;

  double ratio = s1 / std::max(s2, kTiny);
  fp.taps = static_cast<int>(std::clamp(std::ceil(ratio), 1.0, 8.0));
  double capped = std::min(ratio, 8.0);
  fp.mip = std::max(0.0, std::log2(std::max(s2, kTiny)) - 0.5 + 0.5 * std::log2(capped));
  return fp;
}

std::vector<std::uint8_t> edgeMask(const RenderedView& view, double bboxDiagonal,
                                   double threshold) {
  int w = view.position.width, h = view.position.height;
  if (w < 1 || h < 1 || view.face.width != w || view.face.height != h)
    throw Error(ErrorCode::InvalidConfig, "edge mask needs a rendered view");
  if (!(bboxDiagonal > 0.0) || !(threshold > 0.0))
    throw Error(ErrorCode::InvalidConfig, "edge mask scale must be positive");

  double limit2 = threshold * bboxDiagonal;
  limit2 *= limit2;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bool fg = view.foreground(x, y);
      Eigen::Vector3d p(view.position.at(x, y, 0), view.position.at(x, y, 1),
                        view.position.at(x, y, 2));
      bool masked = false;
      for (int dy = -1; dy <= 1 && !masked; ++dy)
        for (int dx = -1; dx <= 1 && !masked; ++dx) {
          if (dx == 0 && dy == 0) continue;
          int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          bool nfg = view.foreground(nx, ny);
          if (fg != nfg) {
            masked = true;  // either side of the silhouette ring
          } else if (fg) {
            Eigen::Vector3d q(view.position.at(nx, ny, 0), view.position.at(nx, ny, 1),
                              view.position.at(nx, ny, 2));
            masked = (p - q).squaredNorm() > limit2;
          }
        }
      if (masked) mask[static_cast<std::size_t>(y) * w + x] = 1;
    }
  return mask;
}

PartialAtlas backprojectView(const GBuffer& geom, const OrthoCamera& camera,
                             const std::vector<ImageF>& viewMips,
                             const std::vector<std::uint8_t>& mask) {
  if (geom.empty()) throw Error(ErrorCode::InvalidConfig, "geometry image is empty");
  if (viewMips.empty() || viewMips[0].width < 1)
    throw Error(ErrorCode::InvalidConfig, "view mip chain is empty");
  int res = camera.resolution;
  if (viewMips[0].width != res || viewMips[0].height != res)
    throw Error(ErrorCode::ShapeMismatch, "view image does not match the camera");
  if (mask.size() != static_cast<std::size_t>(res) * res)
    throw Error(ErrorCode::ShapeMismatch, "edge mask does not match the view");

  int n = geom.resolution;
  int channels = viewMips[0].channels;
  PartialAtlas out;
  out.color = ImageF(n, n, channels, 0.0f);
  out.sampled.assign(static_cast<std::size_t>(n) * n, 0);

  // Projections of every valid texel, reused for the finite differences.
  std::vector<Eigen::Vector2d> proj(static_cast<std::size_t>(n) * n);
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::max());
  Eigen::Vector3d hi = -lo;
  for (std::size_t t = 0; t < proj.size(); ++t) {
    if (!geom.valid[t]) continue;
    Eigen::Vector3d p = geom.position[t].cast<double>();
    proj[t] = imagePixel(camera, camera.project(p));
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  // Neighbour gate: a one-texel step that moves further than 5% of the
  // surface diagonal is a chart seam, not a usable derivative.
  double gate2 = 0.05 * (hi - lo).norm();
  gate2 *= gate2;

  auto diff = [&](std::size_t t, std::size_t fwd, std::size_t bwd, bool hasFwd,
                  bool hasBwd, Eigen::Vector2d& col) {
    Eigen::Vector3d p = geom.position[t].cast<double>();
    if (hasFwd && geom.valid[fwd] &&
        (geom.position[fwd].cast<double>() - p).squaredNorm() <= gate2) {
      col = proj[fwd] - proj[t];
      return true;
    }
    if (hasBwd && geom.valid[bwd] &&
        (p - geom.position[bwd].cast<double>()).squaredNorm() <= gate2) {
      col = proj[t] - proj[bwd];
      return true;
    }
    return false;
  };

  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      std::size_t t = geom.index(x, y);
      if (!geom.valid[t]) continue;

      double px = proj[t].x(), py = proj[t].y();
      int cx = static_cast<int>(std::lround(px));
      int cy = static_cast<int>(std::lround(py));
      if (cx < 0 || cy < 0 || cx >= res || cy >= res) continue;
      if (mask[static_cast<std::size_t>(cy) * res + cx]) continue;

      TexelFootprint fp;  // defaults to one full-res tap
      Eigen::Matrix2d j;
      Eigen::Vector2d colX, colY;
      if (diff(t, t + 1, t - 1, x + 1 < n, x > 0, colX) &&
          diff(t, t + n, t - n, y + 1 < n, y > 0, colY)) {
        j.col(0) = colX;
        j.col(1) = colY;
        fp = footprintFromJacobian(j);
      }

      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int i = 0; i < fp.taps; ++i) {
          double s = (i + 0.5) / fp.taps - 0.5;
          Eigen::Vector2d offset = fp.majorAxis * (fp.majorLength * s);
          acc += sampleTrilinear(viewMips, px + offset.x(), py + offset.y(), fp.mip, c);
        }
        out.color.at(x, y, c) = static_cast<float>(acc / fp.taps);
      }
      out.sampled[t] = 1;
    }
  return out;
}

ImageF incidenceMap(const GBuffer& geom, const OrthoCamera& camera,
                    const ImageF& depthBuffer, double bboxDiagonal,
                    double depthTolerance) {
  if (geom.empty()) throw Error(ErrorCode::InvalidConfig, "geometry image is empty");
  if (!(bboxDiagonal > 0.0) || !(depthTolerance > 0.0))
    throw Error(ErrorCode::InvalidConfig, "incidence scale must be positive");
  int res = camera.resolution;
  if (depthBuffer.width != res || depthBuffer.height != res || depthBuffer.channels != 1)
    throw Error(ErrorCode::ShapeMismatch, "depth buffer does not match the camera");

  double tolerance = depthTolerance * bboxDiagonal;
  Eigen::Vector3d toward = -camera.direction;
  int n = geom.resolution;
  ImageF out(n, n, 1, 0.0f);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      std::size_t t = geom.index(x, y);
      if (!geom.valid[t]) continue;
      double cosine = geom.normal[t].cast<double>().dot(toward);
      if (cosine <= 0.0) continue;

      Eigen::Vector3d uvd = camera.project(geom.position[t].cast<double>());
      Eigen::Vector2d pix = imagePixel(camera, uvd);
      int cx = static_cast<int>(std::lround(pix.x()));
      int cy = static_cast<int>(std::lround(pix.y()));
      if (cx < 0 || cy < 0 || cx >= res || cy >= res) continue;
      // Nearest-pixel compare: background depth is +inf, which bilinear
      // interpolation would smear across the silhouette.
      double viewDepth = depthBuffer.at(cx, cy, 0);
      if (std::abs(uvd.z() - viewDepth) <= tolerance)
        out.at(x, y, 0) = static_cast<float>(cosine);
    }
  return out;
}

TextureAtlas blendViews(const std::vector<PartialAtlas>& partials,
                        const std::vector<ImageF>& incidence,
                        const std::vector<double>& priors, const BlendOptions& options) {
  std::size_t k = partials.size();
  if (k == 0) throw Error(ErrorCode::InvalidConfig, "no views to blend");
  if (incidence.size() != k || priors.size() != k)
    throw Error(ErrorCode::InvalidConfig, "views, incidence maps and priors must pair up");
  if (!(options.epsilon > 0.0) || !(options.alpha >= 0.0))
    throw Error(ErrorCode::InvalidConfig, "blend needs epsilon > 0 and alpha >= 0");
  for (double p : priors)
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidConfig, "priors must be >= 0");

  int w = partials[0].color.width, h = partials[0].color.height;
  int channels = partials[0].color.channels;
  for (std::size_t i = 0; i < k; ++i) {
    const PartialAtlas& p = partials[i];
    if (p.color.width != w || p.color.height != h || p.color.channels != channels ||
        p.sampled.size() != static_cast<std::size_t>(w) * h)
      throw Error(ErrorCode::ShapeMismatch, "partial atlases disagree on resolution");
    if (incidence[i].width != w || incidence[i].height != h || incidence[i].channels != 1)
      throw Error(ErrorCode::ShapeMismatch, "incidence maps disagree on resolution");
  }

  double logEps = std::log(options.epsilon);
  TextureAtlas atlas;
  atlas.color = ImageF(w, h, channels, 0.0f);
  atlas.filled.assign(static_cast<std::size_t>(w) * h, 0);

  std::vector<double> logTerm(k);
  std::vector<std::size_t> who(k);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::size_t t = static_cast<std::size_t>(y) * w + x;
      std::size_t m = 0;
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < k; ++i) {
        if (!partials[i].sampled[t] || priors[i] <= 0.0) continue;
        double inc = incidence[i].at(x, y, 0);
        if (inc <= 0.0) continue;
        double l = std::log(priors[i]) + options.alpha * std::log(inc);
        logTerm[m] = l;
        who[m] = i;
        peak = std::max(peak, l);
        ++m;
      }
      if (m == 0) continue;

      double sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) sum += std::exp(logTerm[i] - peak);
      double logDenom = peak + std::log(sum);  // log sum_k w_k I_k^alpha
      if (!(logDenom > logEps)) continue;

      // epsilon shrinks the convex combination toward zero by a hair.
      double shrink = 1.0 / (1.0 + std::exp(logEps - logDenom));
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          acc += std::exp(logTerm[i] - logDenom) * partials[who[i]].color.at(x, y, c);
        atlas.color.at(x, y, c) = static_cast<float>(acc * shrink);
      }
      atlas.filled[t] = 1;
    }
  return atlas;
}

std::vector<double> standardViewPriors() {
  return {1.0, 0.1, 0.01, 0.001, 1.0, 0.001, 0.01, 0.1, 0.3, 0.3};
}

TextureAtlas fuseViews(const GBuffer& geom, const std::vector<OrthoCamera>& cameras,
                       const std::vector<RenderedView>& views,
                       const std::vector<ImageF>& colors,
                       const std::vector<double>& priors, double bboxDiagonal,
                       const FuseOptions& options) {
  std::size_t k = cameras.size();
  if (k == 0 || views.size() != k || colors.size() != k || priors.size() != k)
    throw Error(ErrorCode::InvalidConfig, "cameras, views, colors and priors must pair up");

  std::vector<PartialAtlas> partials;
  std::vector<ImageF> incidence;
  partials.reserve(k);
  incidence.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::uint8_t> mask = edgeMask(views[i], bboxDiagonal, options.edgeThreshold);
    std::vector<ImageF> mips = buildMips(colors[i], options.mipLevels, options.sharpenStrength);
    partials.push_back(backprojectView(geom, cameras[i], mips, mask));
    incidence.push_back(
        incidenceMap(geom, cameras[i], views[i].depth, bboxDiagonal, options.depthTolerance));
  }

  TextureAtlas atlas = blendViews(partials, incidence, priors, options.blend);
  if (options.runInpaint) {
    bool hole = false;
    for (std::size_t t = 0; t < atlas.filled.size(); ++t)
      if (geom.valid[t] && !atlas.filled[t]) {
        hole = true;
        break;
      }
    if (hole) atlas = inpaintAtlas(atlas, geom, bboxDiagonal, options.inpaint);
  }
  return atlas;
}

}  // namespace meshforge
