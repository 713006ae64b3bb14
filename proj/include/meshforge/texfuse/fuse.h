#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "meshforge/bake/gbuffer.h"
#include "meshforge/core/image.h"
#include "meshforge/render/raster.h"

namespace meshforge {

// ---- screen-space footprints ------------------------------------------

// How one atlas texel lands in a view image. Lengths are the singular values
// of the jacobian, i.e. image pixels covered per texel step along each
// principal direction.
struct TexelFootprint {
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Identity();
  Eigen::Vector2d majorAxis = Eigen::Vector2d::UnitX();  // unit direction
  double majorLength = 1.0;
  double minorLength = 1.0;
  double mip = 0.0;  // pyramid level to sample, >= 0
  int taps = 1;      // samples along the major axis, 1..8
};

// Closed-form footprint of a 2x2 jacobian. The mip level follows the minor
// axis (sharpness is kept along the compressed direction) plus half the
// log-anisotropy, capped at ratio 8; the tap count covers the remaining
// major-axis extent. Degenerate jacobians fall back to one full-res tap.
TexelFootprint footprintFromJacobian(const Eigen::Matrix2d& jacobian);

// ---- per-view sampling --------------------------------------------------

// Marks view pixels that must not be sampled: both sides of the silhouette
// ring, and foreground pixels whose 8-neighbourhood jumps more than
// threshold * bboxDiagonal in world position (depth discontinuities inside
// the silhouette). 1 = masked. Interior background stays unmasked; the
// incidence depth gate already rejects it.
std::vector<std::uint8_t> edgeMask(const RenderedView& view, double bboxDiagonal,
                                   double threshold = 0.02);

// One view's contribution to the atlas: a color per texel plus a flag saying
// whether the view was actually sampled there.
struct PartialAtlas {
  ImageF color;                       // atlas resolution, same channels as the view
  std::vector<std::uint8_t> sampled;  // per texel, 1 = color is meaningful
};

// Samples one view into atlas space. Every valid texel projects into the
// view; texels whose projection center lands outside the image or on an
// edge-masked pixel are skipped. Jacobians come from finite differences of
// neighbouring texel projections (guarded against cross-chart jumps), and
// each texel averages footprint.taps trilinear reads spread along the major
// axis. Occlusion is not resolved here; the incidence map zeroes it out.
PartialAtlas backprojectView(const GBuffer& geom, const OrthoCamera& camera,
                             const std::vector<ImageF>& viewMips,
                             const std::vector<std::uint8_t>& mask);

// Per-texel incidence weight for one view: max(0, n . towardCamera) when the
// texel's projected depth matches the view depth buffer within
// depthTolerance * bboxDiagonal, else 0. Occluded or out-of-view texels get 0.
ImageF incidenceMap(const GBuffer& geom, const OrthoCamera& camera,
                    const ImageF& depthBuffer, double bboxDiagonal,
                    double depthTolerance = 0.005);

// ---- blending -----------------------------------------------------------

struct TextureAtlas {
  ImageF color;
  std::vector<std::uint8_t> filled;  // per texel

  bool filledAt(int x, int y) const {
    return filled[static_cast<std::size_t>(y) * color.width + x] != 0;
  }
};

struct BlendOptions {
  double alpha = 4.0;     // incidence exponent
  double epsilon = 1e-8;  // denominator regularizer
};

// Weighted blend across views, evaluated in log space:
//   T = sum_k w_k I_k^alpha A_k / (sum_k w_k I_k^alpha + epsilon).
// A texel counts view k as a contributor when the view sampled it with
// positive incidence and prior; it is filled iff the log-sum-exp of the
// contributor terms exceeds log(epsilon).
TextureAtlas blendViews(const std::vector<PartialAtlas>& partials,
                        const std::vector<ImageF>& incidence,
                        const std::vector<double>& priors,
                        const BlendOptions& options = {});

// Blend priors matching the standardCameras order: front and rear full
// weight, top and bottom 0.3, then 0.1 / 0.01 / 0.001 from the 45-degree
// frontal sides through the pure sides to the 45-degree rear sides.
std::vector<double> standardViewPriors();

// ---- hole filling -------------------------------------------------------

struct InpaintOptions {
  int neighbors = 16;            // k-nearest filled texels consulted
  double sigmaFraction = 0.02;   // gaussian radius, fraction of bbox diagonal
  double normalExponent = 2.0;   // normal-agreement falloff
};

// Fills every valid-but-empty texel from its k nearest filled texels in 3d,
// weighted by a position gaussian times normal agreement. Filled texels pass
// through untouched, so the operation is idempotent. Throws NothingToInpaint
// when no texel is filled at all.
TextureAtlas inpaintAtlas(const TextureAtlas& atlas, const GBuffer& geom,
                          double bboxDiagonal, const InpaintOptions& options = {});

// ---- whole-pipeline convenience ----------------------------------------

struct FuseOptions {
  double edgeThreshold = 0.02;
  double depthTolerance = 0.005;
  int mipLevels = 6;
  float sharpenStrength = 0.2f;
  BlendOptions blend;
  InpaintOptions inpaint;
  bool runInpaint = true;
};

// Backprojects every view, blends, and fills the leftover holes. `views`
// supply the depth buffers and silhouettes, `colors` the appearance (same
// resolution, any channel count), `priors` one weight per view.
TextureAtlas fuseViews(const GBuffer& geom, const std::vector<OrthoCamera>& cameras,
                       const std::vector<RenderedView>& views,
                       const std::vector<ImageF>& colors,
                       const std::vector<double>& priors, double bboxDiagonal,
                       const FuseOptions& options = {});

}  // namespace meshforge
