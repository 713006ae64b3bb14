#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "meshforge/core/image.h"
#include "meshforge/core/mesh.h"
#include "meshforge/core/rng.h"

namespace meshforge {

struct SurfaceSample {
  int face = -1;
  Eigen::Vector3d barycentric = Eigen::Vector3d::Zero();
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
};

// Area-weighted uniform surface samples. Sample i consumes counters
// (offset + 3i .. offset + 3i + 2): one draw picks the face by cumulative
// area, two map to barycentrics via the square-root trick.
std::vector<SurfaceSample> surfaceSampleSet(const TriangleMesh& mesh, int count,
                                            const CounterRng& rng, std::uint64_t offset = 0);

// All metrics normalize their inputs first: distance metrics scale the PAIR
// by one shared unit-cube transform, so reported distances are fractions of
// the joint extent; the raster metric scales the single mesh into the
// radius-0.5 sphere. Angular metrics are scale-invariant.
//
// Distances are point-to-SURFACE: samples on one mesh query the closest point
// on the other mesh itself, never its sample set. Direction A->B uses sample
// counters [0, 3*samples), B->A uses [3*samples, 6*samples), so callers can
// regenerate the exact sample sets.

// Symmetric mean nearest-surface distance.
double chamferDistance(const TriangleMesh& a, const TriangleMesh& b, int samples = 256000,
                       std::uint64_t seed = 7);

// Symmetric maximum nearest-surface distance over the same sampling scheme.
double hausdorffDistance(const TriangleMesh& a, const TriangleMesh& b, int samples = 256000,
                         std::uint64_t seed = 7);

// Renders golden-spiral views with and without backface culling and counts
// the texels where the two renders disagree (coverage differs, or both cover
// with different front surfaces). Zero for consistently wound closed meshes.
std::int64_t flippedNormalsPixels(const TriangleMesh& mesh, int views = 24,
                                  int resolution = 1024);

// Mean angle in degrees between the lowpoly interpolated smooth normal at
// area-weighted samples and the highpoly interpolated smooth normal at the
// closest surface point.
double geoMeanErrorDeg(const TriangleMesh& lowpoly, const TriangleMesh& highpoly,
                       int samples = 10000, std::uint64_t seed = 7);

struct BakedError {
  double meanDeg = 0.0;
  int used = 0;
  int excluded = 0;  // samples on texels with no plausible unit normal
};

// Like geoMeanErrorDeg, but the lowpoly normal comes from the tangent-space
// map: bilinear-decode RGB8 at the sample UV (v down, texel centers at
// (i+0.5)/size), normalize, rotate by the interpolated wedge tangent frame.
// Texels whose decoded vector has norm < 0.5 carry no unit normal (e.g.
// unfilled background) and are excluded and counted. The lowpoly must be
// UV-mapped and the map must have 3 channels.
BakedError bakedMeanErrorDeg(const TriangleMesh& lowpoly, const ImageU8& normalMap,
                             const TriangleMesh& highpoly, int samples = 10000,
                             std::uint64_t seed = 7);

// Aggregate for reporting; negative distance/angle fields mean "not computed".
struct MetricReport {
  double chamfer = -1.0;
  double hausdorff = -1.0;
  std::int64_t flippedPixels = -1;
  double bakedMeanDeg = -1.0;
  double geoMeanDeg = -1.0;
  int bakedUsed = 0;
  int bakedExcluded = 0;
  int samples = 0;
  std::uint64_t seed = 0;
};

}  // namespace meshforge
