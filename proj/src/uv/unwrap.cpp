#include "meshforge/uv/unwrap.h"

#include <atomic>
#include <exception>
#include <unordered_map>

#include "meshforge/core/error.h"
#include "meshforge/core/parallel.h"

namespace meshforge {

UnwrapResult unwrapMesh(const TriangleMesh& mesh, const UnwrapOptions& options) {
  validateMesh(mesh);

  const std::vector<Chart> segmented =
      segmentParallel(mesh, options.partitions, options.haloRings, options.segment);

  // Flatten charts independently; a chart may split while flattening.
  std::vector<std::vector<Chart>> flattened(segmented.size());
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  parallelFor(
      0, static_cast<std::int64_t>(segmented.size()),
      [&](std::int64_t i) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
          flattened[i] = parameterizeLscm(mesh, segmented[i], options.lscm);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      },
      1);
  if (failed.load()) std::rethrow_exception(failure);

  UnwrapResult result;
  for (auto& group : flattened) {
    for (auto& chart : group) result.charts.push_back(std::move(chart));
  }

  PackOptions pack;
  pack.resolution = options.atlasRes;
  pack.padding = options.padding;
  result.layout = packAtlas(result.charts, pack);

  // Rewrite chart UVs into normalized atlas space.
  const double invRes = 1.0 / result.layout.resolution;
  for (std::size_t c = 0; c < result.charts.size(); ++c) {
    const ChartPlacement& placement = result.layout.placements[c];
    for (auto& corners : result.charts[c].cornerUvs) {
      for (auto& uv : corners) uv = placement.apply(uv) * invRes;
    }
  }

  // Attach to the mesh. Within a chart every corner of one vertex carries
  // the same UV, so keying the pool by (chart, vertex) both deduplicates and
  // keeps seams split between charts.
  result.mesh = mesh;
  result.mesh.uvs.clear();
  result.mesh.faceUvs.assign(mesh.faces.size(), Eigen::Vector3i(-1, -1, -1));
  std::unordered_map<std::uint64_t, int> pool;
  for (std::size_t c = 0; c < result.charts.size(); ++c) {
    const Chart& chart = result.charts[c];
    for (std::size_t i = 0; i < chart.faces.size(); ++i) {
      const int f = chart.faces[i];
      for (int k = 0; k < 3; ++k) {
        const std::uint64_t key = (static_cast<std::uint64_t>(c) << 32) |
                                  static_cast<std::uint32_t>(mesh.faces[f][k]);
        auto [it, inserted] = pool.try_emplace(key, static_cast<int>(result.mesh.uvs.size()));
        if (inserted) result.mesh.uvs.push_back(chart.cornerUvs[i][k]);
        result.mesh.faceUvs[f][k] = it->second;
      }
    }
  }
  return result;
}

}  // namespace meshforge
