#include "meshforge/signfield/sign_grid.h"

#include <cmath>
#include <deque>

#include "meshforge/core/error.h"

namespace meshforge {

namespace {

const int kFaceNeighbors[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                  {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

}  // namespace

std::int64_t SignGrid::countLabel(VoxelLabel label) const {
  std::int64_t n = 0;
  for (VoxelLabel l : labels) n += (l == label);
  return n;
}

SignGrid markSurfaceBand(const TriangleMesh& mesh, const Bvh& bvh, const GridParams& params) {
  if (params.resolution < 8) throw Error(ErrorCode::InvalidConfig, "grid resolution must be >= 8");
  if (params.dilateRadius < 0) throw Error(ErrorCode::InvalidConfig, "dilate radius must be >= 0");

  Aabb3d meshBox = bounds(mesh);
  int margin = params.dilateRadius + 3;
  if (params.resolution - 2 * margin < 4)
    throw Error(ErrorCode::InvalidConfig, "grid resolution too small for the dilation margin");
  SignGrid grid;
  grid.res = params.resolution;

  if (params.domain) {
    grid.voxelSize = params.domain->extent().maxCoeff() / params.resolution;
    grid.origin = params.domain->min;
  } else {
    // Auto-fit: cube around the mesh bounds leaving `margin` voxels per side.
    double usable = params.resolution - 2.0 * margin;
    grid.voxelSize = meshBox.extent().maxCoeff() / usable;
    grid.origin = meshBox.center() - Eigen::Vector3d::Constant(0.5 * params.resolution * grid.voxelSize);
  }

  Eigen::Vector3d gridMin = grid.origin + Eigen::Vector3d::Constant(2 * grid.voxelSize);
  Eigen::Vector3d gridMax =
      grid.origin + Eigen::Vector3d::Constant((grid.res - 2.0) * grid.voxelSize);
  if ((meshBox.min.array() < gridMin.array()).any() || (meshBox.max.array() > gridMax.array()).any())
    throw Error(ErrorCode::OutOfBounds, "mesh does not fit in the grid with 2 voxels of margin");

  double h = grid.voxelSize;
  grid.truncation = (params.bandVoxels + params.dilateRadius * std::sqrt(3.0) + 2.0) * h;
  double bandWorld = params.bandVoxels * h;

  grid.labels.assign(grid.cells(), VoxelLabel::Unknown);
  grid.distance.assign(grid.cells(), static_cast<float>(grid.truncation));
  for (int z = 0; z < grid.res; ++z) {
    for (int y = 0; y < grid.res; ++y) {
      for (int x = 0; x < grid.res; ++x) {
        SurfacePoint sp = bvh.closestPointWithin(grid.voxelCenter(x, y, z), grid.truncation);
        if (!sp.valid()) continue;
        std::size_t i = grid.index(x, y, z);
        double d = sp.distance();
        grid.distance[i] = static_cast<float>(d);
        if (d < bandWorld) grid.labels[i] = VoxelLabel::SurfaceBand;
      }
    }
  }
  return grid;
}

void dilateBand(SignGrid& grid, int radius) {
  if (radius <= 0) return;
  // Multi-round frontier growth over the 26-neighborhood equals dilation by
  // a Chebyshev ball of the given radius.
  std::vector<std::uint8_t> frontier(grid.cells(), 0);
  for (std::size_t i = 0; i < grid.cells(); ++i)
    frontier[i] = grid.labels[i] == VoxelLabel::SurfaceBand;

  for (int round = 0; round < radius; ++round) {
    std::vector<std::uint8_t> next(grid.cells(), 0);
    bool any = false;
    for (int z = 0; z < grid.res; ++z) {
      for (int y = 0; y < grid.res; ++y) {
        for (int x = 0; x < grid.res; ++x) {
          if (!frontier[grid.index(x, y, z)]) continue;
          for (int dz = -1; dz <= 1; ++dz) {
            for (int dy = -1; dy <= 1; ++dy) {
              for (int dx = -1; dx <= 1; ++dx) {
                int nx = x + dx, ny = y + dy, nz = z + dz;
                if (nx < 0 || ny < 0 || nz < 0 || nx >= grid.res || ny >= grid.res ||
                    nz >= grid.res)
                  continue;
                std::size_t ni = grid.index(nx, ny, nz);
                if (grid.labels[ni] == VoxelLabel::Unknown) {
                  grid.labels[ni] = VoxelLabel::DilatedBand;
                  next[ni] = 1;
                  any = true;
                }
              }
            }
          }
        }
      }
    }
    if (!any) break;
    frontier = std::move(next);
  }
}

void floodFillExterior(SignGrid& grid) {
  std::deque<std::array<int, 3>> queue;
  auto tryVisit = [&](int x, int y, int z) {
    std::size_t i = grid.index(x, y, z);
    if (grid.labels[i] != VoxelLabel::Unknown) return;
    grid.labels[i] = VoxelLabel::Exterior;
    queue.push_back({x, y, z});
  };

  for (int z = 0; z < grid.res; ++z)
    for (int y = 0; y < grid.res; ++y)
      for (int x = 0; x < grid.res; ++x)
        if (grid.onBoundary(x, y, z)) tryVisit(x, y, z);

  while (!queue.empty()) {
    auto [x, y, z] = queue.front();
    queue.pop_front();
    for (const auto& d : kFaceNeighbors) {
      int nx = x + d[0], ny = y + d[1], nz = z + d[2];
      if (nx < 0 || ny < 0 || nz < 0 || nx >= grid.res || ny >= grid.res || nz >= grid.res)
        continue;
      tryVisit(nx, ny, nz);
    }
  }

  for (auto& label : grid.labels)
    if (label == VoxelLabel::Unknown) label = VoxelLabel::Interior;
}

void reopenSmallCavities(SignGrid& grid, double maxFraction) {
  std::int64_t totalInterior = grid.countLabel(VoxelLabel::Interior);
  if (totalInterior == 0) return;
  double limit = maxFraction * static_cast<double>(totalInterior);

  std::vector<std::uint8_t> visited(grid.cells(), 0);
  std::deque<std::array<int, 3>> queue;
  std::vector<std::size_t> component;
  for (int z = 0; z < grid.res; ++z) {
    for (int y = 0; y < grid.res; ++y) {
      for (int x = 0; x < grid.res; ++x) {
        std::size_t seed = grid.index(x, y, z);
        if (grid.labels[seed] != VoxelLabel::Interior || visited[seed]) continue;
        component.clear();
        visited[seed] = 1;
        queue.push_back({x, y, z});
        while (!queue.empty()) {
          auto [cx, cy, cz] = queue.front();
          queue.pop_front();
          component.push_back(grid.index(cx, cy, cz));
          for (const auto& d : kFaceNeighbors) {
            int nx = cx + d[0], ny = cy + d[1], nz = cz + d[2];
            if (nx < 0 || ny < 0 || nz < 0 || nx >= grid.res || ny >= grid.res || nz >= grid.res)
              continue;
            std::size_t ni = grid.index(nx, ny, nz);
            if (grid.labels[ni] == VoxelLabel::Interior && !visited[ni]) {
              visited[ni] = 1;
              queue.push_back({nx, ny, nz});
            }
          }
        }
        if (static_cast<double>(component.size()) < limit)
          for (std::size_t i : component) grid.labels[i] = VoxelLabel::Unknown;
      }
    }
  }
}

void resolveUndetermined(SignGrid& grid) {
  // sign: +1 Exterior, -1 Interior, 0 unresolved.
  std::vector<std::int8_t> sign(grid.cells(), 0);
  std::int64_t unresolved = 0;
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    if (grid.labels[i] == VoxelLabel::Exterior)
      sign[i] = 1;
    else if (grid.labels[i] == VoxelLabel::Interior)
      sign[i] = -1;
    else
      ++unresolved;
  }

  // Synchronous waves: each round votes against the previous round's signs,
  // so the result is independent of traversal order.
  std::vector<std::size_t> pending;
  std::vector<std::int8_t> votes;
  while (unresolved > 0) {
    pending.clear();
    votes.clear();
    for (int z = 0; z < grid.res; ++z) {
      for (int y = 0; y < grid.res; ++y) {
        for (int x = 0; x < grid.res; ++x) {
          std::size_t i = grid.index(x, y, z);
          if (sign[i] != 0) continue;
          int ext = 0, inte = 0;
          for (const auto& d : kFaceNeighbors) {
            int nx = x + d[0], ny = y + d[1], nz = z + d[2];
            if (nx < 0 || ny < 0 || nz < 0 || nx >= grid.res || ny >= grid.res || nz >= grid.res)
              continue;
            std::int8_t s = sign[grid.index(nx, ny, nz)];
            ext += (s > 0);
            inte += (s < 0);
          }
          if (ext + inte == 0) continue;
          pending.push_back(i);
          votes.push_back(ext >= inte ? 1 : -1);  // tie resolves Exterior
        }
      }
    }
    if (pending.empty()) break;
    for (std::size_t k = 0; k < pending.size(); ++k) sign[pending[k]] = votes[k];
    unresolved -= static_cast<std::int64_t>(pending.size());
  }

  grid.failOpenCount = unresolved;
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    if (sign[i] == 0) sign[i] = 1;  // fail open: isolated pockets become Exterior
    grid.labels[i] = sign[i] > 0 ? VoxelLabel::Exterior : VoxelLabel::Interior;
  }
}

std::vector<float> signedField(const SignGrid& grid) {
  std::vector<float> field(grid.cells());
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    if (grid.labels[i] != VoxelLabel::Exterior && grid.labels[i] != VoxelLabel::Interior)
      throw Error(ErrorCode::InvalidConfig, "signed field requires a fully resolved grid");
    field[i] = grid.labels[i] == VoxelLabel::Interior ? -grid.distance[i] : grid.distance[i];
  }
  return field;
}

double sampleSignedField(const SignGrid& grid, const std::vector<float>& field,
                         const Eigen::Vector3d& p) {
  // Continuous lattice coordinates where voxel centers sit at integers.
  Eigen::Vector3d q = (p - grid.origin) / grid.voxelSize - Eigen::Vector3d::Constant(0.5);
  double result = 0;
  int x0, y0, z0;
  Eigen::Vector3d f;
  auto prep = [&](double v, int& i0, double& frac) {
    double c = std::clamp(v, 0.0, static_cast<double>(grid.res - 1));
    i0 = std::min(static_cast<int>(std::floor(c)), grid.res - 2);
    i0 = std::max(i0, 0);
    frac = std::clamp(c - i0, 0.0, 1.0);
  };
  prep(q.x(), x0, f.x());
  prep(q.y(), y0, f.y());
  prep(q.z(), z0, f.z());
  for (int dz = 0; dz < 2; ++dz) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        double w = (dx ? f.x() : 1 - f.x()) * (dy ? f.y() : 1 - f.y()) * (dz ? f.z() : 1 - f.z());
        result += w * field[grid.index(x0 + dx, y0 + dy, z0 + dz)];
      }
    }
  }
  return result;
}

}  // namespace meshforge
