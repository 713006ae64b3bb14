#include "meshforge/uv/charts.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

#include "meshforge/core/error.h"
#include "meshforge/core/parallel.h"

namespace meshforge {

namespace {

struct FaceData {
  std::vector<Eigen::Vector3d> normal;
  std::vector<double> area;
  std::vector<std::array<int, 3>> adjacency;
};

FaceData buildFaceData(const TriangleMesh& mesh) {
  FaceData d;
  const int nf = mesh.faceCount();
  d.normal.resize(nf);
  d.area.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const Eigen::Vector3d av = faceAreaVector(mesh, f);
    const double a = av.norm();
    d.area[f] = a;
    d.normal[f] = a > 1e-20 ? Eigen::Vector3d(av / a) : Eigen::Vector3d::UnitZ();
  }
  d.adjacency = faceAdjacency(mesh);
  return d;
}

double edgeLength(const TriangleMesh& mesh, int face, int corner) {
  const auto& tri = mesh.faces[face];
  return (mesh.positions[tri[(corner + 1) % 3]] - mesh.positions[tri[corner]]).norm();
}

// Running area-weighted normal accumulator for one chart.
struct ChartNormal {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean() const {
    const double len = sum.norm();
    return len > 1e-20 ? Eigen::Vector3d(sum / len) : Eigen::Vector3d::UnitZ();
  }
};

struct GrowEntry {
  double cost;
  int face;
  int from;  // frontier face the candidate was reached through
  bool operator>(const GrowEntry& o) const {
    if (cost != o.cost) return cost > o.cost;
    if (face != o.face) return face > o.face;
    return from > o.from;
  }
};

class Segmenter {
 public:
  Segmenter(const TriangleMesh& mesh, const FaceData& data, const SegmentOptions& options)
      : mesh_(mesh),
        data_(data),
        options_(options),
        creaseDot_(std::cos(options.creaseDihedralDeg * M_PI / 180.0)) {}

  // Label per face; chart ids are dense in creation order.
  std::vector<int> run(int& chartCount) {
    const int nf = mesh_.faceCount();
    label_.assign(nf, -1);
    int assigned = 0;
    while (assigned < nf) {
      const int seed = pickSeed();
      chartNormals_.emplace_back();
      const int chart = static_cast<int>(chartNormals_.size()) - 1;
      assigned += growChart(seed, chart);
    }
    chartCount = static_cast<int>(chartNormals_.size());
    return std::move(label_);
  }

 private:
  double growthCost(int face, const ChartNormal& cn, int from) const {
    double cost = 1.0 - data_.normal[face].dot(cn.mean());
    const double acrossDot = data_.normal[face].dot(data_.normal[from]);
    if (acrossDot < creaseDot_) cost += options_.creasePenalty * (1.0 - acrossDot);
    return cost;
  }

  int growChart(int seed, int chart) {
    ChartNormal& cn = chartNormals_[chart];
    label_[seed] = chart;
    cn.sum += data_.area[seed] * data_.normal[seed];
    int grown = 1;

    std::priority_queue<GrowEntry, std::vector<GrowEntry>, std::greater<GrowEntry>> queue;
    auto pushNeighbors = [&](int face) {
      for (int g : data_.adjacency[face]) {
        if (g < 0 || label_[g] != -1) continue;
        const double cost = growthCost(g, cn, face);
        if (cost <= options_.costCutoff) queue.push({cost, g, face});
      }
    };
    pushNeighbors(seed);

    while (!queue.empty()) {
      const GrowEntry e = queue.top();
      queue.pop();
      if (label_[e.face] != -1) continue;
      // The chart mean has moved since this entry was queued; if the face
      // got more expensive, push it back in order instead of taking it.
      const double cost = growthCost(e.face, cn, e.from);
      if (cost > e.cost + 1e-12) {
        if (cost <= options_.costCutoff) queue.push({cost, e.face, e.from});
        continue;
      }
      if (cost > options_.costCutoff) continue;

      label_[e.face] = chart;
      cn.sum += data_.area[e.face] * data_.normal[e.face];
      ++grown;
      pushNeighbors(e.face);
    }
    return grown;
  }

  // Farthest unassigned face (edge-graph BFS from everything assigned);
  // unreachable faces count as infinitely far. Lowest index breaks ties.
  // With nothing assigned yet this is the lowest unassigned index.
  int pickSeed() {
    const int nf = mesh_.faceCount();
    queue_.clear();
    dist_.assign(nf, -1);
    for (int f = 0; f < nf; ++f) {
      if (label_[f] != -1) {
        dist_[f] = 0;
        queue_.push_back(f);
      }
    }
    if (queue_.empty()) {
      for (int f = 0; f < nf; ++f)
        if (label_[f] == -1) return f;
      throw Error(ErrorCode::EmptyMesh, "no faces to segment");
    }
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const int f = queue_[head];
      for (int g : data_.adjacency[f]) {
        if (g < 0 || dist_[g] != -1) continue;
        dist_[g] = dist_[f] + 1;
        queue_.push_back(g);
      }
    }
    int best = -1;
    long long bestDist = -1;
    for (int f = 0; f < nf; ++f) {
      if (label_[f] != -1) continue;
      const long long d =
          dist_[f] < 0 ? std::numeric_limits<long long>::max() : static_cast<long long>(dist_[f]);
      if (d > bestDist) {
        bestDist = d;
        best = f;
      }
    }
    return best;
  }

  const TriangleMesh& mesh_;
  const FaceData& data_;
  const SegmentOptions& options_;
  const double creaseDot_;
  std::vector<int> label_;
  std::vector<ChartNormal> chartNormals_;
  std::vector<int> queue_;  // reused BFS storage
  std::vector<int> dist_;
};

std::vector<Chart> labelsToCharts(const std::vector<int>& label, int chartCount) {
  std::vector<Chart> charts(chartCount);
  for (int f = 0; f < static_cast<int>(label.size()); ++f) {
    charts[label[f]].faces.push_back(f);
  }
  // Faces arrive in ascending order already; order charts by first face so
  // the result does not depend on chart creation history.
  std::sort(charts.begin(), charts.end(),
            [](const Chart& a, const Chart& b) { return a.faces.front() < b.faces.front(); });
  return charts;
}

std::vector<int> chartsToLabels(const std::vector<Chart>& charts, int faceCount) {
  std::vector<int> label(faceCount, -1);
  for (int c = 0; c < static_cast<int>(charts.size()); ++c) {
    for (int f : charts[c].faces) {
      if (f < 0 || f >= faceCount || label[f] != -1) {
        throw Error(ErrorCode::InvalidConfig, "charts must partition the mesh faces");
      }
      label[f] = c;
    }
  }
  for (int f = 0; f < faceCount; ++f) {
    if (label[f] == -1) {
      throw Error(ErrorCode::InvalidConfig, "charts must partition the mesh faces");
    }
  }
  return label;
}

// Chart neighborhood graph updated in place as charts merge, so a merge
// costs O(degree + faces moved) instead of a full rebuild.
class MergeGraph {
 public:
  MergeGraph(const TriangleMesh& mesh, const FaceData& data, std::vector<int>& label,
             int chartCount, const SegmentOptions& options)
      : mesh_(mesh),
        data_(data),
        label_(label),
        coneCos_(std::cos(options.mergeConeDeg * M_PI / 180.0)) {
    faces_.resize(chartCount);
    normalSum_.assign(chartCount, Eigen::Vector3d::Zero());
    outer_.assign(chartCount, 0.0);
    shared_.resize(chartCount);
    alive_.assign(chartCount, 1);
    for (int f = 0; f < mesh.faceCount(); ++f) {
      const int c = label[f];
      faces_[c].push_back(f);
      normalSum_[c] += data.area[f] * data.normal[f];
      for (int k = 0; k < 3; ++k) {
        const int g = data.adjacency[f][k];
        const double len = edgeLength(mesh, f, k);
        if (g < 0) {
          outer_[c] += len;
        } else if (label[g] != c) {
          shared_[c][label[g]] += len;
        }
      }
    }
  }

  // Ascending-id scan; a merged chart is reconsidered before the scan moves
  // on. Repeats until a full pass changes nothing.
  void run() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int c = 0; c < static_cast<int>(faces_.size()); ++c) {
        while (alive_[c] && tryMerge(c)) changed = true;
      }
    }
  }

  // Labels already point at surviving ids; compact them to 0..n-1.
  std::vector<Chart> takeCharts() {
    std::vector<int> dense(faces_.size(), -1);
    int next = 0;
    for (int c = 0; c < static_cast<int>(faces_.size()); ++c) {
      if (alive_[c]) dense[c] = next++;
    }
    for (int& l : label_) l = dense[l];
    return labelsToCharts(label_, next);
  }

 private:
  double totalBoundary(int c) const {
    double sum = outer_[c];
    for (const auto& [d, len] : shared_[c]) sum += len;
    return sum;
  }

  // Criterion gate: merged area-weighted mean keeps every face normal
  // inside the cone half-angle.
  bool gate(int c, int d) const {
    const Eigen::Vector3d sum = normalSum_[c] + normalSum_[d];
    const double len = sum.norm();
    if (len < 1e-20) return false;
    const Eigen::Vector3d mean = sum / len;
    for (int chart : {c, d}) {
      for (int f : faces_[chart]) {
        if (data_.normal[f].dot(mean) < coneCos_) return false;
      }
    }
    return true;
  }

  void merge(int from, int into) {
    for (int f : faces_[from]) label_[f] = into;
    faces_[into].insert(faces_[into].end(), faces_[from].begin(), faces_[from].end());
    faces_[from].clear();
    normalSum_[into] += normalSum_[from];
    outer_[into] += outer_[from];
    shared_[into].erase(from);
    shared_[from].erase(into);
    for (const auto& [e, len] : shared_[from]) {
      shared_[into][e] += len;
      shared_[e].erase(from);
      shared_[e][into] += len;
    }
    shared_[from].clear();
    alive_[from] = 0;
  }

  bool tryMerge(int c) {
    // 1: single face moves across its longest shared edge.
    if (faces_[c].size() == 1) {
      const int f = faces_[c][0];
      int bestChart = -1;
      double bestLen = -1.0;
      for (int k = 0; k < 3; ++k) {
        const int g = data_.adjacency[f][k];
        if (g < 0 || label_[g] == c) continue;
        const double len = edgeLength(mesh_, f, k);
        if (len > bestLen || (len == bestLen && label_[g] < bestChart)) {
          bestLen = len;
          bestChart = label_[g];
        }
      }
      if (bestChart >= 0 && gate(c, bestChart)) {
        merge(c, bestChart);
        return true;
      }
    }

    // 2: a two-face quad joins the neighbor it shares the most boundary with.
    if (faces_[c].size() == 2) {
      const int f0 = faces_[c][0], f1 = faces_[c][1];
      const auto& adj = data_.adjacency[f0];
      if (std::find(adj.begin(), adj.end(), f1) != adj.end()) {
        int bestChart = -1;
        double bestLen = -1.0;
        for (const auto& [d, len] : shared_[c]) {  // ascending ids: ties keep lowest
          if (len > bestLen) {
            bestLen = len;
            bestChart = d;
          }
        }
        if (bestChart >= 0 && gate(c, bestChart)) {
          merge(c, bestChart);
          return true;
        }
      }
    }

    // 3: boundary entirely against one neighbor chart.
    if (outer_[c] <= 0.0 && shared_[c].size() == 1) {
      const int d = shared_[c].begin()->first;
      if (gate(c, d)) {
        merge(c, d);
        return true;
      }
    }

    // 4: pair sharing most of the smaller boundary; lower id absorbs.
    for (const auto& [d, len] : shared_[c]) {
      if (len > 0.5 * std::min(totalBoundary(c), totalBoundary(d)) && gate(c, d)) {
        merge(std::max(c, d), std::min(c, d));
        return true;
      }
    }
    return false;
  }

  const TriangleMesh& mesh_;
  const FaceData& data_;
  std::vector<int>& label_;
  const double coneCos_;
  std::vector<std::vector<int>> faces_;
  std::vector<Eigen::Vector3d> normalSum_;
  std::vector<double> outer_;
  std::vector<std::map<int, double>> shared_;  // ordered: deterministic scans
  std::vector<std::uint8_t> alive_;
};

std::vector<Chart> mergeLabels(const TriangleMesh& mesh, const FaceData& data,
                               std::vector<int>& label, int chartCount,
                               const SegmentOptions& options) {
  MergeGraph graph(mesh, data, label, chartCount, options);
  graph.run();
  return graph.takeCharts();
}

void haloFromAdjacency(const std::vector<std::array<int, 3>>& adjacency, int faceCount,
                       std::vector<MeshPartition>& partitions, int rings) {
  for (auto& part : partitions) {
    part.halo.clear();
    if (rings == 0) continue;
    std::vector<std::uint8_t> seen(faceCount, 0);
    for (int f : part.core) seen[f] = 1;

    std::vector<int> ring = part.core;
    for (int r = 0; r < rings; ++r) {
      std::vector<int> next;
      for (int f : ring) {
        for (int g : adjacency[f]) {
          if (g < 0 || seen[g]) continue;
          seen[g] = 1;
          next.push_back(g);
        }
      }
      part.halo.insert(part.halo.end(), next.begin(), next.end());
      ring = std::move(next);
    }
    std::sort(part.halo.begin(), part.halo.end());
  }
}

}  // namespace

std::vector<Chart> mergePass(std::vector<Chart> charts, const TriangleMesh& mesh,
                             const SegmentOptions& options) {
  const FaceData data = buildFaceData(mesh);
  std::vector<int> label = chartsToLabels(charts, mesh.faceCount());
  return mergeLabels(mesh, data, label, static_cast<int>(charts.size()), options);
}

std::vector<Chart> segmentCharts(const TriangleMesh& mesh, const SegmentOptions& options) {
  validateMesh(mesh);
  const FaceData data = buildFaceData(mesh);
  Segmenter segmenter(mesh, data, options);
  int chartCount = 0;
  std::vector<int> label = segmenter.run(chartCount);
  return mergeLabels(mesh, data, label, chartCount, options);
}

std::vector<MeshPartition> partitionMesh(const TriangleMesh& mesh, int count) {
  validateMesh(mesh);
  if (count < 1) throw Error(ErrorCode::InvalidConfig, "partition count must be >= 1");

  const int nf = mesh.faceCount();
  std::vector<Eigen::Vector3d> centroid(nf);
  std::vector<double> area(nf);
  for (int f = 0; f < nf; ++f) {
    const auto& tri = mesh.faces[f];
    centroid[f] =
        (mesh.positions[tri[0]] + mesh.positions[tri[1]] + mesh.positions[tri[2]]) / 3.0;
    area[f] = faceArea(mesh, f);
  }

  std::vector<std::vector<int>> pieces;
  {
    std::vector<int> all(nf);
    std::iota(all.begin(), all.end(), 0);
    pieces.push_back(std::move(all));
  }

  auto pieceArea = [&](const std::vector<int>& piece) {
    double sum = 0;
    for (int f : piece) sum += area[f];
    return sum;
  };

  while (static_cast<int>(pieces.size()) < count) {
    // Split the piece with the largest area that still has faces to spare.
    int target = -1;
    double targetArea = -1.0;
    for (int p = 0; p < static_cast<int>(pieces.size()); ++p) {
      if (pieces[p].size() < 2) continue;
      const double a = pieceArea(pieces[p]);
      if (a > targetArea) {
        targetArea = a;
        target = p;
      }
    }
    if (target < 0) break;  // nothing splittable left

    std::vector<int>& piece = pieces[target];
    Eigen::Vector3d lo = centroid[piece[0]], hi = centroid[piece[0]];
    for (int f : piece) {
      lo = lo.cwiseMin(centroid[f]);
      hi = hi.cwiseMax(centroid[f]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);

    std::sort(piece.begin(), piece.end(), [&](int a, int b) {
      if (centroid[a][axis] != centroid[b][axis]) return centroid[a][axis] < centroid[b][axis];
      return a < b;
    });

    const double half = pieceArea(piece) * 0.5;
    double running = 0.0;
    std::size_t cut = 0;
    for (; cut < piece.size() - 1; ++cut) {
      running += area[piece[cut]];
      if (running >= half) {
        ++cut;
        break;
      }
    }
    cut = std::max<std::size_t>(1, std::min(cut, piece.size() - 1));

    std::vector<int> rightHalf(piece.begin() + cut, piece.end());
    piece.resize(cut);
    pieces.push_back(std::move(rightHalf));
  }

  std::vector<MeshPartition> out(pieces.size());
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    std::sort(pieces[p].begin(), pieces[p].end());
    out[p].core = std::move(pieces[p]);
  }
  return out;
}

void extractHalos(const TriangleMesh& mesh, std::vector<MeshPartition>& partitions, int rings) {
  if (rings < 0) throw Error(ErrorCode::InvalidConfig, "halo rings must be >= 0");
  haloFromAdjacency(faceAdjacency(mesh), mesh.faceCount(), partitions, rings);
}

std::vector<Chart> segmentParallel(const TriangleMesh& mesh, int partitions, int haloRings,
                                   const SegmentOptions& options) {
  if (partitions < 1) throw Error(ErrorCode::InvalidConfig, "partition count must be >= 1");
  if (haloRings < 0) throw Error(ErrorCode::InvalidConfig, "halo rings must be >= 0");
  if (partitions == 1) return segmentCharts(mesh, options);
  validateMesh(mesh);

  const FaceData data = buildFaceData(mesh);
  std::vector<MeshPartition> parts = partitionMesh(mesh, partitions);
  haloFromAdjacency(data.adjacency, mesh.faceCount(), parts, haloRings);

  const int nf = mesh.faceCount();
  // Owner labels: (partition, local chart) made unique by offsetting.
  std::vector<int> label(nf, -1);

  // Independent segmentation per partition on core + halo. The per-chunk
  // merge is skipped; the global merge pass at the end consolidates.
  std::vector<std::vector<int>> localLabel(parts.size());
  std::vector<std::vector<int>> regions(parts.size());
  std::vector<int> localChartCount(parts.size(), 0);
  parallelFor(
      0, static_cast<std::int64_t>(parts.size()),
      [&](std::int64_t p) {
        std::vector<int>& region = regions[p];
        region = parts[p].core;
        region.insert(region.end(), parts[p].halo.begin(), parts[p].halo.end());
        std::sort(region.begin(), region.end());

        std::vector<std::uint8_t> keep(nf, 0);
        for (int f : region) keep[f] = 1;
        const TriangleMesh sub = extractFaces(mesh, keep);

        const FaceData subData = buildFaceData(sub);
        Segmenter segmenter(sub, subData, options);
        localLabel[p] = segmenter.run(localChartCount[p]);
      },
      1);

  int offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    std::vector<std::uint8_t> inCore(nf, 0);
    for (int f : parts[p].core) inCore[f] = 1;
    // extractFaces preserves face order, so local face i is regions[p][i].
    for (std::size_t i = 0; i < regions[p].size(); ++i) {
      const int f = regions[p][i];
      if (inCore[f]) label[f] = offset + localLabel[p][i];
    }
    offset += localChartCount[p];
  }

  // Clipping charts to cores can disconnect them; regroup by connected
  // component within each label.
  std::vector<int> component(nf, -1);
  std::vector<std::vector<int>> componentFaces;
  std::vector<int> stack;
  for (int f = 0; f < nf; ++f) {
    if (component[f] != -1) continue;
    const int id = static_cast<int>(componentFaces.size());
    componentFaces.emplace_back();
    stack.assign(1, f);
    component[f] = id;
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      componentFaces[id].push_back(cur);
      for (int g : data.adjacency[cur]) {
        if (g < 0 || component[g] != -1 || label[g] != label[cur]) continue;
        component[g] = id;
        stack.push_back(g);
      }
    }
  }

  // Components with more than 2 faces become charts; smaller ones are
  // orphans that join the adjacent accepted chart whose mean normal agrees
  // best. Orphans with no accepted neighbor stand alone.
  std::vector<int> componentChart(componentFaces.size(), -1);
  std::vector<Eigen::Vector3d> chartNormalSum;
  std::vector<std::vector<int>> chartFaces;
  std::vector<int> faceChart(nf, -1);
  for (std::size_t comp = 0; comp < componentFaces.size(); ++comp) {
    if (componentFaces[comp].size() <= 2) continue;
    const int id = static_cast<int>(chartFaces.size());
    componentChart[comp] = id;
    chartFaces.push_back(componentFaces[comp]);
    chartNormalSum.push_back(Eigen::Vector3d::Zero());
    for (int f : componentFaces[comp]) {
      faceChart[f] = id;
      chartNormalSum[id] += data.area[f] * data.normal[f];
    }
  }

  std::vector<int> orphans;
  for (std::size_t comp = 0; comp < componentFaces.size(); ++comp) {
    if (componentChart[comp] != -1) continue;
    orphans.insert(orphans.end(), componentFaces[comp].begin(), componentFaces[comp].end());
  }
  std::sort(orphans.begin(), orphans.end());
  for (int f : orphans) {
    int best = -1;
    double bestDot = -2.0;
    for (int g : data.adjacency[f]) {
      if (g < 0 || faceChart[g] < 0) continue;
      const int c = faceChart[g];
      const double len = chartNormalSum[c].norm();
      const double d = len > 1e-20 ? data.normal[f].dot(chartNormalSum[c] / len) : -1.0;
      if (d > bestDot + 1e-15 || (std::abs(d - bestDot) <= 1e-15 && c < best)) {
        bestDot = d;
        best = c;
      }
    }
    if (best < 0) {
      best = static_cast<int>(chartFaces.size());
      chartFaces.emplace_back();
      chartNormalSum.push_back(Eigen::Vector3d::Zero());
    }
    faceChart[f] = best;
    chartFaces[best].push_back(f);
    chartNormalSum[best] += data.area[f] * data.normal[f];
  }

  // Overlap reconciliation: partition A segmented its halo too, so its view
  // of a chart may extend past the cut. When one of A's local charts covers
  // more than half of a chart owned elsewhere (and the normal cone stays
  // inside the gate), the two are the same logical chart split by the
  // partition boundary; merge them. This is what restores, e.g., a planar
  // region that a cut divided, which the boundary-fraction criterion alone
  // would leave split.
  {
    std::vector<int> parent(chartFaces.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::vector<std::vector<int>> rootFaces = chartFaces;
    std::vector<Eigen::Vector3d> rootNormalSum = chartNormalSum;
    const double coneCos = std::cos(options.mergeConeDeg * M_PI / 180.0);

    auto gateAndUnion = [&](int a, int b) {
      a = find(a);
      b = find(b);
      if (a == b) return;
      const Eigen::Vector3d sum = rootNormalSum[a] + rootNormalSum[b];
      const double len = sum.norm();
      if (len < 1e-20) return;
      const Eigen::Vector3d mean = sum / len;
      for (int root : {a, b}) {
        for (int f : rootFaces[root]) {
          if (data.normal[f].dot(mean) < coneCos) return;
        }
      }
      const int into = std::min(a, b), from = std::max(a, b);
      parent[from] = into;
      rootFaces[into].insert(rootFaces[into].end(), rootFaces[from].begin(),
                             rootFaces[from].end());
      rootFaces[from].clear();
      rootNormalSum[into] += rootNormalSum[from];
    };

    for (std::size_t p = 0; p < parts.size(); ++p) {
      std::vector<std::uint8_t> inCore(nf, 0);
      for (int f : parts[p].core) inCore[f] = 1;
      // Per local chart: which owned chart holds its core faces (majority),
      // and how many of each foreign chart's faces its halo view covered.
      std::vector<std::map<int, int>> coreVotes(localChartCount[p]);
      std::vector<std::map<int, int>> coverage(localChartCount[p]);
      for (std::size_t i = 0; i < regions[p].size(); ++i) {
        const int f = regions[p][i];
        const int x = localLabel[p][i];
        if (inCore[f]) {
          ++coreVotes[x][faceChart[f]];
        } else {
          ++coverage[x][faceChart[f]];
        }
      }
      for (int x = 0; x < localChartCount[p]; ++x) {
        int own = -1, ownVotes = -1;
        for (const auto& [chart, votes] : coreVotes[x]) {
          if (votes > ownVotes) {
            ownVotes = votes;
            own = chart;
          }
        }
        if (own < 0) continue;  // chart lived entirely in the halo
        for (const auto& [other, covered] : coverage[x]) {
          if (other == own) continue;
          if (2 * covered > static_cast<int>(chartFaces[other].size())) {
            gateAndUnion(own, other);
          }
        }
      }
    }
    for (int f = 0; f < nf; ++f) faceChart[f] = find(faceChart[f]);
  }

  // Compact ids.
  int finalCount = 0;
  {
    std::vector<int> dense(chartFaces.size(), -1);
    for (int f = 0; f < nf; ++f) {
      if (dense[faceChart[f]] == -1) dense[faceChart[f]] = 0;
    }
    for (std::size_t c = 0; c < chartFaces.size(); ++c) {
      if (dense[c] != -1) dense[c] = finalCount++;
    }
    for (int f = 0; f < nf; ++f) faceChart[f] = dense[faceChart[f]];
  }

  // Global merge spanning partition boundaries.
  return mergeLabels(mesh, data, faceChart, finalCount, options);
}

}  // namespace meshforge
