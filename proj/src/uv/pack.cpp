#include "meshforge/uv/pack.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "meshforge/core/error.h"

namespace meshforge {

namespace {

struct RawRect {
  double width = 0;   // canonical landscape: width >= height
  double height = 0;
  bool rotated = false;
};

// Integer skyline packer, bottom-left heuristic.
class Skyline {
 public:
  explicit Skyline(int width) : width_(width) { segments_.push_back({0, width, 0}); }

  // Lowest (then leftmost) top-left position for a w x h rect, or false.
  bool findSpot(int w, int h, int limit, int& outX, int& outY) const {
    bool found = false;
    int bestY = std::numeric_limits<int>::max();
    int bestX = 0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const int x = segments_[i].x;
      if (x + w > width_) break;
      int y = 0;
      int covered = 0;
      for (std::size_t j = i; j < segments_.size() && covered < w; ++j) {
        y = std::max(y, segments_[j].y);
        covered = segments_[j].x + segments_[j].width - x;
      }
      if (covered < w || y + h > limit) continue;
      if (y < bestY || (y == bestY && x < bestX)) {
        bestY = y;
        bestX = x;
        found = true;
      }
    }
    outX = bestX;
    outY = bestY;
    return found;
  }

  void place(int x, int w, int top) {
    std::vector<Segment> next;
    next.reserve(segments_.size() + 2);
    bool inserted = false;
    for (const Segment& seg : segments_) {
      const int segEnd = seg.x + seg.width;
      if (segEnd <= x || seg.x >= x + w) {
        if (!inserted && seg.x >= x + w) {
          next.push_back({x, w, top});
          inserted = true;
        }
        next.push_back(seg);
        continue;
      }
      if (seg.x < x) next.push_back({seg.x, x - seg.x, seg.y});
      if (!inserted) {
        next.push_back({x, w, top});
        inserted = true;
      }
      if (segEnd > x + w) next.push_back({x + w, segEnd - (x + w), seg.y});
    }
    if (!inserted) next.push_back({x, w, top});

    segments_.clear();
    for (const Segment& seg : next) {
      if (!segments_.empty() && segments_.back().y == seg.y) {
        segments_.back().width += seg.width;
      } else {
        segments_.push_back(seg);
      }
    }
  }

 private:
  struct Segment {
    int x, width, y;
  };
  int width_;
  std::vector<Segment> segments_;
};

struct PackAttempt {
  bool ok = false;
  std::vector<Eigen::Vector2i> origin;  // padded rect origin per chart
};

PackAttempt tryPack(const std::vector<RawRect>& rects, const std::vector<int>& order,
                    double scale, int resolution, int padding) {
  PackAttempt attempt;
  attempt.origin.resize(rects.size());
  Skyline skyline(resolution);
  for (int id : order) {
    const int w = std::max(1, static_cast<int>(std::ceil(rects[id].width * scale))) + 2 * padding;
    const int h = std::max(1, static_cast<int>(std::ceil(rects[id].height * scale))) + 2 * padding;
    int x = 0, y = 0;
    if (!skyline.findSpot(w, h, resolution, x, y)) return attempt;
    skyline.place(x, w, y + h);
    attempt.origin[id] = Eigen::Vector2i(x, y);
  }
  attempt.ok = true;
  return attempt;
}

}  // namespace

AtlasLayout packAtlas(const std::vector<Chart>& charts, const PackOptions& options) {
  if (charts.empty()) throw Error(ErrorCode::EmptyMesh, "no charts to pack");
  if (options.resolution < 1 || options.padding < 0 ||
      2 * options.padding + 1 > options.resolution) {
    throw Error(ErrorCode::InvalidConfig, "atlas resolution too small for the padding");
  }

  const int n = static_cast<int>(charts.size());
  std::vector<RawRect> rects(n);
  for (int i = 0; i < n; ++i) {
    if (!charts[i].parameterized()) {
      throw Error(ErrorCode::InvalidConfig, "packing needs parameterized charts");
    }
    Eigen::Vector2d hi = Eigen::Vector2d::Zero();
    for (const auto& corners : charts[i].cornerUvs) {
      for (const auto& uv : corners) hi = hi.cwiseMax(uv);
    }
    rects[i].width = hi.x();
    rects[i].height = hi.y();
    if (rects[i].height > rects[i].width) {
      std::swap(rects[i].width, rects[i].height);
      rects[i].rotated = true;
    }
  }

  // Tallest first, then widest, then id; ties can't reorder nondeterministically.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (rects[a].height != rects[b].height) return rects[a].height > rects[b].height;
    if (rects[a].width != rects[b].width) return rects[a].width > rects[b].width;
    return a < b;
  });

  AtlasLayout layout;
  layout.resolution = options.resolution;

  for (int round = 0;; ++round) {
    const int res = layout.resolution;
    const int pad = options.padding;

    // Initial scale: solve sum (w*s + 2p)(h*s + 2p) = targetFill * res^2.
    double sumWh = 0, sumWplusH = 0;
    double maxSide = 0;
    for (const RawRect& r : rects) {
      sumWh += r.width * r.height;
      sumWplusH += r.width + r.height;
      maxSide = std::max(maxSide, r.width);
    }
    double scale;
    const double a = sumWh;
    const double b = 2.0 * pad * sumWplusH;
    const double c = 4.0 * static_cast<double>(pad) * pad * n -
                     options.targetFill * static_cast<double>(res) * res;
    if (a <= 0) {
      scale = 1.0;  // all charts degenerate to points; rects are padding only
    } else if (c >= 0) {
      scale = 1e-3;  // padding alone already exceeds the target fill
    } else {
      scale = (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
    }
    if (maxSide > 0) {
      scale = std::min(scale, (res - 2.0 * pad - 1.0) / maxSide);
    }

    bool packed = false;
    for (int attempt = 0; attempt < 400 && scale > 0; ++attempt) {
      const PackAttempt result = tryPack(rects, order, scale, res, pad);
      if (result.ok) {
        layout.placements.assign(n, ChartPlacement{});
        double contentArea = 0;
        for (int i = 0; i < n; ++i) {
          ChartPlacement& p = layout.placements[i];
          p.scale = scale;
          p.rotated = rects[i].rotated;
          p.translate =
              (result.origin[i] + Eigen::Vector2i(pad, pad)).cast<double>();
          // rects are canonical landscape, so w x h is the rect as placed.
          const double w = rects[i].width * scale;
          const double h = rects[i].height * scale;
          p.contentSize = Eigen::Vector2d(w, h);
          contentArea += w * h;
        }
        layout.occupancy = contentArea / (static_cast<double>(res) * res);
        packed = true;
        break;
      }
      scale *= options.shrinkFactor;
    }
    if (packed) return layout;

    if (options.allowUpscale && round == 0) {
      layout.resolution *= 2;
      layout.upscaled = true;
      continue;
    }
    throw Error(ErrorCode::PackOverflow, "charts do not fit in the atlas");
  }
}

}  // namespace meshforge
