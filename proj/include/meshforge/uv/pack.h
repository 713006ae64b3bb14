#pragma once

#include "meshforge/uv/charts.h"

namespace meshforge {

// Where one chart landed in the atlas. Chart-local UVs map to atlas pixel
// coordinates as: scale, optional 90-degree rotation, then translate.
struct ChartPlacement {
  double scale = 1.0;
  bool rotated = false;               // chart was taller than wide
  Eigen::Vector2d translate{0, 0};    // pixels, content origin (inside padding)
  Eigen::Vector2d contentSize{0, 0};  // pixels, after rotation

  Eigen::Vector2d apply(const Eigen::Vector2d& uv) const {
    Eigen::Vector2d p = scale * uv;
    // Proper rotation (not a mirror): orientation of UV triangles survives.
    if (rotated) p = Eigen::Vector2d(p.y(), contentSize.y() - p.x());
    return translate + p;
  }
};

struct AtlasLayout {
  int resolution = 0;
  bool upscaled = false;  // initial resolution could not fit; it was doubled
  double occupancy = 0;   // content pixels (sans padding) / atlas pixels
  std::vector<ChartPlacement> placements;  // parallel to the input charts
};

struct PackOptions {
  int resolution = 1024;
  int padding = 4;            // pixels kept free on every side of a chart
  double targetFill = 1.0;    // initial scale aims for this padded-rect coverage
  double shrinkFactor = 0.97; // scale multiplier between failed attempts
  bool allowUpscale = true;   // double the resolution once before giving up
};

// Packs parameterized charts into one square atlas. All charts share one
// scale factor so texel density stays uniform; rects are sorted by height
// then width and placed bottom-left on a skyline. If no scale fits, the
// resolution is doubled once (when allowed); after that the packer throws
// ErrorCode::PackOverflow.
AtlasLayout packAtlas(const std::vector<Chart>& charts, const PackOptions& options = {});

}  // namespace meshforge
