#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <vector>

namespace meshforge {

// World convention, pinned: +z up, +x front, right-handed.
// Pixel (0, 0) is the top-left texel center; pixel x runs along `right()`,
// pixel y along -up.
struct OrthoCamera {
  Eigen::Vector3d direction;  // unit vector pointing into the scene
  Eigen::Vector3d up;         // unit vector, perpendicular to direction
  double halfExtent = 0.52;   // view square covers [-halfExtent, halfExtent]
  int resolution = 512;

  Eigen::Vector3d right() const { return direction.cross(up); }

  // Plane coordinates of the pixel center (u along right, v along up).
  double pixelU(int px) const {
    return -halfExtent + (px + 0.5) * (2.0 * halfExtent / resolution);
  }
  double pixelV(int py) const {
    return halfExtent - (py + 0.5) * (2.0 * halfExtent / resolution);
  }

  // Origin of the orthographic pixel ray, on the plane through the world
  // origin. The ray runs along `direction`, unbounded in both directions, so
  // depth = dot(hit, -direction) equals -t for a hit at origin + t*direction.
  Eigen::Vector3d rayOrigin(int px, int py) const {
    return pixelU(px) * right() + pixelV(py) * up;
  }

  // Orthographic projection of a world point onto (u, v, depth). Depth grows
  // toward the camera: the front-most surface has the largest depth.
  Eigen::Vector3d project(const Eigen::Vector3d& p) const {
    return {p.dot(right()), p.dot(up), p.dot(-direction)};
  }
};

// The fixed 10-camera layout: 8 side views at 45-degree azimuth steps
// (camera 0 on the +x axis looking at the +x face, up +z), then top
// (direction (0,0,-1)) and bottom (direction (0,0,+1)), both with up +y.
// Sized for meshes normalized into the radius-0.5 sphere.
std::vector<OrthoCamera> standardCameras(int resolution, double halfExtent = 0.52);

// `count` cameras looking at the origin from golden-angle spiral directions
// (z descending from +1 to -1), evenly spread over the sphere.
std::vector<OrthoCamera> fibonacciCameras(int count, int resolution, double halfExtent = 0.52);

}  // namespace meshforge
