#include "meshforge/render/camera.h"

#include <cmath>

namespace meshforge {

std::vector<OrthoCamera> standardCameras(int resolution, double halfExtent) {
  // Exact azimuth table so axis-aligned views have exactly zero components.
  const double s2 = std::sqrt(0.5);
  const double cosA[8] = {1, s2, 0, -s2, -1, -s2, 0, s2};
  const double sinA[8] = {0, s2, 1, s2, 0, -s2, -1, -s2};

  std::vector<OrthoCamera> cams(10);
  for (int k = 0; k < 8; ++k) {
    cams[k].direction = Eigen::Vector3d(-cosA[k], -sinA[k], 0.0);
    cams[k].up = Eigen::Vector3d(0, 0, 1);
  }
  cams[8].direction = Eigen::Vector3d(0, 0, -1);  // top, looking down
  cams[8].up = Eigen::Vector3d(0, 1, 0);
  cams[9].direction = Eigen::Vector3d(0, 0, 1);  // bottom, looking up
  cams[9].up = Eigen::Vector3d(0, 1, 0);
  for (auto& cam : cams) {
    cam.halfExtent = halfExtent;
    cam.resolution = resolution;
  }
  return cams;
}

std::vector<OrthoCamera> fibonacciCameras(int count, int resolution, double halfExtent) {
  std::vector<OrthoCamera> cams(count);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    double z = 1.0 - 2.0 * (i + 0.5) / count;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double a = golden * i;
    Eigen::Vector3d viewpoint(r * std::cos(a), r * std::sin(a), z);
    cams[i].direction = -viewpoint;
    Eigen::Vector3d ref =
        std::abs(z) < 0.9 ? Eigen::Vector3d(0, 0, 1) : Eigen::Vector3d(0, 1, 0);
    cams[i].up = cams[i].direction.cross(ref).normalized();
    cams[i].halfExtent = halfExtent;
    cams[i].resolution = resolution;
  }
  return cams;
}

}  // namespace meshforge
