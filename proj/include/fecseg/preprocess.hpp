#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <vector>

#include "fecseg/core.hpp"

namespace fecseg {

/// Plane n . p + offset = 0 with unit normal n in the +z hemisphere. An
/// empty inlier set means no ground was found.
struct GroundModel {
  std::array<double, 3> normal{0.0, 0.0, 1.0};
  double offset = 0.0;
  double inlier_threshold = 0.0;
  std::vector<std::uint32_t> inlier_indices;  ///< ascending

  [[nodiscard]] bool found() const noexcept { return !inlier_indices.empty(); }
  [[nodiscard]] double signed_distance(const Point3& p) const noexcept {
    return normal[0] * p.x + normal[1] * p.y + normal[2] * p.z + offset;
  }
};

struct GroundParams {
  double inlier_threshold = 0.2;                      ///< meters
  std::uint32_t max_iterations = 100;
  double max_tilt = 30.0 * std::numbers::pi / 180.0;  ///< radians from +z
  std::uint64_t rng_seed = 0;
  /// A plane is accepted only if it holds at least this fraction of points.
  double min_inlier_fraction = 0.10;
};

struct GroundRemoval {
  PointCloud survivors;  ///< non-inliers, original relative order
  GroundModel model;
};

/// RANSAC plane fit restricted to near-horizontal planes, refined by a
/// least-squares fit over the inliers. Clouds with fewer than 3 points, or
/// without an acceptable plane, come back unchanged with an empty model.
[[nodiscard]] GroundRemoval remove_ground(const PointCloud& cloud,
                                         const GroundParams& params);

}  // namespace fecseg
