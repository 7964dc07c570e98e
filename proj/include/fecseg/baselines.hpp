#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <vector>

#include "fecseg/core.hpp"
#include "fecseg/kdtree.hpp"

namespace fecseg {

/// Cluster-wise Euclidean cluster extraction: seed at the lowest unprocessed
/// index, grow a breadth-first frontier with radius queries until it is
/// exhausted, emit the cluster, repeat. A visited mask admits each point to
/// the frontier once. Clusters outside the size range get label 0.
[[nodiscard]] ClusterResult ec_cluster(const PointCloud& cloud,
                                       const ClusterParams& params);

struct SurfaceEstimate {
  std::array<double, 3> normal{0.0, 0.0, 1.0};  ///< unit length
  double curvature = 0.0;  ///< lambda0 / (lambda0 + lambda1 + lambda2)
};

/// PCA over each point's k nearest neighbors (self included). The normal is
/// the eigenvector of the smallest covariance eigenvalue, flipped into the
/// +z hemisphere (ties toward +x, then +y). An all-identical neighborhood
/// yields normal +z and curvature 0. Requires cloud.size() >= k >= 3.
[[nodiscard]] std::vector<SurfaceEstimate> estimate_surface(
    const PointCloud& cloud, const KdTree3& tree, std::size_t k);

struct RgParams {
  std::size_t k_normals = 30;
  double angle_th = 3.0 * std::numbers::pi / 180.0;  ///< radians
  double curvature_th = 1.0;
  double d_th = 0.0;  ///< growth radius, meters
  std::size_t th_max = kUnbounded;
  std::size_t min_cluster_size = 0;
  std::size_t max_cluster_size = kUnbounded;

  /// Throws ParameterError.
  void validate() const;
};

/// Region growing. Seeds are taken in ascending curvature order (ties by
/// index). A radius neighbor joins the region when the angle between its
/// normal and the current point's normal is within angle_th, compared as
/// |cos| so normal sign flips cannot split a surface. Joined points whose
/// curvature is <= curvature_th keep growing the region.
[[nodiscard]] ClusterResult rg_cluster(const PointCloud& cloud,
                                       const RgParams& params);

}  // namespace fecseg
