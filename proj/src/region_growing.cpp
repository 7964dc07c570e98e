#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fecseg/baselines.hpp"
#include "fecseg/error.hpp"

namespace fecseg {

namespace {

constexpr double kSignEps = 1e-12;

std::array<double, 3> orient(const Eigen::Vector3d& v) {
  Eigen::Vector3d n = v.normalized();
  const bool flip =
      n.z() < -kSignEps ||
      (std::abs(n.z()) <= kSignEps &&
       (n.x() < -kSignEps || (std::abs(n.x()) <= kSignEps && n.y() < 0.0)));
  if (flip) n = -n;
  return {n.x(), n.y(), n.z()};
}

}  // namespace

std::vector<SurfaceEstimate> estimate_surface(const PointCloud& cloud,
                                              const KdTree3& tree,
                                              std::size_t k) {
  if (k < 3) throw ParameterError("k for normal estimation must be >= 3");
  if (cloud.size() < k) {
    throw ParameterError("cloud has fewer points than the normal neighborhood");
  }
  std::vector<SurfaceEstimate> out(cloud.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nn = tree.knn_query(cloud[i], k);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto j : nn.indices) {
      mean += Eigen::Vector3d(cloud[j].x, cloud[j].y, cloud[j].z);
    }
    mean /= static_cast<double>(nn.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto j : nn.indices) {
      const Eigen::Vector3d d =
          Eigen::Vector3d(cloud[j].x, cloud[j].y, cloud[j].z) - mean;
      cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(nn.size());

    solver.compute(cov);
    const Eigen::Vector3d lambda = solver.eigenvalues().cwiseMax(0.0);
    const double total = lambda.sum();
    if (!(total > 0.0)) continue;  // identical points: +z, curvature 0
    out[i].normal = orient(solver.eigenvectors().col(0));
    out[i].curvature = lambda(0) / total;
  }
  return out;
}

void RgParams::validate() const {
  if (k_normals < 3) throw ParameterError("k_normals must be >= 3");
  if (!(angle_th > 0.0 && angle_th < std::numbers::pi)) {
    throw ParameterError("angle_th must lie in (0, pi)");
  }
  if (!(curvature_th >= 0.0)) throw ParameterError("curvature_th must be >= 0");
  if (!(d_th > 0.0) || !std::isfinite(d_th)) {
    throw ParameterError("d_th must be a positive finite distance");
  }
  if (th_max < 1) throw ParameterError("th_max must be >= 1");
  if (min_cluster_size > max_cluster_size) {
    throw ParameterError("min_cluster_size exceeds max_cluster_size");
  }
}

ClusterResult rg_cluster(const PointCloud& cloud, const RgParams& params) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  ClusterResult result;

  const auto n = static_cast<std::uint32_t>(cloud.size());
  if (n > 0) {
    const KdTree3 tree(cloud);
    const auto surface = estimate_surface(cloud, tree, params.k_normals);

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return surface[a].curvature < surface[b].curvature;
                     });

    // Angles between normal lines never exceed 90 degrees, so a threshold at
    // or beyond that accepts every neighbor.
    const double cos_th =
        params.angle_th >= std::numbers::pi / 2 ? 0.0 : std::cos(params.angle_th);
    LabelMap labels(n, 0);
    std::vector<std::uint32_t> seeds;
    std::vector<Neighbor> hits;
    Label next = 1;

    for (const auto seed : order) {
      if (labels[seed] != 0) continue;
      labels[seed] = next;
      seeds.clear();
      seeds.push_back(seed);
      for (std::size_t head = 0; head < seeds.size(); ++head) {
        const auto current = seeds[head];
        const auto& nc = surface[current].normal;
        tree.radius_search(cloud[current], params.d_th, params.th_max, hits);
        ++result.stats.neighbor_queries;
        for (const auto& h : hits) {
          if (labels[h.index] != 0) continue;
          const auto& nh = surface[h.index].normal;
          const double c = std::abs(nc[0] * nh[0] + nc[1] * nh[1] + nc[2] * nh[2]);
          if (c < cos_th) continue;
          labels[h.index] = next;
          if (surface[h.index].curvature <= params.curvature_th) {
            seeds.push_back(h.index);
          }
        }
      }
      ++next;
    }
    result.stats.peak_label = next - 1;
    result.labels = filter_cluster_sizes(labels, params.min_cluster_size,
                                         params.max_cluster_size);
  }
  result.stats.cluster_count = count_clusters(result.labels);
  result.stats.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace fecseg
