#include "fecseg/preprocess.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "fecseg/error.hpp"

namespace fecseg {

namespace {

struct Plane {
  Eigen::Vector3d normal;
  double offset;
};

Eigen::Vector3d vec(const Point3& p) { return {p.x, p.y, p.z}; }

Plane upward(Eigen::Vector3d normal, const Eigen::Vector3d& on_plane) {
  normal.normalize();
  if (normal.z() < 0.0) normal = -normal;
  return {normal, -normal.dot(on_plane)};
}

bool within_tilt(const Plane& plane, double max_tilt) {
  return plane.normal.z() >= std::cos(max_tilt);
}

std::vector<std::uint32_t> inliers_of(const PointCloud& cloud,
                                      const Plane& plane, double threshold) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < cloud.size(); ++i) {
    if (std::abs(plane.normal.dot(vec(cloud[i])) + plane.offset) <= threshold) {
      out.push_back(i);
    }
  }
  return out;
}

std::size_t count_inliers(const PointCloud& cloud, const Plane& plane,
                          double threshold) {
  std::size_t count = 0;
  for (const auto& p : cloud) {
    if (std::abs(plane.normal.dot(vec(p)) + plane.offset) <= threshold) ++count;
  }
  return count;
}

// Total least squares: the plane through the centroid orthogonal to the
// direction of least variance.
Plane fit_plane(const PointCloud& cloud, const std::vector<std::uint32_t>& idx) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto i : idx) mean += vec(cloud[i]);
  mean /= static_cast<double>(idx.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto i : idx) {
    const Eigen::Vector3d d = vec(cloud[i]) - mean;
    cov.noalias() += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  return upward(solver.eigenvectors().col(0), mean);
}

}  // namespace

GroundRemoval remove_ground(const PointCloud& cloud, const GroundParams& params) {
  if (!(params.inlier_threshold > 0.0)) {
    throw ParameterError("inlier_threshold must be positive");
  }
  if (params.max_iterations < 1) {
    throw ParameterError("max_iterations must be >= 1");
  }
  GroundRemoval out{cloud, {}};
  out.model.inlier_threshold = params.inlier_threshold;
  const auto n = cloud.size();
  if (n < 3) return out;

  std::mt19937_64 rng(params.rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  bool have_best = false;
  Plane best{};
  std::size_t best_count = 0;
  for (std::uint32_t it = 0; it < params.max_iterations; ++it) {
    const auto a = pick(rng);
    const auto b = pick(rng);
    const auto c = pick(rng);
    if (a == b || b == c || a == c) continue;
    const Eigen::Vector3d pa = vec(cloud[a]);
    const Eigen::Vector3d cross = (vec(cloud[b]) - pa).cross(vec(cloud[c]) - pa);
    if (cross.norm() < 1e-12) continue;  // collinear sample
    const Plane candidate = upward(cross, pa);
    if (!within_tilt(candidate, params.max_tilt)) continue;
    const auto count = count_inliers(cloud, candidate, params.inlier_threshold);
    if (!have_best || count > best_count) {
      have_best = true;
      best = candidate;
      best_count = count;
    }
  }
  if (!have_best) return out;

  auto inliers = inliers_of(cloud, best, params.inlier_threshold);
  if (inliers.size() >= 3) {
    const Plane refined = fit_plane(cloud, inliers);
    if (within_tilt(refined, params.max_tilt)) {
      auto refit = inliers_of(cloud, refined, params.inlier_threshold);
      if (refit.size() >= inliers.size()) {
        best = refined;
        inliers = std::move(refit);
      }
    }
  }
  if (static_cast<double>(inliers.size()) <
      params.min_inlier_fraction * static_cast<double>(n)) {
    return out;
  }

  out.model.normal = {best.normal.x(), best.normal.y(), best.normal.z()};
  out.model.offset = best.offset;
  std::vector<bool> removed(n, false);
  for (const auto i : inliers) removed[i] = true;
  out.model.inlier_indices = std::move(inliers);

  PointCloud survivors;
  survivors.reserve(n - out.model.inlier_indices.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) survivors.push_back(cloud[i]);
  }
  out.survivors = std::move(survivors);
  return out;
}

}  // namespace fecseg
