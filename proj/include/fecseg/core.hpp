#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace fecseg {

/// One 3-D sample. Coordinates are meters; intensity is carried through I/O
/// but never read by the clusterers.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::optional<float> intensity;

  [[nodiscard]] bool finite() const noexcept;
};

[[nodiscard]] inline double squared_distance(const Point3& a,
                                             const Point3& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

/// Within-cluster neighbor relation: ||a - b||_2 <= d_th (inclusive).
[[nodiscard]] inline bool is_neighbor(const Point3& a, const Point3& b,
                                      double d_th) noexcept {
  return squared_distance(a, b) <= d_th * d_th;
}

/// Ordered point collection. Index order is part of the data: the point-wise
/// clusterer visits points in this order. Every stored coordinate is finite.
class PointCloud {
 public:
  PointCloud() = default;

  /// Throws NonFiniteError naming the first offending index.
  explicit PointCloud(std::vector<Point3> points);

  void push_back(const Point3& p);
  void reserve(std::size_t n) { points_.reserve(n); }

  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
  [[nodiscard]] const Point3& operator[](std::size_t i) const noexcept {
    return points_[i];
  }
  [[nodiscard]] std::span<const Point3> points() const noexcept {
    return points_;
  }
  [[nodiscard]] auto begin() const noexcept { return points_.begin(); }
  [[nodiscard]] auto end() const noexcept { return points_.end(); }

  /// Cloud made of the given indices, in the given order.
  [[nodiscard]] PointCloud subset(std::span<const std::uint32_t> indices) const;

 private:
  std::vector<Point3> points_;
};

/// 0 = unlabeled / filtered out, >= 1 = cluster id.
using Label = std::uint32_t;
using LabelMap = std::vector<Label>;

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct ClusterParams {
  double d_th = 0.0;                 ///< neighbor radius, meters
  std::size_t th_max = kUnbounded;   ///< cap on neighbors per radius query
  std::size_t min_cluster_size = 0;
  std::size_t max_cluster_size = kUnbounded;

  /// Throws ParameterError.
  void validate() const;
};

struct RunStats {
  std::uint64_t neighbor_queries = 0;
  std::uint64_t merge_relabels = 0;
  std::uint64_t peak_label = 0;
  std::uint64_t cluster_count = 0;
  double wall_time_seconds = 0.0;
};

struct ClusterResult {
  LabelMap labels;
  RunStats stats;
};

/// Renumbers nonzero labels to 1..K by first occurrence in index order;
/// zeros stay zero. The induced partition is unchanged.
[[nodiscard]] LabelMap compact_labels(std::span<const Label> labels);

/// Number of distinct nonzero labels.
[[nodiscard]] std::size_t count_clusters(std::span<const Label> labels);

/// Zeroes every cluster whose size lies outside [min_size, max_size], then
/// compacts. Used by every clusterer so filtering is identical across them.
[[nodiscard]] LabelMap filter_cluster_sizes(std::span<const Label> labels,
                                            std::size_t min_size,
                                            std::size_t max_size);

}  // namespace fecseg
