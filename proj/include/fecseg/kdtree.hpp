#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "fecseg/core.hpp"

namespace fecseg {

/// Result of a radius or k-nearest query. Sorted ascending by distance, ties
/// by ascending point index; indices refer to the indexed cloud's order.
struct NeighborSet {
  std::vector<std::uint32_t> indices;
  std::vector<double> distances;  ///< meters

  [[nodiscard]] std::size_t size() const noexcept { return indices.size(); }
  [[nodiscard]] bool empty() const noexcept { return indices.empty(); }
};

/// Unordered hit used by the hot-path search.
struct Neighbor {
  std::uint32_t index;
  double squared_distance;
};

/// Static kd-tree over a PointCloud. The split axis cycles x -> y -> z with
/// depth and each inner node splits at the median point. The tree keeps a
/// reference to the cloud, which must outlive it. Queries are const and
/// safe to run concurrently.
class KdTree3 {
 public:
  static constexpr std::size_t kDefaultLeafSize = 16;

  explicit KdTree3(const PointCloud& cloud,
                   std::size_t leaf_size = kDefaultLeafSize);

  /// Points with distance <= radius, truncated to the `cap` nearest.
  [[nodiscard]] NeighborSet radius_query(const Point3& query, double radius,
                                         std::size_t cap = kUnbounded) const;

  /// The k nearest points (fewer if the cloud is smaller), exact.
  [[nodiscard]] NeighborSet knn_query(const Point3& query, std::size_t k) const;

  /// Same hit set as radius_query but unsorted and without the sqrt, written
  /// into caller-owned storage. When more than `cap` points qualify, the
  /// `cap` nearest (ties by index) are kept.
  void radius_search(const Point3& query, double radius, std::size_t cap,
                     std::vector<Neighbor>& out) const;

  [[nodiscard]] std::size_t size() const noexcept { return order_.size(); }
  [[nodiscard]] std::size_t leaf_size() const noexcept { return leaf_size_; }
  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }

  /// Every cloud index appears exactly once across the leaves.
  [[nodiscard]] const std::vector<std::uint32_t>& leaf_order() const noexcept {
    return order_;
  }

 private:
  static constexpr std::uint32_t kLeaf = 0xffffffffu;

  struct Node {
    std::array<double, 3> lo;
    std::array<double, 3> hi;
    std::uint32_t begin;
    std::uint32_t end;
    std::uint32_t left;   // kLeaf for leaves
    std::uint32_t right;
  };

  struct Entry {
    std::array<double, 3> c;
    std::uint32_t index;
  };

  std::uint32_t build(std::vector<Entry>& entries, std::uint32_t begin,
                      std::uint32_t end, unsigned depth);
  [[nodiscard]] double box_squared_distance(const Node& node,
                                            const Point3& q) const noexcept;

  std::size_t leaf_size_;
  std::vector<std::uint32_t> order_;
  std::vector<std::array<double, 3>> coords_;  ///< coordinates in order_ order
  std::vector<Node> nodes_;
};

}  // namespace fecseg
