#pragma once

#include <cstddef>

#include "fecseg/core.hpp"
#include "fecseg/kdtree.hpp"

namespace fecseg {

/// Which points issue a radius query during the point-wise pass.
enum class FecTraversal {
  /// Every point is queried in index order. Each radius-graph edge is seen
  /// from at least one endpoint, so with th_max >= N the output equals the
  /// exact Euclidean connectivity partition.
  kEveryPoint,
  /// Points already labeled by an earlier query are skipped, as in the
  /// original published procedure. Far fewer queries in dense clouds, but
  /// an edge between two points that were both labeled by other queries is
  /// never examined, so clusters can be split.
  kSkipLabeled,
};

/// How a segment merge relabels the dying segment.
enum class FecMerge {
  /// Per-segment member lists; the smaller list moves into the larger one.
  kIndexed,
  /// Rescan all N labels per merge. Reference path; identical output.
  kSweep,
};

struct FecOptions {
  FecTraversal traversal = FecTraversal::kEveryPoint;
  FecMerge merge = FecMerge::kIndexed;
  std::size_t leaf_size = KdTree3::kDefaultLeafSize;
};

/// Fast Euclidean Clustering: one point-wise pass in index order. Each
/// queried point takes the smallest label among its neighbors (or a fresh
/// one), hands it to unlabeled neighbors, and merges every larger neighbor
/// label into it.
///
/// Labels are compacted to 1..K on return. Size filters in `params` zero
/// out clusters outside the range; with the defaults every point is labeled.
/// With th_max < N a capped query can hide a bridge, so exact connectivity
/// is only guaranteed for th_max >= N and FecTraversal::kEveryPoint.
///
/// stats.neighbor_queries counts radius queries issued, stats.merge_relabels
/// counts whole-segment relabels, stats.peak_label is the last fresh
/// segment label issued. Wall time includes the kd-tree build.
[[nodiscard]] ClusterResult fec_cluster(const PointCloud& cloud,
                                        const ClusterParams& params,
                                        const FecOptions& options = {});

/// Brute-force union-find over all point pairs within d_th. O(N^2); the
/// ground-truth connectivity partition for tests. Compacted labels.
[[nodiscard]] LabelMap oracle_cluster(const PointCloud& cloud, double d_th);

}  // namespace fecseg
