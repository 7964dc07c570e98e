#include <chrono>
#include <vector>

#include "fecseg/baselines.hpp"

namespace fecseg {

ClusterResult ec_cluster(const PointCloud& cloud, const ClusterParams& params) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  ClusterResult result;

  const auto n = static_cast<std::uint32_t>(cloud.size());
  if (n > 0) {
    const KdTree3 tree(cloud);
    LabelMap labels(n, 0);
    std::vector<bool> visited(n, false);
    std::vector<std::uint32_t> frontier;
    std::vector<Neighbor> hits;
    Label next = 1;

    for (std::uint32_t seed = 0; seed < n; ++seed) {
      if (visited[seed]) continue;
      frontier.clear();
      frontier.push_back(seed);
      visited[seed] = true;
      for (std::size_t head = 0; head < frontier.size(); ++head) {
        const auto current = frontier[head];
        tree.radius_search(cloud[current], params.d_th, params.th_max, hits);
        ++result.stats.neighbor_queries;
        for (const auto& h : hits) {
          if (visited[h.index]) continue;
          visited[h.index] = true;
          frontier.push_back(h.index);
        }
      }
      for (const auto i : frontier) labels[i] = next;
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
