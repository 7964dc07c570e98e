#include "fecseg/fec.hpp"

#include <chrono>
#include <numeric>
#include <utility>
#include <vector>

#include "fecseg/error.hpp"

namespace fecseg {

namespace {

constexpr std::uint32_t kNone = 0xffffffffu;

// Literal relabeling: every merge rescans the whole label array.
class SweepLabels {
 public:
  explicit SweepLabels(std::size_t n) : labels_(n, 0) {}

  [[nodiscard]] Label get(std::uint32_t i) const { return labels_[i]; }
  void assign(std::uint32_t i, Label l) { labels_[i] = l; }
  void merge(Label dying, Label survivor) {
    for (auto& l : labels_) {
      if (l == dying) l = survivor;
    }
  }
  [[nodiscard]] LabelMap release() { return std::move(labels_); }

 private:
  LabelMap labels_;
};

// Each live segment owns a member list ("slot"), kept as an intrusive linked
// list. A merge walks the smaller list to repoint its members, splices it onto
// the larger one and gives the survivor the smaller label value, so the
// observable labels match SweepLabels exactly.
class IndexedLabels {
 public:
  explicit IndexedLabels(std::size_t n)
      : slot_of_(n, kNone), next_(n, kNone), label_slot_(n + 2, kNone) {}

  [[nodiscard]] Label get(std::uint32_t i) const {
    const auto s = slot_of_[i];
    return s == kNone ? 0 : slots_[s].label;
  }

  void assign(std::uint32_t i, Label l) {
    auto s = label_slot_[l];
    if (s == kNone) {
      s = static_cast<std::uint32_t>(slots_.size());
      slots_.push_back({l, i, i, 0});
      label_slot_[l] = s;
    } else {
      next_[slots_[s].tail] = i;
      slots_[s].tail = i;
    }
    ++slots_[s].size;
    slot_of_[i] = s;
  }

  void merge(Label dying, Label survivor) {
    auto from = label_slot_[dying];
    auto into = label_slot_[survivor];
    if (slots_[from].size > slots_[into].size) std::swap(from, into);
    for (auto i = slots_[from].head; i != kNone; i = next_[i]) slot_of_[i] = into;
    next_[slots_[into].tail] = slots_[from].head;
    slots_[into].tail = slots_[from].tail;
    slots_[into].size += slots_[from].size;
    slots_[into].label = survivor;
    label_slot_[survivor] = into;
    label_slot_[dying] = kNone;
  }

  [[nodiscard]] LabelMap release() {
    LabelMap out(slot_of_.size(), 0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = get(static_cast<std::uint32_t>(i));
    return out;
  }

 private:
  struct Slot {
    Label label;
    std::uint32_t head;
    std::uint32_t tail;
    std::uint32_t size;
  };

  std::vector<std::uint32_t> slot_of_;
  std::vector<std::uint32_t> next_;
  std::vector<std::uint32_t> label_slot_;
  std::vector<Slot> slots_;
};

template <typename Store>
LabelMap point_wise_pass(const PointCloud& cloud, const KdTree3& tree,
                         const ClusterParams& params, FecTraversal traversal,
                         RunStats& stats) {
  const auto n = static_cast<std::uint32_t>(cloud.size());
  Store store(n);
  Label seg_lab = 1;
  std::vector<Neighbor> hits;

  for (std::uint32_t i = 0; i < n; ++i) {
    const bool unlabeled = store.get(i) == 0;
    if (!unlabeled && traversal == FecTraversal::kSkipLabeled) continue;

    tree.radius_search(cloud[i], params.d_th, params.th_max, hits);
    ++stats.neighbor_queries;

    Label min_lab = seg_lab;
    for (const auto& h : hits) {
      const Label l = store.get(h.index);
      if (l != 0 && l < min_lab) min_lab = l;
    }
    // A label already merged reads back as min_lab, so each distinct larger
    // label is relabeled once.
    for (const auto& h : hits) {
      const Label l = store.get(h.index);
      if (l > min_lab) {
        store.merge(l, min_lab);
        ++stats.merge_relabels;
      }
    }
    for (const auto& h : hits) {
      if (store.get(h.index) == 0) store.assign(h.index, min_lab);
    }
    // Duplicates with lower indices can crowd the query point out of a
    // capped result.
    if (store.get(i) == 0) store.assign(i, min_lab);

    if (unlabeled) ++seg_lab;
  }
  stats.peak_label = seg_lab - 1;
  return store.release();
}

}  // namespace

ClusterResult fec_cluster(const PointCloud& cloud, const ClusterParams& params,
                          const FecOptions& options) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();

  ClusterResult result;
  if (!cloud.empty()) {
    const KdTree3 tree(cloud, options.leaf_size);
    LabelMap raw =
        options.merge == FecMerge::kIndexed
            ? point_wise_pass<IndexedLabels>(cloud, tree, params,
                                             options.traversal, result.stats)
            : point_wise_pass<SweepLabels>(cloud, tree, params,
                                           options.traversal, result.stats);
    result.labels = filter_cluster_sizes(raw, params.min_cluster_size,
                                         params.max_cluster_size);
  }
  result.stats.cluster_count = count_clusters(result.labels);
  result.stats.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

LabelMap oracle_cluster(const PointCloud& cloud, double d_th) {
  if (!(d_th > 0.0)) throw ParameterError("d_th must be positive");
  const std::size_t n = cloud.size();
  std::vector<std::size_t> parent(n);
  std::vector<std::size_t> rank(n, 0);
  std::iota(parent.begin(), parent.end(), std::size_t{0});

  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!is_neighbor(cloud[i], cloud[j], d_th)) continue;
      auto a = find(i);
      auto b = find(j);
      if (a == b) continue;
      if (rank[a] < rank[b]) std::swap(a, b);
      parent[b] = a;
      if (rank[a] == rank[b]) ++rank[a];
    }
  }

  LabelMap roots(n);
  for (std::size_t i = 0; i < n; ++i) {
    roots[i] = static_cast<Label>(find(i) + 1);
  }
  return compact_labels(roots);
}

}  // namespace fecseg
