#include "fecseg/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "fecseg/error.hpp"

namespace fecseg {

namespace {

double coord(const Point3& p, unsigned axis) noexcept {
  switch (axis) {
    case 0: return p.x;
    case 1: return p.y;
    default: return p.z;
  }
}

bool closer(const Neighbor& a, const Neighbor& b) noexcept {
  if (a.squared_distance != b.squared_distance) {
    return a.squared_distance < b.squared_distance;
  }
  return a.index < b.index;
}

double squared_distance(const std::array<double, 3>& a,
                        const std::array<double, 3>& b) noexcept {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

NeighborSet to_sorted_set(std::vector<Neighbor>& hits) {
  std::sort(hits.begin(), hits.end(), closer);
  NeighborSet out;
  out.indices.reserve(hits.size());
  out.distances.reserve(hits.size());
  for (const auto& h : hits) {
    out.indices.push_back(h.index);
    out.distances.push_back(std::sqrt(h.squared_distance));
  }
  return out;
}

}  // namespace

KdTree3::KdTree3(const PointCloud& cloud, std::size_t leaf_size)
    : leaf_size_(leaf_size) {
  if (leaf_size_ < 1) throw ParameterError("leaf_size must be >= 1");
  if (cloud.size() >= kLeaf) throw ParameterError("cloud too large for index");
  const auto n = static_cast<std::uint32_t>(cloud.size());
  if (n == 0) return;

  std::vector<Entry> entries(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    entries[i] = {{cloud[i].x, cloud[i].y, cloud[i].z}, i};
  }
  nodes_.reserve(2 * (n / leaf_size_ + 1));
  build(entries, 0, n, 0);

  order_.resize(n);
  coords_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    order_[i] = entries[i].index;
    coords_[i] = entries[i].c;
  }
}

std::uint32_t KdTree3::build(std::vector<Entry>& entries, std::uint32_t begin,
                             std::uint32_t end, unsigned depth) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({{}, {}, begin, end, kLeaf, kLeaf});

  if (end - begin <= leaf_size_) {
    Node& leaf = nodes_[id];
    leaf.lo = entries[begin].c;
    leaf.hi = leaf.lo;
    for (auto i = begin + 1; i < end; ++i) {
      for (unsigned a = 0; a < 3; ++a) {
        leaf.lo[a] = std::min(leaf.lo[a], entries[i].c[a]);
        leaf.hi[a] = std::max(leaf.hi[a], entries[i].c[a]);
      }
    }
    return id;
  }

  const unsigned axis = depth % 3;
  const auto mid = begin + (end - begin) / 2;
  std::nth_element(entries.begin() + begin, entries.begin() + mid,
                   entries.begin() + end, [axis](const Entry& a, const Entry& b) {
                     return a.c[axis] != b.c[axis] ? a.c[axis] < b.c[axis]
                                                   : a.index < b.index;
                   });
  const auto left = build(entries, begin, mid, depth + 1);
  const auto right = build(entries, mid, end, depth + 1);
  Node& node = nodes_[id];
  node.left = left;
  node.right = right;
  for (unsigned a = 0; a < 3; ++a) {
    node.lo[a] = std::min(nodes_[left].lo[a], nodes_[right].lo[a]);
    node.hi[a] = std::max(nodes_[left].hi[a], nodes_[right].hi[a]);
  }
  return id;
}

double KdTree3::box_squared_distance(const Node& node,
                                     const Point3& q) const noexcept {
  double d2 = 0.0;
  for (unsigned a = 0; a < 3; ++a) {
    const double c = coord(q, a);
    double d = 0.0;
    if (c < node.lo[a]) {
      d = node.lo[a] - c;
    } else if (c > node.hi[a]) {
      d = c - node.hi[a];
    }
    d2 += d * d;
  }
  return d2;
}

void KdTree3::radius_search(const Point3& query, double radius,
                            std::size_t cap, std::vector<Neighbor>& out) const {
  out.clear();
  if (nodes_.empty() || cap == 0) return;
  const double r2 = radius * radius;
  const std::array<double, 3> q{query.x, query.y, query.z};

  std::uint32_t stack[128];
  std::size_t top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_squared_distance(node, query) > r2) continue;
    if (node.left == kLeaf) {
      for (auto i = node.begin; i < node.end; ++i) {
        const double d2 = squared_distance(coords_[i], q);
        if (d2 <= r2) out.push_back({order_[i], d2});
      }
    } else {
      stack[top++] = node.right;
      stack[top++] = node.left;
    }
  }

  if (out.size() > cap) {
    std::nth_element(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(cap),
                     out.end(), closer);
    out.resize(cap);
  }
}

NeighborSet KdTree3::radius_query(const Point3& query, double radius,
                                  std::size_t cap) const {
  std::vector<Neighbor> hits;
  radius_search(query, radius, cap, hits);
  return to_sorted_set(hits);
}

NeighborSet KdTree3::knn_query(const Point3& query, std::size_t k) const {
  std::vector<Neighbor> heap;
  if (nodes_.empty() || k == 0) return {};
  heap.reserve(k + 1);
  const std::array<double, 3> q{query.x, query.y, query.z};

  // Max-heap on (distance, index): the root is the current worst kept hit.
  std::uint32_t stack[128];
  std::size_t top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (heap.size() == k &&
        box_squared_distance(node, query) > heap.front().squared_distance) {
      continue;
    }
    if (node.left == kLeaf) {
      for (auto i = node.begin; i < node.end; ++i) {
        const Neighbor cand{order_[i], squared_distance(coords_[i], q)};
        if (heap.size() < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end(), closer);
        } else if (closer(cand, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), closer);
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end(), closer);
        }
      }
    } else {
      // Visit the child on the query's side of the split first.
      const Node& l = nodes_[node.left];
      const Node& r = nodes_[node.right];
      if (box_squared_distance(l, query) <= box_squared_distance(r, query)) {
        stack[top++] = node.right;
        stack[top++] = node.left;
      } else {
        stack[top++] = node.left;
        stack[top++] = node.right;
      }
    }
  }
  return to_sorted_set(heap);
}

}  // namespace fecseg
