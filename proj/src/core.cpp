#include "fecseg/core.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "fecseg/error.hpp"

namespace fecseg {

bool Point3::finite() const noexcept {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

namespace {

void require_finite(const Point3& p, std::size_t index) {
  if (!p.finite()) {
    throw NonFiniteError(index, "non-finite coordinate at point " +
                                    std::to_string(index));
  }
}

}  // namespace

PointCloud::PointCloud(std::vector<Point3> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) require_finite(points_[i], i);
}

void PointCloud::push_back(const Point3& p) {
  require_finite(p, points_.size());
  points_.push_back(p);
}

PointCloud PointCloud::subset(std::span<const std::uint32_t> indices) const {
  PointCloud out;
  out.points_.reserve(indices.size());
  for (const auto i : indices) out.points_.push_back(points_.at(i));
  return out;
}

void ClusterParams::validate() const {
  if (!(d_th > 0.0) || !std::isfinite(d_th)) {
    throw ParameterError("d_th must be a positive finite distance");
  }
  if (th_max < 1) throw ParameterError("th_max must be >= 1");
  if (min_cluster_size > max_cluster_size) {
    throw ParameterError("min_cluster_size exceeds max_cluster_size");
  }
}

LabelMap compact_labels(std::span<const Label> labels) {
  LabelMap out(labels.size(), 0);
  std::unordered_map<Label, Label> remap;
  Label next = 1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label l = labels[i];
    if (l == 0) continue;
    auto [it, inserted] = remap.try_emplace(l, next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return out;
}

std::size_t count_clusters(std::span<const Label> labels) {
  std::unordered_map<Label, bool> seen;
  for (const Label l : labels) {
    if (l != 0) seen.try_emplace(l, true);
  }
  return seen.size();
}

LabelMap filter_cluster_sizes(std::span<const Label> labels,
                              std::size_t min_size, std::size_t max_size) {
  std::unordered_map<Label, std::size_t> sizes;
  for (const Label l : labels) {
    if (l != 0) ++sizes[l];
  }
  LabelMap kept(labels.begin(), labels.end());
  for (auto& l : kept) {
    if (l == 0) continue;
    const auto n = sizes[l];
    if (n < min_size || n > max_size) l = 0;
  }
  return compact_labels(kept);
}

}  // namespace fecseg
