#include "fecseg/metrics.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "fecseg/error.hpp"

namespace fecseg {

namespace {

std::uint64_t pair_key(Label a, Label b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

__extension__ using Wide = unsigned __int128;

Wide pairs_of(std::uint64_t n) { return Wide{n} * (n - (n > 0 ? 1 : 0)) / 2; }

}  // namespace

MatchReport average_precision(std::span<const Label> pred,
                              std::span<const Label> gt, double threshold,
                              OverlapMode mode) {
  if (pred.size() != gt.size()) throw LengthMismatchError(pred.size(), gt.size());
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ParameterError("threshold must lie in (0, 1]");
  }

  std::unordered_map<Label, std::size_t> pred_size;
  std::unordered_map<Label, std::size_t> gt_size;
  std::unordered_map<std::uint64_t, std::size_t> inter;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == 0) continue;
    ++gt_size[gt[i]];
    if (pred[i] == 0) continue;
    ++pred_size[pred[i]];
    ++inter[pair_key(pred[i], gt[i])];
  }

  std::unordered_map<Label, std::vector<std::pair<Label, std::size_t>>> overlaps;
  for (const auto& [key, count] : inter) {
    overlaps[static_cast<Label>(key >> 32)].emplace_back(
        static_cast<Label>(key & 0xffffffffu), count);
  }

  std::vector<std::pair<Label, std::size_t>> order(pred_size.begin(),
                                                   pred_size.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  MatchReport report;
  std::unordered_set<Label> paired;
  for (const auto& [p, p_size] : order) {
    Label best_gt = 0;
    double best = -1.0;
    for (const auto& [g, count] : overlaps[p]) {
      if (paired.contains(g)) continue;
      const double denom =
          mode == OverlapMode::kIoU
              ? static_cast<double>(p_size + gt_size[g] - count)
              : static_cast<double>(p_size);
      const double ov = static_cast<double>(count) / denom;
      if (ov > best || (ov == best && g < best_gt)) {
        best = ov;
        best_gt = g;
      }
    }
    if (best_gt == 0) {
      ++report.fp;
      continue;
    }
    paired.insert(best_gt);
    report.matched_pairs.push_back({p, best_gt, best});
    if (best >= threshold) {
      ++report.tp;
    } else {
      ++report.fp;
    }
  }

  const auto predicted = report.tp + report.fp;
  if (predicted > 0) {
    report.ap = static_cast<double>(report.tp) / static_cast<double>(predicted);
  } else {
    report.ap = gt_size.empty() ? 1.0 : 0.0;
  }
  return report;
}

double rand_index(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) throw LengthMismatchError(a.size(), b.size());
  const std::uint64_t n = a.size();
  if (n < 2) return 1.0;

  std::unordered_map<Label, std::uint64_t> size_a;
  std::unordered_map<Label, std::uint64_t> size_b;
  std::unordered_map<std::uint64_t, std::uint64_t> joint;
  for (std::size_t i = 0; i < n; ++i) {
    ++size_a[a[i]];
    ++size_b[b[i]];
    ++joint[pair_key(a[i], b[i])];
  }
  Wide together_a = 0;
  Wide together_b = 0;
  Wide together_both = 0;
  for (const auto& [l, c] : size_a) together_a += pairs_of(c);
  for (const auto& [l, c] : size_b) together_b += pairs_of(c);
  for (const auto& [k, c] : joint) together_both += pairs_of(c);

  const Wide total = pairs_of(n);
  const Wide disagree = together_a + together_b - 2 * together_both;
  if (disagree == 0) return 1.0;
  return static_cast<double>(total - disagree) / static_cast<double>(total);
}

}  // namespace fecseg
