#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fecseg/core.hpp"

namespace fecseg {

/// How a predicted cluster P is scored against a ground-truth cluster G.
enum class OverlapMode {
  kIoU,        ///< |P n G| / |P u G|
  kPrecision,  ///< |P n G| / |P|
};

struct MatchedPair {
  Label predicted;
  Label ground_truth;
  double overlap;
};

struct MatchReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::vector<MatchedPair> matched_pairs;  ///< greedy matches, TP or not
  double ap = 0.0;
};

/// AP = TP / (TP + FP) over predicted clusters.
///
/// Points whose ground-truth label is 0 are dropped before anything is
/// counted; predicted label 0 means "not in any predicted cluster". Predicted
/// clusters are visited by descending size (ties by ascending label) and each
/// is paired with the still-unpaired ground-truth cluster of highest overlap
/// (ties by ascending label). The pairing does not depend on `threshold`; a
/// pair is a true positive when its overlap >= threshold. Predictions with
/// no unpaired overlapping ground truth are false positives.
///
/// Throws LengthMismatchError, ParameterError for threshold outside (0, 1].
[[nodiscard]] MatchReport average_precision(std::span<const Label> pred,
                                            std::span<const Label> gt,
                                            double threshold = 0.75,
                                            OverlapMode mode = OverlapMode::kIoU);

/// Fraction of point pairs on which the two partitions agree. Label values
/// (0 included) are treated as plain cluster ids. 1.0 exactly iff the
/// partitions are identical; 1.0 for fewer than two points.
[[nodiscard]] double rand_index(std::span<const Label> a,
                                std::span<const Label> b);

}  // namespace fecseg
