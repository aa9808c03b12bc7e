#pragma once

#include <cstddef>
#include <vector>

#include "softbio/error.hpp"

namespace softbio {

// Labeled scores for one evaluation unit. Higher score = more genuine.
struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

struct RocPoint {
  double threshold;
  double far;  // impostors accepted: score >= threshold
  double frr;  // genuines rejected: score < threshold
};

// Operating points at every distinct score, ascending, plus a final point
// above the maximum (far 0, frr 1). far is non-increasing and frr
// non-decreasing along the curve.
std::vector<RocPoint> roc_curve(const ScoreSet& scores);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
  // All scores identical; both error rates jump past each other and the
  // reported 0.5 is the interpolation convention, not an operating point.
  bool degenerate = false;
};

// Equal error rate: the FAR=FRR crossing of the threshold sweep, linearly
// interpolated between the two thresholds bracketing the sign change of
// FAR-FRR; with multiple crossings the one at the lowest threshold wins.
EerResult eer_detail(const ScoreSet& scores);
double eer(const ScoreSet& scores);

// (genuines >= t) + (impostors < t), over the total count.
double accuracy_at_threshold(const ScoreSet& scores, double threshold);

// Threshold minimizing the half-total error rate (FAR+FRR)/2 on the given
// scores; ties resolve to the lowest threshold.
double train_hter_threshold(const ScoreSet& scores);

struct FoldReport {
  std::vector<int> fold_ids;  // parallel to the per-fold vectors
  std::vector<double> fold_eer;
  double eer_mean = 0.0;
  double eer_std = 0.0;  // sample (n-1)

  bool has_accuracy = false;
  std::vector<double> fold_threshold;
  std::vector<double> fold_accuracy;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;

  std::size_t scored_pairs = 0;
  std::size_t dropped_pairs = 0;
};

// Per-fold EER over pre-split score sets (index = fold). When
// train_threshold is set, each fold's decision threshold is trained on the
// union of the other folds by minimizing HTER and the fold's accuracy at
// that threshold is reported.
FoldReport cross_validate(const std::vector<ScoreSet>& folds,
                          bool train_threshold);

// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_std(const std::vector<double>& values);

}  // namespace softbio
