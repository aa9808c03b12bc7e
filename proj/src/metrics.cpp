#include "softbio/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace softbio {

namespace {

void check_scores(const ScoreSet& scores) {
  if (scores.genuine.empty())
    throw DataError("score set has no genuine scores");
  if (scores.impostor.empty())
    throw DataError("score set has no impostor scores");
  for (double s : scores.genuine)
    if (!std::isfinite(s)) throw DataError("non-finite genuine score");
  for (double s : scores.impostor)
    if (!std::isfinite(s)) throw DataError("non-finite impostor score");
}

}  // namespace

std::vector<RocPoint> roc_curve(const ScoreSet& scores) {
  check_scores(scores);
  std::vector<double> gen = scores.genuine;
  std::vector<double> imp = scores.impostor;
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());

  std::vector<double> thresholds;
  thresholds.reserve(gen.size() + imp.size());
  thresholds.insert(thresholds.end(), gen.begin(), gen.end());
  thresholds.insert(thresholds.end(), imp.begin(), imp.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  const double ng = static_cast<double>(gen.size());
  const double ni = static_cast<double>(imp.size());
  std::vector<RocPoint> curve;
  curve.reserve(thresholds.size() + 1);
  for (double t : thresholds) {
    // FAR: impostors >= t; FRR: genuines < t.
    const auto imp_below = std::lower_bound(imp.begin(), imp.end(), t);
    const auto gen_below = std::lower_bound(gen.begin(), gen.end(), t);
    curve.push_back({t, (ni - (imp_below - imp.begin())) / ni,
                     (gen_below - gen.begin()) / ng});
  }
  curve.push_back({thresholds.back() + 1.0, 0.0, 1.0});
  return curve;
}

EerResult eer_detail(const ScoreSet& scores) {
  const std::vector<RocPoint> curve = roc_curve(scores);

  const auto [lo, hi] = [&] {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (double s : scores.genuine) mn = std::min(mn, s), mx = std::max(mx, s);
    for (double s : scores.impostor) mn = std::min(mn, s), mx = std::max(mx, s);
    return std::pair(mn, mx);
  }();

  EerResult result;
  result.degenerate = lo == hi;

  // FAR-FRR starts at +1 (threshold at the minimum score) and ends at -1
  // (virtual point past the maximum), so a sign change always exists.
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double diff = curve[i].far - curve[i].frr;
    if (diff > 0.0) continue;
    if (diff == 0.0 || i == 0) {
      result.eer = curve[i].far;
      result.threshold = curve[i].threshold;
      return result;
    }
    const RocPoint& prev = curve[i - 1];
    const double prev_diff = prev.far - prev.frr;
    const double alpha = prev_diff / (prev_diff - diff);
    result.eer = prev.far + alpha * (curve[i].far - prev.far);
    result.threshold =
        prev.threshold + alpha * (curve[i].threshold - prev.threshold);
    return result;
  }
  throw Error("threshold sweep found no FAR=FRR crossing");
}

double eer(const ScoreSet& scores) { return eer_detail(scores).eer; }

double accuracy_at_threshold(const ScoreSet& scores, double threshold) {
  check_scores(scores);
  if (!std::isfinite(threshold))
    throw UsageError("decision threshold must be finite");
  std::size_t correct = 0;
  for (double s : scores.genuine)
    if (s >= threshold) ++correct;
  for (double s : scores.impostor)
    if (s < threshold) ++correct;
  return static_cast<double>(correct) /
         (scores.genuine.size() + scores.impostor.size());
}

double train_hter_threshold(const ScoreSet& scores) {
  const std::vector<RocPoint> curve = roc_curve(scores);
  double best_threshold = curve.front().threshold;
  double best_hter = std::numeric_limits<double>::infinity();
  for (const RocPoint& p : curve) {
    const double hter = 0.5 * (p.far + p.frr);
    if (hter < best_hter) {
      best_hter = hter;
      best_threshold = p.threshold;
    }
  }
  return best_threshold;
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) throw DataError("mean of an empty list");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / values.size();
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (values.size() - 1))};
}

FoldReport cross_validate(const std::vector<ScoreSet>& folds,
                          bool train_threshold) {
  if (folds.size() < 2)
    throw DataError("cross-validation needs at least 2 folds, got " +
                    std::to_string(folds.size()));
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (folds[f].genuine.empty() || folds[f].impostor.empty())
      throw DataError("fold " + std::to_string(f) +
                      " is missing one score class");
  }

  FoldReport report;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    report.fold_ids.push_back(static_cast<int>(f));
    report.fold_eer.push_back(eer(folds[f]));
    report.scored_pairs += folds[f].genuine.size() + folds[f].impostor.size();
    if (!train_threshold) continue;
    ScoreSet training;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g == f) continue;
      training.genuine.insert(training.genuine.end(), folds[g].genuine.begin(),
                              folds[g].genuine.end());
      training.impostor.insert(training.impostor.end(),
                               folds[g].impostor.begin(),
                               folds[g].impostor.end());
    }
    const double t = train_hter_threshold(training);
    report.fold_threshold.push_back(t);
    report.fold_accuracy.push_back(accuracy_at_threshold(folds[f], t));
  }

  std::tie(report.eer_mean, report.eer_std) = mean_std(report.fold_eer);
  if (train_threshold) {
    report.has_accuracy = true;
    std::tie(report.accuracy_mean, report.accuracy_std) =
        mean_std(report.fold_accuracy);
  }
  return report;
}

}  // namespace softbio
