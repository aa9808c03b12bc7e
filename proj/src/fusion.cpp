#include "softbio/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace softbio {

Normalizer Normalizer::fit(std::span<const double> training,
                           NormMethod method) {
  if (training.empty())
    throw DataError("cannot fit a normalizer on an empty training set");
  for (double s : training)
    if (!std::isfinite(s))
      throw DataError("non-finite score in normalizer training set");

  if (method == NormMethod::kMinMax) {
    const auto [lo, hi] = std::minmax_element(training.begin(), training.end());
    return Normalizer(method, *lo, *hi, *lo == *hi);
  }

  double sum = 0.0;
  for (double s : training) sum += s;
  const double mean = sum / training.size();
  double ss = 0.0;
  for (double s : training) ss += (s - mean) * (s - mean);
  const double std_dev =
      training.size() > 1 ? std::sqrt(ss / (training.size() - 1)) : 0.0;
  return Normalizer(method, mean, std_dev, std_dev == 0.0);
}

double Normalizer::apply(double score) const {
  if (method_ == NormMethod::kMinMax) {
    if (degenerate_) return 0.5;
    return (score - a_) / (b_ - a_);
  }
  if (degenerate_) return 0.0;
  return (score - a_) / b_;
}

void FusionConfig::validate() const {
  if (face_weight < 0.0 || soft_weight < 0.0)
    throw UsageError("fusion weights must be non-negative");
  if (std::abs(face_weight + soft_weight - 1.0) > 1e-12)
    throw UsageError("fusion weights must sum to 1");
}

std::optional<double> fuse(std::optional<double> face_score,
                           std::optional<double> soft_score,
                           const Normalizer& face_norm,
                           const Normalizer& soft_norm,
                           const FusionConfig& cfg) {
  cfg.validate();
  if (!face_score) return std::nullopt;  // face is the primary evidence
  if (!soft_score) {
    if (cfg.soft_missing == FusionConfig::SoftMissing::kDropPair)
      return std::nullopt;
    return face_norm(*face_score);
  }
  return cfg.face_weight * face_norm(*face_score) +
         cfg.soft_weight * soft_norm(*soft_score);
}

}  // namespace softbio
