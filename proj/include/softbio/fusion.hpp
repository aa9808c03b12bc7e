#pragma once

#include <optional>
#include <span>

#include "softbio/error.hpp"

namespace softbio {

enum class NormMethod { kMinMax, kZScore };

// Score normalizer with parameters fit from training scores. Degenerate fits
// (fewer than 2 distinct values) map every input to a constant: 0.5 for
// min-max, 0 for z-score.
class Normalizer {
 public:
  static Normalizer fit(std::span<const double> training, NormMethod method);

  double apply(double score) const;
  double operator()(double score) const { return apply(score); }

  NormMethod method() const { return method_; }
  bool degenerate() const { return degenerate_; }
  // min / max for min-max; mean / sample std for z-score.
  double param_a() const { return a_; }
  double param_b() const { return b_; }

 private:
  Normalizer(NormMethod method, double a, double b, bool degenerate)
      : method_(method), a_(a), b_(b), degenerate_(degenerate) {}

  NormMethod method_;
  double a_;
  double b_;
  bool degenerate_;
};

struct FusionConfig {
  double face_weight = 0.5;
  double soft_weight = 0.5;
  enum class SoftMissing { kFaceOnly, kDropPair };
  SoftMissing soft_missing = SoftMissing::kFaceOnly;

  void validate() const;  // weights non-negative, summing to 1 within 1e-12
};

// Weighted sum of the normalized face and soft scores. A missing soft score
// falls back to the normalized face score alone (or drops the pair, per
// config); a missing face score always drops the pair (nullopt).
std::optional<double> fuse(std::optional<double> face_score,
                           std::optional<double> soft_score,
                           const Normalizer& face_norm,
                           const Normalizer& soft_norm,
                           const FusionConfig& cfg = {});

}  // namespace softbio
