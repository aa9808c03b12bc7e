#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "softbio/io.hpp"
#include "softbio/traits.hpp"

namespace softbio {

// Deterministic samplers over mt19937_64. The engine's output sequence is
// fixed by the standard and all derived draws are computed here, so emitted
// datasets are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1)
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
  // [0, n)
  std::uint64_t uniform_below(std::uint64_t n);
  double gaussian(double mean, double std_dev);
  int categorical(std::span<const double> probabilities);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[uniform_below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// Standard normal CDF and its inverse.
double normal_cdf(double x);
double normal_quantile(double p);

// Distribution of images per subject: a fixed count or a histogram.
struct ImagesPerSubject {
  std::vector<std::pair<int, double>> histogram;  // (count, probability)

  static ImagesPerSubject fixed(int count) { return {{{count, 1.0}}}; }
  void validate() const;
};

// Instance priors mirroring the LFW population statistics.
std::array<std::vector<double>, kTraitCount> default_trait_priors();

enum class SynthAgeMode { kCategorical, kYears };

struct SynthSpec {
  int n_subjects = 0;
  ImagesPerSubject images_per_subject = ImagesPerSubject::fixed(3);
  std::array<std::vector<double>, kTraitCount> trait_priors =
      default_trait_priors();
  // Per-trait observation noise: nominal traits flip to a uniformly random
  // other instance; categorical age shifts +-1 clipped to [0,4].
  std::array<double, kTraitCount> label_noise{};
  // Std of the per-image age jitter in years mode.
  double age_drift_years = 0.0;
  SynthAgeMode age_mode = SynthAgeMode::kCategorical;
  std::uint64_t seed = 0;

  void validate() const;  // throws UsageError
};

struct SynthPopulation {
  std::vector<std::string> subject_names;
  std::vector<SoftProfile> latent;  // per subject
  std::vector<std::vector<std::string>> images_by_subject;
  std::vector<AnnotationRecord> annotations;  // observed per-image profiles
};

// One latent profile per subject drawn from the priors; each image observes
// it through the noise model. Deterministic per seed.
SynthPopulation generate_population(const SynthSpec& spec);

// Subject-disjoint folds; genuine pairs sampled without replacement from the
// same-subject image pairs of each fold, impostor pairs across subjects
// within the fold. Throws DataError with the shortfall when a fold cannot
// supply the requested pairs.
PairsFile generate_pairs(const SynthPopulation& population, int folds,
                         int per_class_per_fold, std::uint64_t seed);

// Equal-variance Gaussian score model; in target-EER form the class
// separation satisfies EER = Phi(-d'/2).
struct FaceScoreModel {
  double genuine_mean = 1.0;
  double genuine_std = 1.0;
  double impostor_mean = 0.0;
  double impostor_std = 1.0;

  static FaceScoreModel from_target_eer(double target_eer);
  void validate() const;
  // The analytic EER of the model when both stds are equal.
  double analytic_eer() const;
};

std::vector<ScoreRecord> generate_face_scores(
    std::span<const PairRecord> pairs, const FaceScoreModel& model,
    std::uint64_t seed, std::string matcher_id = "synthetic-face");

}  // namespace softbio
