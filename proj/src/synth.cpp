#include "softbio/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace softbio {

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) throw UsageError("uniform_below(0)");
  // Rejection sampling over the largest multiple of n.
  const std::uint64_t limit =~std::uint64_t{0} - ~std::uint64_t{0} % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double Rng::gaussian(double mean, double std_dev) {
  // Box-Muller; one fresh pair per draw keeps the stream layout simple.
  double u1;
  do {
    u1 = uniform();
  } while (u1 == 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + std_dev * r * std::cos(2.0 * M_PI * u2);
}

int Rng::categorical(std::span<const double> probabilities) {
  const double u = uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probabilities.size()) - 1;  // rounding tail
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Acklam's rational approximation, then one Halley refinement against the
// exact CDF; accurate to ~1e-15 over (0, 1).
double probit_estimate(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw UsageError("normal_quantile requires p in (0, 1)");
  double x = probit_estimate(p);
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

void ImagesPerSubject::validate() const {
  if (histogram.empty())
    throw UsageError("images-per-subject histogram is empty");
  double total = 0.0;
  for (const auto& [count, prob] : histogram) {
    if (count < 1) throw UsageError("images-per-subject counts start at 1");
    if (prob < 0.0) throw UsageError("negative images-per-subject probability");
    total += prob;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw UsageError("images-per-subject probabilities must sum to 1");
}

std::array<std::vector<double>, kTraitCount> default_trait_priors() {
  return {{
      {0.78, 0.22},                        // gender
      {0.005, 0.005, 0.08, 0.67, 0.24},    // age
      {0.815, 0.04, 0.055, 0.02, 0.07},    // ethnicity
      {0.80, 0.186, 0.014},                // glasses
      {0.06, 0.94},                        // beard
      {0.10, 0.90},                        // moustache
  }};
}

void SynthSpec::validate() const {
  if (n_subjects < 1) throw UsageError("n_subjects must be positive");
  images_per_subject.validate();
  for (int t = 0; t < kTraitCount; ++t) {
    const auto& prior = trait_priors[t];
    if (static_cast<int>(prior.size()) != instance_count(kAllTraitKinds[t]))
      throw UsageError("prior for " + trait_name(kAllTraitKinds[t]) +
                       " must list " +
                       std::to_string(instance_count(kAllTraitKinds[t])) +
                       " probabilities");
    double total = 0.0;
    for (double p : prior) {
      if (p < 0.0) throw UsageError("negative prior probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw UsageError("prior for " + trait_name(kAllTraitKinds[t]) +
                       " must sum to 1");
    if (label_noise[t] < 0.0 || label_noise[t] > 1.0)
      throw UsageError("label noise rates must lie in [0, 1]");
  }
  if (age_drift_years < 0.0)
    throw UsageError("age drift must be non-negative");
}

namespace {

// Year ranges of the five age categories under the default cuts, used to
// give latent subjects a concrete age in years mode.
constexpr std::array<std::pair<double, double>, 5> kAgeYearBins = {{
    {0.0, 3.0}, {3.0, 13.0}, {13.0, 40.0}, {40.0, 61.0}, {61.0, 90.0},
}};

std::string subject_name(int index) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "Synth_%05d", index + 1);
  return buf;
}

int flip_to_other(int current, int count, Rng& rng) {
  const int pick = static_cast<int>(rng.uniform_below(count - 1));
  return pick >= current ? pick + 1 : pick;
}

}  // namespace

SynthPopulation generate_population(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SynthPopulation pop;
  pop.subject_names.reserve(spec.n_subjects);

  std::vector<double> count_probs;
  for (const auto& [count, prob] : spec.images_per_subject.histogram)
    count_probs.push_back(prob);

  for (int s = 0; s < spec.n_subjects; ++s) {
    const std::string name = subject_name(s);
    SoftProfile latent(ProfileSource::kSynthetic);
    for (int t = 0; t < kTraitCount; ++t) {
      const TraitKind kind = kAllTraitKinds[t];
      const int code = rng.categorical(spec.trait_priors[t]);
      if (kind == TraitKind::kAge && spec.age_mode == SynthAgeMode::kYears) {
        const auto [lo, hi] = kAgeYearBins[code];
        latent.set(kind, TraitValue::years(lo + rng.uniform() * (hi - lo)));
      } else {
        latent.set(kind, TraitValue::categorical(code));
      }
    }

    const int n_images =
        spec.images_per_subject
            .histogram[rng.categorical(count_probs)]
            .first;
    std::vector<std::string> images;
    for (int i = 0; i < n_images; ++i) {
      SoftProfile observed = latent;
      for (int t = 0; t < kTraitCount; ++t) {
        const TraitKind kind = kAllTraitKinds[t];
        if (kind == TraitKind::kAge && spec.age_mode == SynthAgeMode::kYears) {
          if (spec.age_drift_years > 0.0) {
            const double jitter = rng.gaussian(0.0, spec.age_drift_years);
            observed.set(kind,
                         TraitValue::years(std::clamp(
                             latent.value(kind).years_value() + jitter, 0.0,
                             120.0)));
          }
          continue;
        }
        if (spec.label_noise[t] <= 0.0) continue;
        if (rng.uniform() >= spec.label_noise[t]) continue;
        const int current = latent.value(kind).code();
        if (kind == TraitKind::kAge) {
          const int step = rng.uniform_below(2) == 0 ? -1 : 1;
          observed.set(kind, TraitValue::categorical(std::clamp(
                                 current + step, 0,
                                 instance_count(kind) - 1)));
        } else {
          observed.set(kind, TraitValue::categorical(flip_to_other(
                                 current, instance_count(kind), rng)));
        }
      }
      const std::string image_id = make_image_id(name, i + 1);
      images.push_back(image_id);
      pop.annotations.push_back({image_id, name, std::move(observed)});
    }

    pop.subject_names.push_back(name);
    pop.latent.push_back(std::move(latent));
    pop.images_by_subject.push_back(std::move(images));
  }
  return pop;
}

PairsFile generate_pairs(const SynthPopulation& population, int folds,
                         int per_class_per_fold, std::uint64_t seed) {
  if (folds < 2) throw UsageError("need at least 2 folds");
  if (per_class_per_fold < 1)
    throw UsageError("per-class pair count must be positive");
  const int n_subjects = static_cast<int>(population.subject_names.size());
  if (n_subjects < 2 * folds)
    throw DataError("need at least " + std::to_string(2 * folds) +
                    " subjects for " + std::to_string(folds) +
                    " folds, got " + std::to_string(n_subjects));

  Rng rng(seed);
  std::vector<int> order(n_subjects);
  for (int i = 0; i < n_subjects; ++i) order[i] = i;
  rng.shuffle(order);

  PairsFile file;
  file.folds = folds;
  file.per_class_per_fold = per_class_per_fold;

  for (int fold = 0; fold < folds; ++fold) {
    // Strided slice of the shuffled subjects; no subject spans folds.
    std::vector<int> members;
    for (int i = fold; i < n_subjects; i += folds) members.push_back(order[i]);

    std::vector<std::pair<std::string, std::string>> genuine_candidates;
    std::vector<std::string> fold_images;
    std::vector<int> image_subject;
    for (int s : members) {
      const auto& images = population.images_by_subject[s];
      for (std::size_t i = 0; i < images.size(); ++i) {
        fold_images.push_back(images[i]);
        image_subject.push_back(s);
        for (std::size_t j = i + 1; j < images.size(); ++j)
          genuine_candidates.emplace_back(images[i], images[j]);
      }
    }
    if (static_cast<int>(genuine_candidates.size()) < per_class_per_fold)
      throw DataError("fold " + std::to_string(fold) + " can supply only " +
                      std::to_string(genuine_candidates.size()) +
                      " genuine pairs of the " +
                      std::to_string(per_class_per_fold) + " requested");

    rng.shuffle(genuine_candidates);
    for (int k = 0; k < per_class_per_fold; ++k) {
      file.pairs.push_back({fold, genuine_candidates[k].first,
                            genuine_candidates[k].second,
                            PairLabel::kGenuine});
    }

    std::set<std::pair<std::string, std::string>> used;
    std::vector<PairRecord> impostors;
    std::uint64_t attempts = 0;
    const std::uint64_t max_attempts =
        static_cast<std::uint64_t>(per_class_per_fold) * 1000;
    while (static_cast<int>(impostors.size()) < per_class_per_fold) {
      if (++attempts > max_attempts)
        throw DataError("fold " + std::to_string(fold) +
                        " cannot supply enough distinct impostor pairs");
      const std::size_t i = rng.uniform_below(fold_images.size());
      const std::size_t j = rng.uniform_below(fold_images.size());
      if (image_subject[i] == image_subject[j]) continue;
      auto key = std::minmax(fold_images[i], fold_images[j]);
      if (!used.insert(key).second) continue;
      impostors.push_back(
          {fold, fold_images[i], fold_images[j], PairLabel::kImpostor});
    }
    for (PairRecord& p : impostors) file.pairs.push_back(std::move(p));
  }
  return file;
}

FaceScoreModel FaceScoreModel::from_target_eer(double target_eer) {
  if (!(target_eer > 0.0 && target_eer < 0.5))
    throw UsageError("target EER must lie in the open interval (0, 0.5)");
  FaceScoreModel model;
  model.impostor_mean = 0.0;
  model.impostor_std = 1.0;
  model.genuine_std = 1.0;
  model.genuine_mean = 2.0 * normal_quantile(1.0 - target_eer);
  return model;
}

void FaceScoreModel::validate() const {
  if (!(genuine_std > 0.0) || !(impostor_std > 0.0))
    throw UsageError("score model standard deviations must be positive");
}

double FaceScoreModel::analytic_eer() const {
  validate();
  const double d_prime =
      (genuine_mean - impostor_mean) / (0.5 * (genuine_std + impostor_std));
  return normal_cdf(-d_prime / 2.0);
}

std::vector<ScoreRecord> generate_face_scores(
    std::span<const PairRecord> pairs, const FaceScoreModel& model,
    std::uint64_t seed, std::string matcher_id) {
  model.validate();
  Rng rng(seed);
  std::vector<ScoreRecord> records;
  records.reserve(pairs.size());
  for (const PairRecord& pair : pairs) {
    const double score =
        pair.label == PairLabel::kGenuine
            ? rng.gaussian(model.genuine_mean, model.genuine_std)
            : rng.gaussian(model.impostor_mean, model.impostor_std);
    records.push_back({pair.left_image, pair.right_image, score, matcher_id});
  }
  return records;
}

}  // namespace softbio
