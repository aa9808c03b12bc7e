#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "softbio/traits.hpp"

namespace softbio {

struct AnnotationRecord;  // io.hpp
struct CotsRecord;

// Pearson linear correlation with population moments. Returns nullopt when
// either vector is constant (undefined, not 0).
std::optional<double> pearson(std::span<const double> a,
                              std::span<const double> b);

// 6x6 trait correlation matrix over quantized codes, pairwise deletion of
// missing values. Age-in-years values are quantized through the cuts first.
struct CorrelationMatrix {
  std::array<std::array<std::optional<double>, kTraitCount>, kTraitCount>
      coeff{};
  std::array<std::array<int, kTraitCount>, kTraitCount> support{};
};

CorrelationMatrix trait_correlations(std::span<const SoftProfile> profiles,
                                     const AgeCuts& cuts = kDefaultAgeCuts);

struct InstanceCount {
  int code = 0;
  std::string name;
  std::size_t count = 0;
  double percent = 0.0;  // over the labeled entries of the trait
};

struct TraitStats {
  TraitKind kind = TraitKind::kGender;
  std::vector<InstanceCount> instances;
  std::size_t labeled = 0;
  std::size_t missing = 0;
};

std::array<TraitStats, kTraitCount> demographic_stats(
    std::span<const SoftProfile> profiles, const AgeCuts& cuts = kDefaultAgeCuts);

// Per-trait COTS accuracy against the manual groundtruth (Table IV layout).
struct InstanceAccuracy {
  int code = 0;
  std::string name;
  std::size_t support = 0;  // groundtruth images of this instance evaluated
  std::size_t correct = 0;
  double accuracy = 0.0;
};

struct TraitAccuracy {
  TraitKind kind = TraitKind::kGender;
  bool available = false;  // the COTS outputs this trait at all
  std::vector<InstanceAccuracy> per_instance;
  std::size_t evaluated = 0;
  std::size_t correct = 0;
  double overall = 0.0;  // micro-average over evaluated images
};

struct AccuracyTable {
  std::array<TraitAccuracy, kTraitCount> traits{};
  std::size_t total_images = 0;     // groundtruth/COTS id intersection
  std::size_t detected_images = 0;  // detected within the intersection
  double detection_rate = 0.0;
};

// Undetected faces are excluded from trait accuracies and counted in the
// detection rate. COTS ages in years go through age_to_category first. With
// restrict_to_cots_vocabulary, groundtruth images whose instance the COTS
// never outputs for that trait are excluded from its evaluation (Face++
// ethnicity covers 3 of the 5 manual instances).
AccuracyTable cots_accuracy(std::span<const AnnotationRecord> groundtruth,
                            std::span<const CotsRecord> cots,
                            const AgeCuts& cuts = kDefaultAgeCuts,
                            bool restrict_to_cots_vocabulary = true);

enum class StdMode { kSample, kPopulation };

// Age-estimate stability per identity (Table V layout): identities grouped
// by their number of usable age estimates; each row reports the mean of the
// per-identity standard deviations, in years.
struct AgeStabilityRow {
  int image_count = 0;
  std::size_t identities = 0;
  double mean_std = 0.0;
};

struct AgeStabilityTable {
  std::vector<AgeStabilityRow> per_count;  // image counts 1..15
  AgeStabilityRow more_than_3;             // every identity with count > 3
  std::size_t more_than_15_identities = 0;
  std::size_t total_identities = 0;
  bool has_multi_image = false;  // false = warning: nothing with k >= 2
};

AgeStabilityTable age_stability(std::span<const CotsRecord> cots,
                                StdMode std_mode = StdMode::kSample);

}  // namespace softbio
