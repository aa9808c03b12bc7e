#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "softbio/error.hpp"

namespace softbio {

// The six soft-biometric traits, in the fixed order used everywhere
// (tie-breaking, file columns, reports).
enum class TraitKind : int {
  kGender = 0,
  kAge = 1,
  kEthnicity = 2,
  kGlasses = 3,
  kBeard = 4,
  kMoustache = 5,
};

inline constexpr int kTraitCount = 6;

inline constexpr std::array<TraitKind, kTraitCount> kAllTraitKinds = {
    TraitKind::kGender,  TraitKind::kAge,   TraitKind::kEthnicity,
    TraitKind::kGlasses, TraitKind::kBeard, TraitKind::kMoustache,
};

// Lowercase identifier used in CLI flags, file headers and reports.
const std::string& trait_name(TraitKind kind);
// Case-insensitive lookup of the above; throws UsageError on unknown names.
TraitKind trait_from_name(std::string_view name);

// Number of quantized instances of a trait (Gender 2, Age 5, Ethnicity 5,
// Glasses 3, Beard 2, Moustache 2).
int instance_count(TraitKind kind);
// Canonical instance names, indexed by code.
const std::vector<std::string>& instance_names(TraitKind kind);
// True for every trait except Age, which is ordinal.
bool is_nominal(TraitKind kind);

// One trait value: a quantized instance code, a continuous age in years
// (Age only), or missing.
class TraitValue {
 public:
  TraitValue() = default;  // missing

  static TraitValue missing() { return TraitValue(); }
  static TraitValue categorical(int code);
  // Age in years; valid range [0, 120].
  static TraitValue years(double value);

  bool is_missing() const { return std::holds_alternative<std::monostate>(v_); }
  bool is_categorical() const { return std::holds_alternative<int>(v_); }
  bool is_years() const { return std::holds_alternative<double>(v_); }

  int code() const;
  double years_value() const;

  bool operator==(const TraitValue&) const = default;

 private:
  std::variant<std::monostate, int, double> v_;
};

// Checks that a value is representable for the given trait (code in range,
// years only on Age). Throws DataError.
void validate_value(TraitKind kind, const TraitValue& value);

// Parses a trait cell: a case-insensitive instance name, a decimal code, or
// (Age only) decimal years suffixed 'y'. Throws DataError on unknown labels
// and out-of-range codes.
TraitValue parse_trait_label(TraitKind kind, std::string_view text);

// Canonical text form; inverse of parse_trait_label. Missing emits "".
std::string format_trait_label(TraitKind kind, const TraitValue& value);

// Ascending year cut points mapping years to the five age categories.
// Defaults place 40-60 in Middle Aged with the year at a cut falling in the
// upper bin.
using AgeCuts = std::array<double, 4>;
inline constexpr AgeCuts kDefaultAgeCuts = {3.0, 13.0, 40.0, 61.0};

int age_to_category(double years, const AgeCuts& cuts = kDefaultAgeCuts);

enum class ProfileSource {
  kManual,
  kCotsFacepp,
  kCotsMicrosoft,
  kSynthetic,
};

const std::string& profile_source_name(ProfileSource source);

// One image's six trait values, possibly missing.
class SoftProfile {
 public:
  explicit SoftProfile(ProfileSource source = ProfileSource::kManual)
      : source_(source) {}

  const TraitValue& value(TraitKind kind) const {
    return values_[static_cast<int>(kind)];
  }
  // Validates against the kind before storing.
  void set(TraitKind kind, TraitValue value);

  ProfileSource source() const { return source_; }
  bool fully_defined() const;

  bool operator==(const SoftProfile&) const = default;

 private:
  std::array<TraitValue, kTraitCount> values_{};
  ProfileSource source_;
};

// A duplicate-free subset of the six traits. The empty set is representable
// but rejected by operations that require evidence.
class TraitSet {
 public:
  TraitSet() = default;

  static TraitSet all();
  static TraitSet of(std::initializer_list<TraitKind> kinds);
  // Parses a comma-separated list of trait names ("age,ethnicity,gender").
  static TraitSet parse(std::string_view csv);
  static TraitSet from_bits(std::uint8_t bits);

  bool contains(TraitKind kind) const {
    return bits_ & (1u << static_cast<int>(kind));
  }
  TraitSet with(TraitKind kind) const {
    return from_bits(bits_ | (1u << static_cast<int>(kind)));
  }
  TraitSet without(TraitKind kind) const {
    return from_bits(bits_ & ~(1u << static_cast<int>(kind)));
  }

  int size() const;
  bool empty() const { return bits_ == 0; }
  std::uint8_t bits() const { return bits_; }

  // Members in the fixed trait order.
  std::vector<TraitKind> items() const;
  // "age+ethnicity+gender" in the fixed trait order.
  std::string to_string() const;

  bool operator==(const TraitSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

// Lexicographic order on the member list under the fixed trait order; the
// deterministic tie-break for equal-criterion subsets.
bool traitset_lex_less(const TraitSet& a, const TraitSet& b);

enum class AgeNormalization { kNormalized, kRaw };
enum class ScoreMap { kReciprocalShifted, kNegated };
enum class GlassesVariant { kFull, kNoSunglasses };
enum class MissingPolicy { kExcludeTrait, kFail };

struct MatchConfig {
  AgeNormalization age_normalization = AgeNormalization::kNormalized;
  double age_span_years = 80.0;
  ScoreMap score_map = ScoreMap::kReciprocalShifted;
  GlassesVariant glasses_variant = GlassesVariant::kFull;
  MissingPolicy missing_policy = MissingPolicy::kExcludeTrait;

  void validate() const;
};

// Per-trait distance. Nominal traits score 0/1; Age uses the absolute code
// or year difference, divided by the span (codes: 4, years: age_span_years,
// clamped to 1) in normalized mode. Returns nullopt when either side is
// missing; throws DataError on kind/value mismatches and mixed
// categorical/years age pairs.
std::optional<double> trait_distance(TraitKind kind, const TraitValue& a,
                                     const TraitValue& b,
                                     const MatchConfig& cfg = {});

// Mean of the defined per-trait distances over `set`. Under
// glasses_variant=no-sunglasses a Sunglasses value contributes no evidence
// (remapped to missing). Returns nullopt when no trait in the set is defined
// on this pair; throws DataError when missing_policy=fail and any trait is
// undefined.
std::optional<double> dissimilarity_if_defined(const SoftProfile& p,
                                               const SoftProfile& q,
                                               const TraitSet& set,
                                               const MatchConfig& cfg = {});

// Same, but throws NoEvidenceError instead of returning nullopt.
double profile_dissimilarity(const SoftProfile& p, const SoftProfile& q,
                             const TraitSet& set, const MatchConfig& cfg = {});

// Maps a dissimilarity to a similarity score, strictly decreasing in d.
// reciprocal-shifted: 1/(1+d) in (0,1]; negated: -d.
double soft_score(double dissimilarity, const MatchConfig& cfg = {});

}  // namespace softbio
