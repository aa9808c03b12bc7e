#include "softbio/traits.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace softbio {

namespace {

const std::array<std::string, kTraitCount> kTraitNames = {
    "gender", "age", "ethnicity", "glasses", "beard", "moustache"};

const std::array<std::vector<std::string>, kTraitCount> kInstanceNames = {{
    {"Male", "Female"},
    {"Baby", "Child", "Youth", "Middle Aged", "Senior"},
    {"Caucasian", "Black", "Asian", "Indian", "Other"},
    {"No Glasses", "Eye Wear", "Sunglasses"},
    {"Yes", "No"},
    {"Yes", "No"},
}};

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

}  // namespace

const std::string& trait_name(TraitKind kind) {
  return kTraitNames[static_cast<int>(kind)];
}

TraitKind trait_from_name(std::string_view name) {
  const std::string lowered = ascii_lower(trim(name));
  for (TraitKind kind : kAllTraitKinds) {
    if (lowered == trait_name(kind)) return kind;
  }
  throw UsageError("unknown trait name: \"" + std::string(name) + "\"");
}

int instance_count(TraitKind kind) {
  return static_cast<int>(kInstanceNames[static_cast<int>(kind)].size());
}

const std::vector<std::string>& instance_names(TraitKind kind) {
  return kInstanceNames[static_cast<int>(kind)];
}

bool is_nominal(TraitKind kind) { return kind != TraitKind::kAge; }

TraitValue TraitValue::categorical(int code) {
  if (code < 0) throw DataError("categorical trait code must be non-negative");
  TraitValue v;
  v.v_ = code;
  return v;
}

TraitValue TraitValue::years(double value) {
  if (!(value >= 0.0 && value <= 120.0))
    throw DataError("age in years must lie in [0, 120], got " +
                    std::to_string(value));
  TraitValue v;
  v.v_ = value;
  return v;
}

int TraitValue::code() const {
  if (!is_categorical()) throw Error("trait value is not categorical");
  return std::get<int>(v_);
}

double TraitValue::years_value() const {
  if (!is_years()) throw Error("trait value is not in years");
  return std::get<double>(v_);
}

void validate_value(TraitKind kind, const TraitValue& value) {
  if (value.is_missing()) return;
  if (value.is_years()) {
    if (kind != TraitKind::kAge)
      throw DataError("years value is only valid for age, not " +
                      trait_name(kind));
    return;  // range enforced at construction
  }
  const int code = value.code();
  if (code < 0 || code >= instance_count(kind))
    throw DataError(trait_name(kind) + " code out of range: " +
                    std::to_string(code) + " (valid 0.." +
                    std::to_string(instance_count(kind) - 1) + ")");
}

TraitValue parse_trait_label(TraitKind kind, std::string_view text) {
  const std::string_view t = trim(text);
  if (t.empty())
    throw DataError("empty " + trait_name(kind) + " label");

  const std::string lowered = ascii_lower(t);
  const auto& names = instance_names(kind);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (lowered == ascii_lower(names[i]))
      return TraitValue::categorical(static_cast<int>(i));
  }

  // Age accepts "<years>y".
  if (kind == TraitKind::kAge && lowered.size() > 1 && lowered.back() == 'y') {
    double years = 0.0;
    const char* first = lowered.data();
    const char* last = lowered.data() + lowered.size() - 1;
    auto [ptr, ec] = std::from_chars(first, last, years);
    if (ec == std::errc() && ptr == last) return TraitValue::years(years);
  }

  int code = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), code);
  if (ec == std::errc() && ptr == t.data() + t.size()) {
    const TraitValue v = TraitValue::categorical(code);
    validate_value(kind, v);  // range error
    return v;
  }

  throw DataError("unknown " + trait_name(kind) + " label: \"" +
                  std::string(text) + "\"");
}

std::string format_trait_label(TraitKind kind, const TraitValue& value) {
  if (value.is_missing()) return "";
  validate_value(kind, value);
  if (value.is_categorical()) return instance_names(kind)[value.code()];
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value.years_value());
  return std::string(buf, ptr) + "y";
}

int age_to_category(double years, const AgeCuts& cuts) {
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (!(cuts[i] > cuts[i - 1]))
      throw UsageError("age cuts must be strictly ascending");
  }
  if (!(years >= 0.0 && years <= 120.0))
    throw DataError("age in years must lie in [0, 120], got " +
                    std::to_string(years));
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (years < cuts[i]) return static_cast<int>(i);
  }
  return static_cast<int>(cuts.size());
}

const std::string& profile_source_name(ProfileSource source) {
  static const std::array<std::string, 4> names = {
      "manual", "cots-face++", "cots-microsoft", "synthetic"};
  return names[static_cast<int>(source)];
}

void SoftProfile::set(TraitKind kind, TraitValue value) {
  validate_value(kind, value);
  values_[static_cast<int>(kind)] = std::move(value);
}

bool SoftProfile::fully_defined() const {
  return std::none_of(values_.begin(), values_.end(),
                      [](const TraitValue& v) { return v.is_missing(); });
}

TraitSet TraitSet::all() { return from_bits((1u << kTraitCount) - 1); }

TraitSet TraitSet::of(std::initializer_list<TraitKind> kinds) {
  TraitSet s;
  for (TraitKind k : kinds) s = s.with(k);
  return s;
}

TraitSet TraitSet::parse(std::string_view csv) {
  TraitSet s;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string_view item = trim(
        csv.substr(start, comma == std::string_view::npos ? comma
                                                          : comma - start));
    if (!item.empty()) {
      const TraitKind kind = trait_from_name(item);
      if (s.contains(kind))
        throw UsageError("duplicate trait in set: " + std::string(item));
      s = s.with(kind);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (s.empty()) throw UsageError("trait set must not be empty");
  return s;
}

TraitSet TraitSet::from_bits(std::uint8_t bits) {
  if (bits >= (1u << kTraitCount))
    throw UsageError("trait set bits out of range");
  TraitSet s;
  s.bits_ = bits;
  return s;
}

int TraitSet::size() const { return std::popcount(bits_); }

std::vector<TraitKind> TraitSet::items() const {
  std::vector<TraitKind> out;
  for (TraitKind kind : kAllTraitKinds) {
    if (contains(kind)) out.push_back(kind);
  }
  return out;
}

std::string TraitSet::to_string() const {
  std::string out;
  for (TraitKind kind : items()) {
    if (!out.empty()) out += '+';
    out += trait_name(kind);
  }
  return out;
}

bool traitset_lex_less(const TraitSet& a, const TraitSet& b) {
  const auto ia = a.items(), ib = b.items();
  return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(),
                                      ib.end());
}

void MatchConfig::validate() const {
  if (!(age_span_years > 0.0))
    throw UsageError("age_span_years must be positive");
}

std::optional<double> trait_distance(TraitKind kind, const TraitValue& a,
                                     const TraitValue& b,
                                     const MatchConfig& cfg) {
  cfg.validate();
  validate_value(kind, a);
  validate_value(kind, b);
  if (a.is_missing() || b.is_missing()) return std::nullopt;

  if (kind == TraitKind::kAge) {
    if (a.is_categorical() != b.is_categorical())
      throw DataError(
          "cannot mix categorical and years age values in one comparison");
    if (a.is_categorical()) {
      const double diff = std::abs(a.code() - b.code());
      return cfg.age_normalization == AgeNormalization::kNormalized
                 ? diff / (instance_count(TraitKind::kAge) - 1)
                 : diff;
    }
    const double diff = std::abs(a.years_value() - b.years_value());
    return cfg.age_normalization == AgeNormalization::kNormalized
               ? std::min(diff / cfg.age_span_years, 1.0)
               : diff;
  }

  return a.code() == b.code() ? 0.0 : 1.0;
}

namespace {

// Under the no-sunglasses variant a Sunglasses value is no evidence at all.
const TraitValue& effective_value(TraitKind kind, const TraitValue& v,
                                  const MatchConfig& cfg) {
  static const TraitValue missing = TraitValue::missing();
  if (kind == TraitKind::kGlasses &&
      cfg.glasses_variant == GlassesVariant::kNoSunglasses &&
      v.is_categorical() && v.code() == 2) {
    return missing;
  }
  return v;
}

}  // namespace

std::optional<double> dissimilarity_if_defined(const SoftProfile& p,
                                               const SoftProfile& q,
                                               const TraitSet& set,
                                               const MatchConfig& cfg) {
  if (set.empty()) throw UsageError("trait set must not be empty");
  double sum = 0.0;
  int defined = 0;
  for (TraitKind kind : kAllTraitKinds) {
    if (!set.contains(kind)) continue;
    const TraitValue& a = effective_value(kind, p.value(kind), cfg);
    const TraitValue& b = effective_value(kind, q.value(kind), cfg);
    const std::optional<double> d = trait_distance(kind, a, b, cfg);
    if (d) {
      sum += *d;
      ++defined;
    } else if (cfg.missing_policy == MissingPolicy::kFail) {
      throw DataError("missing " + trait_name(kind) +
                      " value under missing_policy=fail");
    }
  }
  if (defined == 0) return std::nullopt;
  return sum / defined;
}

double profile_dissimilarity(const SoftProfile& p, const SoftProfile& q,
                             const TraitSet& set, const MatchConfig& cfg) {
  const std::optional<double> d = dissimilarity_if_defined(p, q, set, cfg);
  if (!d)
    throw NoEvidenceError("every trait in {" + set.to_string() +
                          "} is undefined for this pair");
  return *d;
}

double soft_score(double dissimilarity, const MatchConfig& cfg) {
  if (!(dissimilarity >= 0.0))
    throw UsageError("dissimilarity must be non-negative");
  switch (cfg.score_map) {
    case ScoreMap::kReciprocalShifted:
      return 1.0 / (1.0 + dissimilarity);
    case ScoreMap::kNegated:
      return -dissimilarity;
  }
  throw Error("unreachable score map");
}

}  // namespace softbio
