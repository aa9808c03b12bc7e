#include "softbio/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "softbio/io.hpp"

namespace softbio {

std::optional<double> pearson(std::span<const double> a,
                              std::span<const double> b) {
  if (a.size() != b.size())
    throw UsageError("pearson: vectors differ in length");
  if (a.size() < 2)
    throw DataError("pearson: need at least 2 observations, got " +
                    std::to_string(a.size()));
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
      throw DataError("pearson: non-finite value");
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a, db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return std::nullopt;
  return cov / std::sqrt(var_a * var_b);
}

namespace {

// Quantized code of a trait value, or nullopt when missing.
std::optional<double> trait_code(const SoftProfile& profile, TraitKind kind,
                                 const AgeCuts& cuts) {
  const TraitValue& v = profile.value(kind);
  if (v.is_missing()) return std::nullopt;
  if (v.is_years()) return age_to_category(v.years_value(), cuts);
  return v.code();
}

}  // namespace

CorrelationMatrix trait_correlations(std::span<const SoftProfile> profiles,
                                     const AgeCuts& cuts) {
  CorrelationMatrix out;
  for (int i = 0; i < kTraitCount; ++i) {
    for (int j = i; j < kTraitCount; ++j) {
      std::vector<double> a, b;
      for (const SoftProfile& p : profiles) {
        const auto ca = trait_code(p, kAllTraitKinds[i], cuts);
        const auto cb = trait_code(p, kAllTraitKinds[j], cuts);
        if (ca && cb) {
          a.push_back(*ca);
          b.push_back(*cb);
        }
      }
      out.support[i][j] = out.support[j][i] = static_cast<int>(a.size());
      if (a.size() < 2) continue;
      const auto r = pearson(a, b);
      out.coeff[i][j] = r;
      out.coeff[j][i] = r;
    }
  }
  return out;
}

std::array<TraitStats, kTraitCount> demographic_stats(
    std::span<const SoftProfile> profiles, const AgeCuts& cuts) {
  if (profiles.empty()) throw DataError("no profiles to summarize");
  std::array<TraitStats, kTraitCount> out;
  for (int t = 0; t < kTraitCount; ++t) {
    const TraitKind kind = kAllTraitKinds[t];
    TraitStats& stats = out[t];
    stats.kind = kind;
    std::vector<std::size_t> counts(instance_count(kind), 0);
    for (const SoftProfile& p : profiles) {
      const auto code = trait_code(p, kind, cuts);
      if (code)
        ++counts[static_cast<int>(*code)];
      else
        ++stats.missing;
    }
    stats.labeled = profiles.size() - stats.missing;
    for (int c = 0; c < instance_count(kind); ++c) {
      stats.instances.push_back(
          {c, instance_names(kind)[c], counts[c],
           stats.labeled ? 100.0 * counts[c] / stats.labeled : 0.0});
    }
  }
  return out;
}

AccuracyTable cots_accuracy(std::span<const AnnotationRecord> groundtruth,
                            std::span<const CotsRecord> cots,
                            const AgeCuts& cuts,
                            bool restrict_to_cots_vocabulary) {
  std::map<std::string, const SoftProfile*> truth;
  for (const AnnotationRecord& r : groundtruth)
    truth.emplace(r.image_id, &r.profile);

  std::vector<std::pair<const SoftProfile*, const CotsRecord*>> matched;
  for (const CotsRecord& c : cots) {
    const auto it = truth.find(c.image_id);
    if (it != truth.end()) matched.emplace_back(it->second, &c);
  }
  if (matched.empty())
    throw DataError("no image ids shared between groundtruth and COTS files");

  AccuracyTable table;
  table.total_images = matched.size();
  for (const auto& [gt, c] : matched)
    if (c->detected) ++table.detected_images;
  table.detection_rate =
      static_cast<double>(table.detected_images) / table.total_images;

  for (int t = 0; t < kTraitCount; ++t) {
    const TraitKind kind = kAllTraitKinds[t];
    TraitAccuracy& acc = table.traits[t];
    acc.kind = kind;

    // The instances this COTS actually outputs, observed from the file.
    std::set<int> vocabulary;
    for (const auto& [gt, c] : matched) {
      if (!c->detected) continue;
      const auto est = trait_code(c->profile, kind, cuts);
      if (est) vocabulary.insert(static_cast<int>(*est));
    }
    acc.available = !vocabulary.empty();
    if (!acc.available) continue;

    std::vector<std::size_t> support(instance_count(kind), 0);
    std::vector<std::size_t> correct(instance_count(kind), 0);
    for (const auto& [gt, c] : matched) {
      if (!c->detected) continue;
      const auto truth_code = trait_code(*gt, kind, cuts);
      const auto est_code = trait_code(c->profile, kind, cuts);
      if (!truth_code || !est_code) continue;
      const int tc = static_cast<int>(*truth_code);
      if (restrict_to_cots_vocabulary && !vocabulary.count(tc)) continue;
      ++support[tc];
      if (tc == static_cast<int>(*est_code)) ++correct[tc];
    }
    for (int c = 0; c < instance_count(kind); ++c) {
      if (support[c] == 0 &&
          (restrict_to_cots_vocabulary && !vocabulary.count(c)))
        continue;
      acc.per_instance.push_back(
          {c, instance_names(kind)[c], support[c], correct[c],
           support[c] ? static_cast<double>(correct[c]) / support[c] : 0.0});
      acc.evaluated += support[c];
      acc.correct += correct[c];
    }
    acc.overall =
        acc.evaluated ? static_cast<double>(acc.correct) / acc.evaluated : 0.0;
  }
  return table;
}

AgeStabilityTable age_stability(std::span<const CotsRecord> cots,
                                StdMode std_mode) {
  std::map<std::string, std::vector<double>> ages_by_subject;
  for (const CotsRecord& c : cots) {
    if (!c.detected) continue;
    const TraitValue& age = c.profile.value(TraitKind::kAge);
    if (age.is_missing()) continue;
    if (!age.is_years())
      throw DataError("age stability needs age estimates in years (image " +
                      c.image_id + " has a categorical age)");
    ages_by_subject[subject_of_image(c.image_id)].push_back(age.years_value());
  }
  if (ages_by_subject.empty())
    throw DataError("no usable age estimates in the COTS records");

  constexpr int kMaxCount = 15;
  AgeStabilityTable table;
  table.per_count.resize(kMaxCount);
  for (int k = 1; k <= kMaxCount; ++k) table.per_count[k - 1].image_count = k;
  table.more_than_3.image_count = -1;  // aggregate row

  std::vector<double> stds_more_than_3;
  std::vector<std::vector<double>> stds_per_count(kMaxCount);
  for (const auto& [subject, ages] : ages_by_subject) {
    ++table.total_identities;
    const int k = static_cast<int>(ages.size());
    if (k >= 2) table.has_multi_image = true;
    double sd = 0.0;
    if (k >= 2) {
      double mean = 0.0;
      for (double a : ages) mean += a;
      mean /= k;
      double ss = 0.0;
      for (double a : ages) ss += (a - mean) * (a - mean);
      sd = std::sqrt(ss / (std_mode == StdMode::kSample ? k - 1 : k));
    }
    if (k <= kMaxCount) stds_per_count[k - 1].push_back(sd);
    else ++table.more_than_15_identities;
    if (k > 3) stds_more_than_3.push_back(sd);
  }

  const auto fill = [](AgeStabilityRow& row, const std::vector<double>& stds) {
    row.identities = stds.size();
    if (stds.empty()) return;
    double sum = 0.0;
    for (double s : stds) sum += s;
    row.mean_std = sum / stds.size();
  };
  for (int k = 1; k <= kMaxCount; ++k)
    fill(table.per_count[k - 1], stds_per_count[k - 1]);
  fill(table.more_than_3, stds_more_than_3);
  return table;
}

}  // namespace softbio
