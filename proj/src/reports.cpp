#include "softbio/reports.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "softbio/error.hpp"

namespace softbio {

void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw UsageError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open file: " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

std::string format_percent(double fraction, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, 100.0 * fraction);
  return buf;
}

std::string format_full(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string demographics_csv(std::span<const TraitStats> stats) {
  std::string out = "trait,instance,code,count,percent\n";
  for (const TraitStats& t : stats) {
    for (const InstanceCount& inst : t.instances) {
      out += trait_name(t.kind) + ',' + inst.name + ',' +
             std::to_string(inst.code) + ',' + std::to_string(inst.count) +
             ',' + format_percent(inst.percent / 100.0, 2) + '\n';
    }
    out += trait_name(t.kind) + ",(missing),," +
           std::to_string(t.missing) + ",\n";
  }
  return out;
}

std::string correlation_csv(const CorrelationMatrix& matrix) {
  std::string out = "trait";
  for (TraitKind kind : kAllTraitKinds) out += ',' + trait_name(kind);
  out += '\n';
  for (int i = 0; i < kTraitCount; ++i) {
    out += trait_name(kAllTraitKinds[i]);
    for (int j = 0; j < kTraitCount; ++j) {
      out += ',';
      if (matrix.coeff[i][j]) out += format_full(*matrix.coeff[i][j]);
    }
    out += '\n';
  }
  return out;
}

std::string folds_csv(const FoldReport& report) {
  std::string out = "fold,eer,accuracy\n";
  for (std::size_t f = 0; f < report.fold_eer.size(); ++f) {
    const int fold_id = f < report.fold_ids.size()
                            ? report.fold_ids[f]
                            : static_cast<int>(f);
    out += std::to_string(fold_id) + ',' +
           format_percent(report.fold_eer[f], 1);
    out += ',';
    if (report.has_accuracy)
      out += format_percent(report.fold_accuracy[f], 2);
    out += '\n';
  }
  return out;
}

std::string eval_summary_csv(std::span<const SystemSummary> systems) {
  std::string out =
      "system,matcher,traits,n_traits,eer_mean,eer_std,accuracy_mean,"
      "accuracy_std,scored_pairs,dropped_pairs\n";
  for (const SystemSummary& s : systems) {
    const int n_traits =
        s.traits == "-" ? 0
                        : static_cast<int>(std::count(s.traits.begin(),
                                                      s.traits.end(), '+')) +
                              1;
    out += s.system + ',' + s.matcher + ',' + s.traits + ',' +
           std::to_string(n_traits) + ',' +
           format_percent(s.report.eer_mean, 1) + ',' +
           format_percent(s.report.eer_std, 1) + ',';
    if (s.report.has_accuracy)
      out += format_percent(s.report.accuracy_mean, 2) + ',' +
             format_percent(s.report.accuracy_std, 2);
    else
      out += ",";
    out += ',' + std::to_string(s.report.scored_pairs) + ',' +
           std::to_string(s.report.dropped_pairs) + '\n';
  }
  return out;
}

std::string sffs_table_csv(std::span<const SffsTableRow> rows) {
  std::string out = "n,traits,dev_eer,test_eer_mean,test_eer_std\n";
  for (const SffsTableRow& r : rows) {
    out += std::to_string(r.n) + ',' + r.traits + ',' +
           format_percent(r.dev_eer, 1) + ',';
    if (r.has_test)
      out += format_percent(r.test_eer_mean, 1) + ',' +
             format_percent(r.test_eer_std, 1);
    else
      out += ",";
    out += '\n';
  }
  return out;
}

std::string accuracy_csv(const AccuracyTable& table) {
  std::string out = "trait,instance,support,correct,accuracy\n";
  for (const TraitAccuracy& t : table.traits) {
    if (!t.available) {
      out += trait_name(t.kind) + ",(not available),,,\n";
      continue;
    }
    for (const InstanceAccuracy& inst : t.per_instance) {
      out += trait_name(t.kind) + ',' + inst.name + ',' +
             std::to_string(inst.support) + ',' + std::to_string(inst.correct) +
             ',' + format_percent(inst.accuracy, 2) + '\n';
    }
    out += trait_name(t.kind) + ",(overall)," + std::to_string(t.evaluated) +
           ',' + std::to_string(t.correct) + ',' +
           format_percent(t.overall, 2) + '\n';
  }
  out += "(face-detection),," + std::to_string(table.total_images) + ',' +
         std::to_string(table.detected_images) + ',' +
         format_percent(table.detection_rate, 2) + '\n';
  return out;
}

std::string age_stability_csv(const AgeStabilityTable& table) {
  char buf[32];
  std::string out = "images_per_identity,identities,mean_std_years\n";
  for (const AgeStabilityRow& row : table.per_count) {
    std::snprintf(buf, sizeof(buf), "%.2f", row.mean_std);
    out += std::to_string(row.image_count) + ',' +
           std::to_string(row.identities) + ',' + buf + '\n';
  }
  std::snprintf(buf, sizeof(buf), "%.2f", table.more_than_3.mean_std);
  out += "more than 3," + std::to_string(table.more_than_3.identities) + ',' +
         buf + '\n';
  return out;
}

nlohmann::json to_json(const FoldReport& report) {
  nlohmann::json j;
  j["fold_ids"] = report.fold_ids;
  j["fold_eer"] = report.fold_eer;
  j["eer_mean"] = report.eer_mean;
  j["eer_std"] = report.eer_std;
  j["scored_pairs"] = report.scored_pairs;
  j["dropped_pairs"] = report.dropped_pairs;
  if (report.has_accuracy) {
    j["fold_threshold"] = report.fold_threshold;
    j["fold_accuracy"] = report.fold_accuracy;
    j["accuracy_mean"] = report.accuracy_mean;
    j["accuracy_std"] = report.accuracy_std;
  }
  return j;
}

nlohmann::json to_json(const SelectionTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const SelectionStep& s : trace.steps) {
    steps.push_back(
        {{"action", s.action == SelectionStep::Action::kAdd ? "add"
                                                            : "remove"},
         {"trait", trait_name(s.trait)},
         {"set", s.result.to_string()},
         {"criterion", s.criterion}});
  }
  nlohmann::json best = nlohmann::json::array();
  for (std::size_t i = 0; i < trace.best_per_size.size(); ++i) {
    if (!trace.best_per_size[i]) continue;
    best.push_back({{"n", i + 1},
                    {"traits", trace.best_per_size[i]->set.to_string()},
                    {"criterion", trace.best_per_size[i]->criterion}});
  }
  return {{"steps", steps}, {"best_per_size", best}};
}

nlohmann::json to_json(const AccuracyTable& table) {
  nlohmann::json traits = nlohmann::json::array();
  for (const TraitAccuracy& t : table.traits) {
    nlohmann::json entry{{"trait", trait_name(t.kind)},
                         {"available", t.available}};
    if (t.available) {
      nlohmann::json instances = nlohmann::json::array();
      for (const InstanceAccuracy& inst : t.per_instance) {
        instances.push_back({{"instance", inst.name},
                             {"code", inst.code},
                             {"support", inst.support},
                             {"correct", inst.correct},
                             {"accuracy", inst.accuracy}});
      }
      entry["instances"] = instances;
      entry["evaluated"] = t.evaluated;
      entry["correct"] = t.correct;
      entry["overall"] = t.overall;
    }
    traits.push_back(entry);
  }
  return {{"traits", traits},
          {"total_images", table.total_images},
          {"detected_images", table.detected_images},
          {"detection_rate", table.detection_rate}};
}

nlohmann::json to_json(const AgeStabilityTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const AgeStabilityRow& row : table.per_count) {
    rows.push_back({{"images_per_identity", row.image_count},
                    {"identities", row.identities},
                    {"mean_std_years", row.mean_std}});
  }
  return {{"per_count", rows},
          {"more_than_3",
           {{"identities", table.more_than_3.identities},
            {"mean_std_years", table.more_than_3.mean_std}}},
          {"more_than_15_identities", table.more_than_15_identities},
          {"total_identities", table.total_identities},
          {"has_multi_image", table.has_multi_image}};
}

nlohmann::json to_json(const CorrelationMatrix& matrix) {
  nlohmann::json coeff = nlohmann::json::array();
  nlohmann::json support = nlohmann::json::array();
  for (int i = 0; i < kTraitCount; ++i) {
    nlohmann::json row = nlohmann::json::array();
    nlohmann::json srow = nlohmann::json::array();
    for (int j = 0; j < kTraitCount; ++j) {
      if (matrix.coeff[i][j])
        row.push_back(*matrix.coeff[i][j]);
      else
        row.push_back(nullptr);
      srow.push_back(matrix.support[i][j]);
    }
    coeff.push_back(row);
    support.push_back(srow);
  }
  nlohmann::json names = nlohmann::json::array();
  for (TraitKind kind : kAllTraitKinds) names.push_back(trait_name(kind));
  return {{"traits", names}, {"coefficients", coeff}, {"support", support}};
}

nlohmann::json to_json(std::span<const TraitStats> stats) {
  nlohmann::json out = nlohmann::json::array();
  for (const TraitStats& t : stats) {
    nlohmann::json instances = nlohmann::json::array();
    for (const InstanceCount& inst : t.instances) {
      instances.push_back({{"instance", inst.name},
                           {"code", inst.code},
                           {"count", inst.count},
                           {"percent", inst.percent}});
    }
    out.push_back({{"trait", trait_name(t.kind)},
                   {"instances", instances},
                   {"labeled", t.labeled},
                   {"missing", t.missing}});
  }
  return out;
}

nlohmann::json to_json(std::span<const RocPoint> curve) {
  nlohmann::json out = nlohmann::json::array();
  for (const RocPoint& p : curve)
    out.push_back({{"threshold", p.threshold}, {"far", p.far}, {"frr", p.frr}});
  return out;
}

}  // namespace softbio
