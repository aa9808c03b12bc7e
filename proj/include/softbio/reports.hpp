#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "softbio/analysis.hpp"
#include "softbio/metrics.hpp"
#include "softbio/selection.hpp"

namespace softbio {

// Temp file + rename, so readers never see a partial report.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content);

// Hex FNV-1a 64-bit digest of a file's bytes, for run manifests.
std::string fnv1a64_file(const std::filesystem::path& path);

// Formatting helpers shared by the table emitters. Fractions go in as [0,1].
std::string format_percent(double fraction, int decimals);
std::string format_full(double value);  // shortest round-trip

// ---------------------------------------------------------------------------
// CSV emitters (fractions rendered in percent, paper table style)

std::string demographics_csv(std::span<const TraitStats> stats);
std::string correlation_csv(const CorrelationMatrix& matrix);
// `fold,eer,accuracy`; accuracy column empty without threshold training.
std::string folds_csv(const FoldReport& report);

struct SystemSummary {
  std::string system;   // "soft" | "face" | "fused"
  std::string matcher;  // face matcher id, or "-"
  std::string traits;   // trait set, or "-"
  FoldReport report;
};

std::string eval_summary_csv(std::span<const SystemSummary> systems);

struct SffsTableRow {
  int n = 0;
  std::string traits;
  double dev_eer = 0.0;
  bool has_test = false;
  double test_eer_mean = 0.0;
  double test_eer_std = 0.0;
};

std::string sffs_table_csv(std::span<const SffsTableRow> rows);
std::string accuracy_csv(const AccuracyTable& table);
std::string age_stability_csv(const AgeStabilityTable& table);

// ---------------------------------------------------------------------------
// JSON emitters (full precision)

nlohmann::json to_json(const FoldReport& report);
nlohmann::json to_json(const SelectionTrace& trace);
nlohmann::json to_json(const AccuracyTable& table);
nlohmann::json to_json(const AgeStabilityTable& table);
nlohmann::json to_json(const CorrelationMatrix& matrix);
nlohmann::json to_json(std::span<const TraitStats> stats);
nlohmann::json to_json(std::span<const RocPoint> curve);

}  // namespace softbio
