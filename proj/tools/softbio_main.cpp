// softbio: soft-biometric verification, fusion and evaluation experiments.
//
// Subcommands: stats, eval, sffs, cots, synth. Every run writes its reports
// plus a manifest.json with the resolved configuration and input digests
// into --out-dir. Exit codes: 0 success, 1 computation/data error, 2 usage
// or spec error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "softbio/analysis.hpp"
#include "softbio/experiment.hpp"
#include "softbio/io.hpp"
#include "softbio/reports.hpp"
#include "softbio/selection.hpp"
#include "softbio/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace softbio;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Shared option blocks

struct OutputOptions {
  std::string out_dir;
  std::string format = "both";  // csv | json | both

  void attach(CLI::App* cmd) {
    cmd->add_option("--out-dir", out_dir, "Directory for reports")->required();
    cmd->add_option("--format", format, "Report format: csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
  }
  bool csv() const { return format != "json"; }
  bool json_enabled() const { return format != "csv"; }
};

struct MatchOptions {
  std::string glasses_variant = "full";
  std::string age_norm = "normalized";
  std::string age_mode = "categorical";
  std::string score_map = "reciprocal-shifted";
  std::string missing_policy = "exclude-trait";
  double age_span = 80.0;
  std::vector<double> age_cuts = {3, 13, 40, 61};

  void attach(CLI::App* cmd) {
    cmd->add_option("--glasses-variant", glasses_variant,
                    "full keeps Sunglasses; no-sunglasses discards them")
        ->check(CLI::IsMember({"full", "no-sunglasses"}));
    cmd->add_option("--age-norm", age_norm,
                    "Age distance scaling: normalized or raw")
        ->check(CLI::IsMember({"normalized", "raw"}));
    cmd->add_option("--age-mode", age_mode,
                    "categorical quantizes year values through --age-cuts; "
                    "years keeps them continuous")
        ->check(CLI::IsMember({"categorical", "years"}));
    cmd->add_option("--score-map", score_map, "Dissimilarity-to-score map")
        ->check(CLI::IsMember({"reciprocal-shifted", "negated"}));
    cmd->add_option("--missing-policy", missing_policy,
                    "exclude-trait renormalizes over defined traits; fail "
                    "rejects pairs with missing values")
        ->check(CLI::IsMember({"exclude-trait", "fail"}));
    cmd->add_option("--age-span", age_span,
                    "Year span normalizing continuous age distances")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--age-cuts", age_cuts,
                    "Four ascending year cuts for age categories")
        ->delimiter(',')
        ->expected(4);
  }

  MatchConfig match_config() const {
    MatchConfig cfg;
    cfg.age_normalization = age_norm == "raw" ? AgeNormalization::kRaw
                                              : AgeNormalization::kNormalized;
    cfg.age_span_years = age_span;
    cfg.score_map = score_map == "negated" ? ScoreMap::kNegated
                                           : ScoreMap::kReciprocalShifted;
    cfg.glasses_variant = glasses_variant == "no-sunglasses"
                              ? GlassesVariant::kNoSunglasses
                              : GlassesVariant::kFull;
    cfg.missing_policy = missing_policy == "fail"
                             ? MissingPolicy::kFail
                             : MissingPolicy::kExcludeTrait;
    return cfg;
  }

  AgeCuts cuts() const {
    return AgeCuts{age_cuts[0], age_cuts[1], age_cuts[2], age_cuts[3]};
  }

  json config_json() const {
    return {{"glasses_variant", glasses_variant}, {"age_norm", age_norm},
            {"age_mode", age_mode},               {"score_map", score_map},
            {"missing_policy", missing_policy},   {"age_span", age_span},
            {"age_cuts", age_cuts}};
  }
};

// ---------------------------------------------------------------------------
// Manifest and report writing

class Manifest {
 public:
  Manifest(std::string subcommand, std::uint64_t seed)
      : subcommand_(std::move(subcommand)), seed_(seed) {}

  void set_config(json config) { config_ = std::move(config); }
  void add_input(const fs::path& path) {
    inputs_.push_back(
        {{"path", path.string()}, {"fnv1a64", fnv1a64_file(path)}});
  }
  void add_output(const std::string& name) { outputs_.push_back(name); }

  void write(const fs::path& dir) {
    const json manifest = {{"tool", "softbio"},
                           {"version", kVersion},
                           {"subcommand", subcommand_},
                           {"seed", seed_},
                           {"config", config_},
                           {"inputs", inputs_},
                           {"outputs", outputs_}};
    atomic_write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::string subcommand_;
  std::uint64_t seed_;
  json config_;
  json inputs_ = json::array();
  json outputs_ = json::array();
};

class Reporter {
 public:
  Reporter(const OutputOptions& out, Manifest& manifest)
      : out_(out), manifest_(manifest) {
    fs::create_directories(out.out_dir);
  }

  void csv(const std::string& name, const std::string& content) {
    if (out_.csv()) raw(name, content);
  }
  void json_file(const std::string& name, const json& value) {
    if (out_.json_enabled()) raw(name, value.dump(2) + "\n");
  }
  void raw(const std::string& name, const std::string& content) {
    atomic_write_file(fs::path(out_.out_dir) / name, content);
    manifest_.add_output(name);
  }
  void finish() { manifest_.write(out_.out_dir); }

 private:
  const OutputOptions& out_;
  Manifest& manifest_;
};

std::uint64_t resolve_seed(const CLI::App* cmd, std::uint64_t flag_value) {
  if (cmd->count("--seed")) return flag_value;
  if (const char* env = std::getenv("SOFTBIO_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("SOFTBIO_SEED is not an integer: " + std::string(env));
    }
  }
  return flag_value;
}

// Quantizes year-valued ages when running in categorical mode.
void apply_age_mode(SoftProfile& profile, const std::string& mode,
                    const AgeCuts& cuts) {
  if (mode != "categorical") return;
  const TraitValue& age = profile.value(TraitKind::kAge);
  if (age.is_years())
    profile.set(TraitKind::kAge, TraitValue::categorical(age_to_category(
                                     age.years_value(), cuts)));
}

struct LoadedData {
  PairsFile pairs;
  std::optional<ScoreIndex> scores;
  std::vector<JoinedPair> joined;
  std::size_t dropped_missing_profile = 0;
  std::size_t dropped_missing_score = 0;
  std::string profile_kind;
};

// Pair + profile + score loading shared by eval and sffs.
LoadedData load_joined(const fs::path& pairs_path,
                       const std::string& annotations,
                       const std::string& cots_path,
                       const std::string& cots_source,
                       const std::string& scores_path,
                       const std::string& matcher_id, bool invert_scores,
                       const std::string& join_policy,
                       const MatchOptions& match, Manifest& manifest) {
  LoadedData data;
  data.pairs = load_pairs(pairs_path);
  manifest.add_input(pairs_path);

  ProfileIndex profiles = [&] {
    if (!annotations.empty()) {
      manifest.add_input(annotations);
      data.profile_kind = "annotations";
      return ProfileIndex::from_annotations(load_annotations(annotations));
    }
    manifest.add_input(cots_path);
    data.profile_kind = "cots";
    return ProfileIndex::from_cots(
        load_cots(cots_path, cots_source == "facepp"
                                 ? ProfileSource::kCotsFacepp
                                 : ProfileSource::kCotsMicrosoft));
  }();

  if (!scores_path.empty()) {
    data.scores.emplace(load_scores(scores_path, matcher_id, invert_scores));
    manifest.add_input(scores_path);
  }

  JoinResult joined = join(data.pairs.pairs, profiles,
                           data.scores ? &*data.scores : nullptr,
                           join_policy == "strict" ? JoinPolicy::kStrict
                                                   : JoinPolicy::kDropWithCount);
  for (JoinedPair& p : joined.pairs) {
    apply_age_mode(p.left, match.age_mode, match.cuts());
    apply_age_mode(p.right, match.age_mode, match.cuts());
  }
  data.joined = std::move(joined.pairs);
  data.dropped_missing_profile = joined.dropped_missing_profile;
  data.dropped_missing_score = joined.dropped_missing_score;
  if (data.dropped_missing_profile + data.dropped_missing_score > 0) {
    std::cerr << "softbio: dropped " << data.dropped_missing_profile
              << " pairs without profiles and " << data.dropped_missing_score
              << " without face scores\n";
  }
  return data;
}

json join_stats_json(const LoadedData& data) {
  return {{"pairs", data.pairs.pairs.size()},
          {"joined", data.joined.size()},
          {"dropped_missing_profile", data.dropped_missing_profile},
          {"dropped_missing_score", data.dropped_missing_score}};
}

// ---------------------------------------------------------------------------
// stats

int run_stats(const std::string& annotations_path, const MatchOptions& match,
              const OutputOptions& out) {
  Manifest manifest("stats", 0);
  manifest.add_input(annotations_path);
  const auto records = load_annotations(annotations_path);

  std::vector<SoftProfile> profiles;
  profiles.reserve(records.size());
  for (const AnnotationRecord& r : records) profiles.push_back(r.profile);

  const auto stats = demographic_stats(profiles, match.cuts());
  const CorrelationMatrix matrix = trait_correlations(profiles, match.cuts());

  manifest.set_config({{"annotations", annotations_path},
                       {"age_cuts", match.age_cuts},
                       {"images", records.size()}});
  Reporter reporter(out, manifest);
  reporter.csv("demographics.csv", demographics_csv(stats));
  reporter.json_file("demographics.json", to_json(stats));
  reporter.csv("correlations.csv", correlation_csv(matrix));
  reporter.json_file("correlations.json", to_json(matrix));
  reporter.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string pairs, annotations, cots, cots_source = "microsoft";
  std::string scores, matcher_id;
  bool invert_scores = false;
  std::string traits;
  bool fuse = false;
  std::string norm = "minmax";
  std::vector<double> weights = {0.5, 0.5};
  std::string soft_missing = "face-only";
  std::string join_policy = "drop";
  bool train_threshold = false;
  std::uint64_t seed = 0;
  MatchOptions match;
  OutputOptions out;
};

json system_json(const SystemSummary& summary,
                 const std::vector<ScoreSet>& fold_scores) {
  json j = to_json(summary.report);
  j["system"] = summary.system;
  j["matcher"] = summary.matcher;
  j["traits"] = summary.traits;
  json rocs = json::array();
  for (const ScoreSet& scores : fold_scores)
    rocs.push_back(to_json(roc_curve(scores)));
  j["roc_per_fold"] = rocs;
  return j;
}

int run_eval(const EvalOptions& opt, const CLI::App* cmd) {
  if (opt.traits.empty() && opt.scores.empty())
    throw UsageError("nothing to evaluate: pass --traits and/or --scores");
  if (opt.fuse && (opt.traits.empty() || opt.scores.empty()))
    throw UsageError("--fuse needs both --traits and --scores");

  Manifest manifest("eval", resolve_seed(cmd, opt.seed));
  LoadedData data = load_joined(opt.pairs, opt.annotations, opt.cots,
                                opt.cots_source, opt.scores, opt.matcher_id,
                                opt.invert_scores, opt.join_policy, opt.match,
                                manifest);

  SoftScorerConfig soft_cfg;
  FusedConfig fused_cfg;
  if (!opt.traits.empty()) {
    soft_cfg.traits = TraitSet::parse(opt.traits);
    soft_cfg.match = opt.match.match_config();
    fused_cfg.soft = soft_cfg;
  }
  fused_cfg.norm =
      opt.norm == "zscore" ? NormMethod::kZScore : NormMethod::kMinMax;
  fused_cfg.fusion.face_weight = opt.weights[0];
  fused_cfg.fusion.soft_weight = opt.weights[1];
  fused_cfg.fusion.soft_missing =
      opt.soft_missing == "drop-pair" ? FusionConfig::SoftMissing::kDropPair
                                      : FusionConfig::SoftMissing::kFaceOnly;
  fused_cfg.fusion.validate();

  const std::string matcher =
      data.scores ? data.scores->matcher_id() : std::string("-");
  std::vector<SystemSummary> systems;
  std::vector<std::vector<ScoreSet>> system_scores;

  if (!opt.traits.empty()) {
    std::vector<ScoreSet> fold_scores;
    const FoldReport r = cross_validate(data.joined, make_soft_scorer(soft_cfg),
                                        opt.train_threshold, &fold_scores);
    systems.push_back({"soft", "-", soft_cfg.traits.to_string(), r});
    system_scores.push_back(std::move(fold_scores));
  }
  if (data.scores) {
    std::vector<ScoreSet> fold_scores;
    const FoldReport r = cross_validate(data.joined, face_scorer(),
                                        opt.train_threshold, &fold_scores);
    systems.push_back({"face", matcher, "-", r});
    system_scores.push_back(std::move(fold_scores));
  }
  if (opt.fuse) {
    std::vector<ScoreSet> fold_scores;
    const FoldReport r =
        cross_validate(data.joined, make_fused_scorer_factory(fused_cfg),
                       opt.train_threshold, &fold_scores);
    systems.push_back({"fused", matcher, soft_cfg.traits.to_string(), r});
    system_scores.push_back(std::move(fold_scores));
  }

  manifest.set_config(
      {{"pairs", opt.pairs},
       {"profiles", opt.annotations.empty() ? opt.cots : opt.annotations},
       {"profile_kind", data.profile_kind},
       {"scores", opt.scores},
       {"matcher_id", matcher},
       {"invert_scores", opt.invert_scores},
       {"traits", opt.traits},
       {"fuse", opt.fuse},
       {"norm", opt.norm},
       {"weights", opt.weights},
       {"soft_missing", opt.soft_missing},
       {"join", opt.join_policy},
       {"train_threshold", opt.train_threshold},
       {"match", opt.match.config_json()}});

  Reporter reporter(opt.out, manifest);
  json report{{"join", join_stats_json(data)}};
  json systems_json = json::array();
  for (std::size_t i = 0; i < systems.size(); ++i) {
    reporter.csv("folds_" + systems[i].system + ".csv",
                 folds_csv(systems[i].report));
    systems_json.push_back(system_json(systems[i], system_scores[i]));
  }
  report["systems"] = systems_json;
  reporter.csv("summary.csv", eval_summary_csv(systems));
  reporter.json_file("report.json", report);
  if (opt.fuse) {
    reporter.raw(
        "fused_scores.csv",
        emit_scores(fused_score_records(data.joined, fused_cfg, matcher)));
  }
  reporter.finish();

  for (const SystemSummary& s : systems) {
    std::cout << s.system << ": EER " << format_percent(s.report.eer_mean, 1)
              << " +- " << format_percent(s.report.eer_std, 1) << " %";
    if (s.report.has_accuracy)
      std::cout << ", accuracy " << format_percent(s.report.accuracy_mean, 2)
                << " %";
    std::cout << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sffs

struct SffsOptions {
  std::string dev_pairs, test_pairs, annotations, cots;
  std::string cots_source = "microsoft";
  std::string scores, matcher_id;
  bool invert_scores = false;
  bool fuse = false;
  std::string norm = "minmax";
  std::vector<double> weights = {0.5, 0.5};
  std::string candidates = "gender,age,ethnicity,glasses,beard,moustache";
  int max_n = 6;
  bool oracle = false;
  std::string join_policy = "drop";
  MatchOptions match;
  OutputOptions out;
};

int run_sffs(const SffsOptions& opt) {
  if (!opt.test_pairs.empty() &&
      fs::weakly_canonical(opt.dev_pairs) ==
          fs::weakly_canonical(opt.test_pairs))
    throw UsageError(
        "--dev-pairs and --test-pairs name the same file; selection must not "
        "see the test pairs");
  if (opt.fuse && opt.scores.empty()) throw UsageError("--fuse needs --scores");

  Manifest manifest("sffs", 0);
  LoadedData dev = load_joined(opt.dev_pairs, opt.annotations, opt.cots,
                               opt.cots_source, opt.scores, opt.matcher_id,
                               opt.invert_scores, opt.join_policy, opt.match,
                               manifest);

  const MatchConfig match_cfg = opt.match.match_config();
  const NormMethod norm =
      opt.norm == "zscore" ? NormMethod::kZScore : NormMethod::kMinMax;
  const auto fused_config = [&](const TraitSet& set) {
    FusedConfig cfg;
    cfg.soft = {set, match_cfg};
    cfg.norm = norm;
    cfg.fusion.face_weight = opt.weights[0];
    cfg.fusion.soft_weight = opt.weights[1];
    return cfg;
  };
  const Criterion criterion = [&](const TraitSet& set) {
    if (opt.fuse) {
      const FusedConfig cfg = fused_config(set);
      return pooled_eer(dev.joined, make_pooled_fused_scorer(dev.joined, cfg))
          .eer;
    }
    return pooled_eer(dev.joined, make_soft_scorer({set, match_cfg})).eer;
  };

  const TraitSet candidates = TraitSet::parse(opt.candidates);
  const int max_n = std::min(opt.max_n, candidates.size());
  const SelectionTrace trace = sffs(candidates, criterion, max_n);

  std::vector<BestSubset> oracle_best;
  if (opt.oracle) {
    oracle_best = exhaustive_best(candidates, criterion);
    for (int n = 1; n <= max_n; ++n) {
      if (!trace.best_per_size[n - 1]) continue;
      if (oracle_best[n - 1].criterion >
          trace.best_per_size[n - 1]->criterion + 1e-12)
        throw Error("exhaustive search found a worse optimum than SFFS at N=" +
                    std::to_string(n));
    }
  }

  std::optional<LoadedData> test;
  if (!opt.test_pairs.empty()) {
    test = load_joined(opt.test_pairs, opt.annotations, opt.cots,
                       opt.cots_source, opt.scores, opt.matcher_id,
                       opt.invert_scores, opt.join_policy, opt.match,
                       manifest);
  }

  std::vector<SffsTableRow> rows;
  json test_reports = json::array();
  for (int n = 1; n <= max_n; ++n) {
    if (!trace.best_per_size[n - 1]) continue;
    SffsTableRow row;
    row.n = n;
    row.traits = trace.best_per_size[n - 1]->set.to_string();
    row.dev_eer = trace.best_per_size[n - 1]->criterion;
    if (test) {
      const TraitSet& set = trace.best_per_size[n - 1]->set;
      const FoldReport r =
          opt.fuse ? cross_validate(test->joined,
                                    make_fused_scorer_factory(fused_config(set)),
                                    false)
                   : cross_validate(test->joined,
                                    make_soft_scorer({set, match_cfg}), false);
      row.has_test = true;
      row.test_eer_mean = r.eer_mean;
      row.test_eer_std = r.eer_std;
      json tj = to_json(r);
      tj["n"] = n;
      tj["traits"] = row.traits;
      test_reports.push_back(tj);
    }
    rows.push_back(row);
  }

  manifest.set_config({{"dev_pairs", opt.dev_pairs},
                       {"test_pairs", opt.test_pairs},
                       {"candidates", opt.candidates},
                       {"max_n", max_n},
                       {"fuse", opt.fuse},
                       {"norm", opt.norm},
                       {"weights", opt.weights},
                       {"oracle", opt.oracle},
                       {"match", opt.match.config_json()}});
  Reporter reporter(opt.out, manifest);
  json trace_json = to_json(trace);
  trace_json["dev_join"] = join_stats_json(dev);
  if (opt.oracle) {
    json oj = json::array();
    for (const BestSubset& b : oracle_best)
      oj.push_back({{"n", b.set.size()},
                    {"traits", b.set.to_string()},
                    {"criterion", b.criterion}});
    trace_json["exhaustive_best"] = oj;
  }
  if (!test_reports.empty()) trace_json["test_reports"] = test_reports;
  reporter.json_file("trace.json", trace_json);
  reporter.csv("table.csv", sffs_table_csv(rows));
  reporter.finish();

  for (const SffsTableRow& row : rows) {
    std::cout << "N=" << row.n << " {" << row.traits << "} dev EER "
              << format_percent(row.dev_eer, 1) << " %";
    if (row.has_test)
      std::cout << ", test EER " << format_percent(row.test_eer_mean, 1)
                << " +- " << format_percent(row.test_eer_std, 1) << " %";
    std::cout << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// cots

int run_cots(const std::string& annotations_path, const std::string& cots_path,
             const std::string& cots_source, const std::string& std_mode,
             bool no_vocabulary_restriction, const MatchOptions& match,
             const OutputOptions& out) {
  Manifest manifest("cots", 0);
  manifest.add_input(annotations_path);
  manifest.add_input(cots_path);
  const auto truth = load_annotations(annotations_path);
  const auto cots = load_cots(cots_path, cots_source == "facepp"
                                             ? ProfileSource::kCotsFacepp
                                             : ProfileSource::kCotsMicrosoft);

  const AccuracyTable accuracy =
      cots_accuracy(truth, cots, match.cuts(), !no_vocabulary_restriction);

  manifest.set_config({{"annotations", annotations_path},
                       {"cots", cots_path},
                       {"cots_source", cots_source},
                       {"std_mode", std_mode},
                       {"vocabulary_restriction", !no_vocabulary_restriction},
                       {"age_cuts", match.age_cuts}});
  Reporter reporter(out, manifest);
  reporter.csv("accuracy.csv", accuracy_csv(accuracy));
  reporter.json_file("accuracy.json", to_json(accuracy));

  try {
    const AgeStabilityTable stability =
        age_stability(cots, std_mode == "population" ? StdMode::kPopulation
                                                     : StdMode::kSample);
    if (!stability.has_multi_image)
      std::cerr << "softbio: no identity has two or more age estimates; the "
                   "stability table is trivial\n";
    reporter.csv("age_stability.csv", age_stability_csv(stability));
    reporter.json_file("age_stability.json", to_json(stability));
  } catch (const DataError& e) {
    std::cerr << "softbio: skipping age stability: " << e.what() << "\n";
  }
  reporter.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
  std::string spec_file;
  int subjects = 2000;
  std::string images_per_subject = "3";
  double noise = 0.0;
  double age_drift = 0.0;
  std::string age_mode = "categorical";
  int folds = 10;
  int per_class = 300;
  int dev_folds = 0;      // 0 = no development pairs file
  int dev_per_class = 0;  // 0 = same as per_class
  double target_eer = 0.12;
  std::vector<double> face_model;  // genuine_mean,genuine_std,imp_mean,imp_std
  std::uint64_t seed = 0;
  OutputOptions out;
};

ImagesPerSubject parse_images_per_subject(const std::string& text) {
  ImagesPerSubject dist;
  if (text.find(':') == std::string::npos) {
    try {
      return ImagesPerSubject::fixed(std::stoi(text));
    } catch (const std::exception&) {
      throw UsageError("bad --images-per-subject: " + text);
    }
  }
  // "1:0.5,2:0.3,3:0.2"
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? comma : comma - start);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw UsageError("bad --images-per-subject entry: " + item);
    try {
      dist.histogram.emplace_back(std::stoi(item.substr(0, colon)),
                                  std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw UsageError("bad --images-per-subject entry: " + item);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return dist;
}

SynthSpec build_spec(const SynthOptions& opt, const CLI::App* cmd, int& folds,
                     int& per_class, FaceScoreModel& model) {
  SynthSpec spec;
  spec.n_subjects = opt.subjects;
  spec.images_per_subject = parse_images_per_subject(opt.images_per_subject);
  spec.label_noise.fill(opt.noise);
  spec.age_drift_years = opt.age_drift;
  spec.age_mode = opt.age_mode == "years" ? SynthAgeMode::kYears
                                          : SynthAgeMode::kCategorical;
  spec.seed = resolve_seed(cmd, opt.seed);
  folds = opt.folds;
  per_class = opt.per_class;
  model = FaceScoreModel::from_target_eer(opt.target_eer);

  if (!opt.spec_file.empty()) {
    std::ifstream in(opt.spec_file);
    if (!in) throw UsageError("cannot open file: " + opt.spec_file);
    json j;
    try {
      j = json::parse(in);
      if (j.contains("subjects")) spec.n_subjects = j["subjects"];
      if (j.contains("images_per_subject")) {
        const auto& v = j["images_per_subject"];
        if (v.is_number_integer()) {
          spec.images_per_subject = ImagesPerSubject::fixed(v);
        } else {
          spec.images_per_subject.histogram.clear();
          for (const auto& [count, prob] : v.items())
            spec.images_per_subject.histogram.emplace_back(
                std::stoi(count), prob.get<double>());
        }
      }
      if (j.contains("priors")) {
        for (const auto& [name, probs] : j["priors"].items()) {
          const TraitKind kind = trait_from_name(name);
          spec.trait_priors[static_cast<int>(kind)] =
              probs.get<std::vector<double>>();
        }
      }
      if (j.contains("label_noise")) {
        const auto& v = j["label_noise"];
        if (v.is_number()) {
          spec.label_noise.fill(v.get<double>());
        } else {
          for (const auto& [name, rate] : v.items())
            spec.label_noise[static_cast<int>(trait_from_name(name))] = rate;
        }
      }
      if (j.contains("age_drift_years"))
        spec.age_drift_years = j["age_drift_years"];
      if (j.contains("age_mode"))
        spec.age_mode = j["age_mode"] == "years" ? SynthAgeMode::kYears
                                                 : SynthAgeMode::kCategorical;
      if (j.contains("seed") && !cmd->count("--seed"))
        spec.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("folds")) folds = j["folds"];
      if (j.contains("per_class")) per_class = j["per_class"];
      if (j.contains("face_model")) {
        const auto& fm = j["face_model"];
        if (fm.contains("target_eer")) {
          model = FaceScoreModel::from_target_eer(fm["target_eer"]);
        } else {
          model.genuine_mean = fm.value("genuine_mean", 1.0);
          model.genuine_std = fm.value("genuine_std", 1.0);
          model.impostor_mean = fm.value("impostor_mean", 0.0);
          model.impostor_std = fm.value("impostor_std", 1.0);
          model.validate();
        }
      }
    } catch (const json::exception& e) {
      throw UsageError("bad spec JSON: " + std::string(e.what()));
    }
  }

  // Explicit flags override the spec file.
  if (cmd->count("--subjects")) spec.n_subjects = opt.subjects;
  if (cmd->count("--images-per-subject"))
    spec.images_per_subject = parse_images_per_subject(opt.images_per_subject);
  if (cmd->count("--noise")) spec.label_noise.fill(opt.noise);
  if (cmd->count("--age-drift")) spec.age_drift_years = opt.age_drift;
  if (cmd->count("--age-mode"))
    spec.age_mode = opt.age_mode == "years" ? SynthAgeMode::kYears
                                            : SynthAgeMode::kCategorical;
  if (cmd->count("--folds")) folds = opt.folds;
  if (cmd->count("--per-class")) per_class = opt.per_class;
  if (cmd->count("--target-eer"))
    model = FaceScoreModel::from_target_eer(opt.target_eer);
  if (cmd->count("--face-model")) {
    model = {opt.face_model[0], opt.face_model[1], opt.face_model[2],
             opt.face_model[3]};
    model.validate();
  }
  return spec;
}

int run_synth(const SynthOptions& opt, const CLI::App* cmd) {
  int folds = 0, per_class = 0;
  FaceScoreModel model;
  const SynthSpec spec = build_spec(opt, cmd, folds, per_class, model);

  const SynthPopulation population = generate_population(spec);
  const PairsFile pairs =
      generate_pairs(population, folds, per_class, spec.seed + 1);
  const auto scores = generate_face_scores(pairs.pairs, model, spec.seed + 2,
                                           "synthetic-face");

  // Optional development split: same population and noise realization,
  // independent pair sampling (subjects may recur across the two files,
  // mirroring the source protocol's views).
  std::optional<PairsFile> dev_pairs;
  std::vector<ScoreRecord> dev_scores;
  if (opt.dev_folds > 0) {
    const int dev_per_class =
        opt.dev_per_class > 0 ? opt.dev_per_class : per_class;
    dev_pairs = generate_pairs(population, opt.dev_folds, dev_per_class,
                               spec.seed + 3);
    dev_scores = generate_face_scores(dev_pairs->pairs, model, spec.seed + 4,
                                      "synthetic-face");
  }

  Manifest manifest("synth", spec.seed);
  if (!opt.spec_file.empty()) manifest.add_input(opt.spec_file);
  json priors = json::object();
  json noise = json::object();
  for (int t = 0; t < kTraitCount; ++t) {
    priors[trait_name(kAllTraitKinds[t])] = spec.trait_priors[t];
    noise[trait_name(kAllTraitKinds[t])] = spec.label_noise[t];
  }
  manifest.set_config(
      {{"subjects", spec.n_subjects},
       {"priors", priors},
       {"label_noise", noise},
       {"age_drift_years", spec.age_drift_years},
       {"age_mode",
        spec.age_mode == SynthAgeMode::kYears ? "years" : "categorical"},
       {"folds", folds},
       {"per_class", per_class},
       {"dev_folds", opt.dev_folds},
       {"dev_per_class", opt.dev_per_class > 0 ? opt.dev_per_class : per_class},
       {"face_model",
        {{"genuine_mean", model.genuine_mean},
         {"genuine_std", model.genuine_std},
         {"impostor_mean", model.impostor_mean},
         {"impostor_std", model.impostor_std},
         {"analytic_eer", model.analytic_eer()}}},
       {"pairs_seed", spec.seed + 1},
       {"scores_seed", spec.seed + 2}});

  Reporter reporter(opt.out, manifest);
  reporter.raw("annotations.csv", emit_annotations(population.annotations));
  reporter.raw("pairs.txt", emit_pairs(pairs));
  reporter.raw("scores.csv", emit_scores(scores));
  if (dev_pairs) {
    reporter.raw("pairs_dev.txt", emit_pairs(*dev_pairs));
    reporter.raw("scores_dev.csv", emit_scores(dev_scores));
  }
  reporter.finish();

  std::cout << "wrote " << population.annotations.size() << " images over "
            << spec.n_subjects << " subjects, " << pairs.pairs.size()
            << " pairs, analytic face EER "
            << format_percent(model.analytic_eer(), 1) << " %\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-biometric verification and fusion experiments"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // stats
  std::string stats_annotations;
  MatchOptions stats_match;
  OutputOptions stats_out;
  CLI::App* stats = app.add_subcommand(
      "stats", "Demographic statistics and trait correlations");
  stats->add_option("--annotations", stats_annotations, "Annotation CSV")
      ->required();
  stats_match.attach(stats);
  stats_out.attach(stats);

  // eval
  EvalOptions eval_opt;
  CLI::App* eval = app.add_subcommand(
      "eval", "Soft / face / fused verification over a pairs protocol");
  eval->add_option("--pairs", eval_opt.pairs, "Pairs file")->required();
  eval->add_option("--annotations", eval_opt.annotations,
                   "Manual annotation CSV");
  eval->add_option("--cots", eval_opt.cots, "COTS estimate CSV");
  eval->add_option("--cots-source", eval_opt.cots_source,
                   "COTS vendor tag: facepp or microsoft")
      ->check(CLI::IsMember({"facepp", "microsoft"}));
  eval->add_option("--scores", eval_opt.scores, "Face matcher score CSV");
  eval->add_option("--matcher-id", eval_opt.matcher_id,
                   "Matcher id (defaults to the score file stem)");
  eval->add_flag("--invert-scores", eval_opt.invert_scores,
                 "Negate scores from a distance-like matcher");
  eval->add_option("--traits", eval_opt.traits,
                   "Comma-separated soft-biometric set");
  eval->add_flag("--fuse", eval_opt.fuse, "Also evaluate the face+soft fusion");
  eval->add_option("--norm", eval_opt.norm, "Score normalization")
      ->check(CLI::IsMember({"minmax", "zscore"}));
  eval->add_option("--weights", eval_opt.weights,
                   "Fusion weights face,soft (sum 1)")
      ->delimiter(',')
      ->expected(2);
  eval->add_option("--soft-missing", eval_opt.soft_missing,
                   "Fallback when a pair has no soft evidence")
      ->check(CLI::IsMember({"face-only", "drop-pair"}));
  eval->add_option("--join", eval_opt.join_policy,
                   "drop unresolvable pairs with a count, or strict")
      ->check(CLI::IsMember({"drop", "strict"}));
  eval->add_flag("--train-threshold", eval_opt.train_threshold,
                 "Train per-fold decision thresholds and report accuracy");
  eval->add_option("--seed", eval_opt.seed, "Run seed (recorded in manifest)");
  eval_opt.match.attach(eval);
  eval_opt.out.attach(eval);

  // sffs
  SffsOptions sffs_opt;
  CLI::App* sffs_cmd = app.add_subcommand(
      "sffs", "Sequential floating forward trait selection minimizing EER");
  sffs_cmd->add_option("--dev-pairs", sffs_opt.dev_pairs,
                       "Development pairs driving the selection")
      ->required();
  sffs_cmd->add_option("--test-pairs", sffs_opt.test_pairs,
                       "Held-out pairs for per-N re-evaluation");
  sffs_cmd->add_option("--annotations", sffs_opt.annotations,
                       "Manual annotation CSV");
  sffs_cmd->add_option("--cots", sffs_opt.cots, "COTS estimate CSV");
  sffs_cmd->add_option("--cots-source", sffs_opt.cots_source, "COTS vendor")
      ->check(CLI::IsMember({"facepp", "microsoft"}));
  sffs_cmd->add_option("--scores", sffs_opt.scores, "Face matcher score CSV");
  sffs_cmd->add_option("--matcher-id", sffs_opt.matcher_id, "Matcher id");
  sffs_cmd->add_flag("--invert-scores", sffs_opt.invert_scores,
                     "Negate distance-like scores");
  sffs_cmd->add_flag("--fuse", sffs_opt.fuse,
                     "Select by fused EER instead of soft-only EER");
  sffs_cmd->add_option("--norm", sffs_opt.norm, "Score normalization")
      ->check(CLI::IsMember({"minmax", "zscore"}));
  sffs_cmd->add_option("--weights", sffs_opt.weights, "Fusion weights")
      ->delimiter(',')
      ->expected(2);
  sffs_cmd->add_option("--traits", sffs_opt.candidates, "Candidate traits");
  sffs_cmd->add_option("--max-n", sffs_opt.max_n, "Largest set size")
      ->check(CLI::Range(1, 6));
  sffs_cmd->add_flag("--oracle", sffs_opt.oracle,
                     "Also run the exhaustive per-N search");
  sffs_cmd->add_option("--join", sffs_opt.join_policy, "Join policy")
      ->check(CLI::IsMember({"drop", "strict"}));
  sffs_opt.match.attach(sffs_cmd);
  sffs_opt.out.attach(sffs_cmd);

  // cots
  std::string cots_annotations, cots_file, cots_source = "microsoft";
  std::string cots_std_mode = "sample";
  bool cots_no_restriction = false;
  MatchOptions cots_match;
  OutputOptions cots_out;
  CLI::App* cots_cmd = app.add_subcommand(
      "cots", "COTS-vs-groundtruth accuracy and age stability");
  cots_cmd->add_option("--annotations", cots_annotations, "Groundtruth CSV")
      ->required();
  cots_cmd->add_option("--cots", cots_file, "COTS estimate CSV")->required();
  cots_cmd->add_option("--cots-source", cots_source, "COTS vendor")
      ->check(CLI::IsMember({"facepp", "microsoft"}));
  cots_cmd->add_option("--std-mode", cots_std_mode,
                       "Age stability std denominator")
      ->check(CLI::IsMember({"sample", "population"}));
  cots_cmd->add_flag("--no-vocabulary-restriction", cots_no_restriction,
                     "Evaluate all groundtruth instances even when the COTS "
                     "never outputs them");
  cots_match.attach(cots_cmd);
  cots_out.attach(cots_cmd);

  // synth
  SynthOptions synth_opt;
  CLI::App* synth = app.add_subcommand(
      "synth", "Seeded synthetic population, pairs and face scores");
  synth->add_option("--spec", synth_opt.spec_file, "JSON spec file");
  synth->add_option("--subjects", synth_opt.subjects, "Number of subjects")
      ->check(CLI::Range(1, 100000000));
  synth->add_option("--images-per-subject", synth_opt.images_per_subject,
                    "Fixed count or histogram \"1:0.5,2:0.5\"");
  synth->add_option("--noise", synth_opt.noise,
                    "Per-trait label noise rate in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--age-drift", synth_opt.age_drift,
                    "Std of the per-image age jitter (years mode)")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--age-mode", synth_opt.age_mode,
                    "categorical or years age values")
      ->check(CLI::IsMember({"categorical", "years"}));
  synth->add_option("--folds", synth_opt.folds, "Protocol folds")
      ->check(CLI::Range(2, 1000));
  synth->add_option("--per-class", synth_opt.per_class,
                    "Genuine (= impostor) pairs per fold")
      ->check(CLI::PositiveNumber);
  synth->add_option("--dev-folds", synth_opt.dev_folds,
                    "Also emit a development pairs file with this many folds")
      ->check(CLI::Range(0, 1000));
  synth->add_option("--dev-per-class", synth_opt.dev_per_class,
                    "Per-class pairs per development fold");
  synth->add_option("--target-eer", synth_opt.target_eer,
                    "Calibrate face scores to this EER");
  synth->add_option("--face-model", synth_opt.face_model,
                    "genuine_mean,genuine_std,impostor_mean,impostor_std")
      ->delimiter(',')
      ->expected(4);
  synth->add_option("--seed", synth_opt.seed, "Generator seed");
  synth_opt.out.attach(synth);

  try {
    app.parse(argc, argv);
    if (*stats) return run_stats(stats_annotations, stats_match, stats_out);
    if (*eval) {
      if (eval_opt.annotations.empty() == eval_opt.cots.empty())
        throw UsageError("pass exactly one of --annotations or --cots");
      return run_eval(eval_opt, eval);
    }
    if (*sffs_cmd) {
      if (sffs_opt.annotations.empty() == sffs_opt.cots.empty())
        throw UsageError("pass exactly one of --annotations or --cots");
      return run_sffs(sffs_opt);
    }
    if (*cots_cmd)
      return run_cots(cots_annotations, cots_file, cots_source, cots_std_mode,
                      cots_no_restriction, cots_match, cots_out);
    if (*synth) return run_synth(synth_opt, synth);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "softbio: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "softbio: " << e.what() << "\n";
    return 1;
  }
}
