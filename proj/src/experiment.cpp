#include "softbio/experiment.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace softbio {

std::optional<double> soft_pair_score(const JoinedPair& pair,
                                      const SoftScorerConfig& cfg) {
  const std::optional<double> d =
      dissimilarity_if_defined(pair.left, pair.right, cfg.traits, cfg.match);
  if (!d) return std::nullopt;
  return soft_score(*d, cfg.match);
}

PairScorer face_scorer() {
  return [](const JoinedPair& pair) { return pair.face_score; };
}

PairScorer make_soft_scorer(const SoftScorerConfig& cfg) {
  return [cfg](const JoinedPair& pair) { return soft_pair_score(pair, cfg); };
}

namespace {

std::vector<int> fold_ids(std::span<const JoinedPair> pairs) {
  std::vector<int> folds;
  for (const JoinedPair& p : pairs) {
    if (std::find(folds.begin(), folds.end(), p.pair.fold) == folds.end())
      folds.push_back(p.pair.fold);
  }
  std::sort(folds.begin(), folds.end());
  return folds;
}

void add_score(ScoreSet& set, const JoinedPair& pair, double score) {
  if (pair.pair.label == PairLabel::kGenuine)
    set.genuine.push_back(score);
  else
    set.impostor.push_back(score);
}

}  // namespace

FoldReport cross_validate(std::span<const JoinedPair> pairs,
                          const ScorerFactory& factory, bool train_threshold,
                          std::vector<ScoreSet>* fold_scores_out) {
  if (pairs.empty()) throw DataError("no pairs to evaluate");
  const std::vector<int> folds = fold_ids(pairs);
  if (folds.size() < 2)
    throw DataError("cross-validation needs at least 2 folds, got " +
                    std::to_string(folds.size()));

  if (fold_scores_out) fold_scores_out->clear();
  FoldReport report;
  for (int fold : folds) {
    std::vector<JoinedPair> training;
    training.reserve(pairs.size());
    for (const JoinedPair& p : pairs)
      if (p.pair.fold != fold) training.push_back(p);

    const PairScorer scorer = factory(fold, training);

    ScoreSet test;
    for (const JoinedPair& p : pairs) {
      if (p.pair.fold != fold) continue;
      const std::optional<double> s = scorer(p);
      if (!s) {
        ++report.dropped_pairs;
        continue;
      }
      add_score(test, p, *s);
    }
    if (test.genuine.empty() || test.impostor.empty())
      throw DataError("fold " + std::to_string(fold) +
                      " is missing one score class");
    report.scored_pairs += test.genuine.size() + test.impostor.size();
    report.fold_ids.push_back(fold);
    report.fold_eer.push_back(eer(test));

    if (train_threshold) {
      ScoreSet train;
      for (const JoinedPair& p : training) {
        const std::optional<double> s = scorer(p);
        if (s) add_score(train, p, *s);
      }
      const double t = train_hter_threshold(train);
      report.fold_threshold.push_back(t);
      report.fold_accuracy.push_back(accuracy_at_threshold(test, t));
    }
    if (fold_scores_out) fold_scores_out->push_back(std::move(test));
  }

  std::tie(report.eer_mean, report.eer_std) = mean_std(report.fold_eer);
  if (train_threshold) {
    report.has_accuracy = true;
    std::tie(report.accuracy_mean, report.accuracy_std) =
        mean_std(report.fold_accuracy);
  }
  return report;
}

FoldReport cross_validate(std::span<const JoinedPair> pairs,
                          const PairScorer& scorer, bool train_threshold,
                          std::vector<ScoreSet>* fold_scores_out) {
  return cross_validate(
      pairs,
      [&scorer](int, std::span<const JoinedPair>) { return scorer; },
      train_threshold, fold_scores_out);
}

EerResult pooled_eer(std::span<const JoinedPair> pairs,
                     const PairScorer& scorer) {
  ScoreSet scores;
  for (const JoinedPair& p : pairs) {
    const std::optional<double> s = scorer(p);
    if (s) add_score(scores, p, *s);
  }
  return eer_detail(scores);
}

namespace {

struct FittedFusion {
  Normalizer face_norm;
  Normalizer soft_norm;
};

FittedFusion fit_fusion(std::span<const JoinedPair> training,
                        const FusedConfig& cfg) {
  std::vector<double> face_scores, soft_scores;
  for (const JoinedPair& p : training) {
    if (p.face_score) face_scores.push_back(*p.face_score);
    const std::optional<double> s = soft_pair_score(p, cfg.soft);
    if (s) soft_scores.push_back(*s);
  }
  return {Normalizer::fit(face_scores, cfg.norm),
          Normalizer::fit(soft_scores, cfg.norm)};
}

PairScorer fused_scorer(FittedFusion fitted, const FusedConfig& cfg) {
  return [fitted, cfg](const JoinedPair& pair) {
    return fuse(pair.face_score, soft_pair_score(pair, cfg.soft),
                fitted.face_norm, fitted.soft_norm, cfg.fusion);
  };
}

}  // namespace

ScorerFactory make_fused_scorer_factory(const FusedConfig& cfg) {
  cfg.fusion.validate();
  return [cfg](int held_out_fold,
               std::span<const JoinedPair> training) -> PairScorer {
    for (const JoinedPair& p : training) {
      if (p.pair.fold == held_out_fold)
        throw Error("normalizer fitting saw a pair of held-out fold " +
                    std::to_string(held_out_fold));
    }
    return fused_scorer(fit_fusion(training, cfg), cfg);
  };
}

PairScorer make_pooled_fused_scorer(std::span<const JoinedPair> pairs,
                                    const FusedConfig& cfg) {
  cfg.fusion.validate();
  return fused_scorer(fit_fusion(pairs, cfg), cfg);
}

std::vector<ScoreRecord> fused_score_records(std::span<const JoinedPair> pairs,
                                             const FusedConfig& cfg,
                                             const std::string& face_matcher) {
  std::string set_name = cfg.soft.traits.to_string();
  if (cfg.soft.match.glasses_variant == GlassesVariant::kNoSunglasses &&
      cfg.soft.traits.contains(TraitKind::kGlasses)) {
    const std::size_t pos = set_name.find("glasses");
    set_name.insert(pos + std::string("glasses").size(), "*");
  }
  const std::string matcher_id = "fused:" + face_matcher + ":" + set_name;

  const ScorerFactory factory = make_fused_scorer_factory(cfg);
  std::map<int, PairScorer> scorers;
  for (int fold : fold_ids(pairs)) {
    std::vector<JoinedPair> training;
    for (const JoinedPair& p : pairs)
      if (p.pair.fold != fold) training.push_back(p);
    scorers.emplace(fold, factory(fold, training));
  }

  std::vector<ScoreRecord> records;
  for (const JoinedPair& p : pairs) {
    const std::optional<double> s = scorers.at(p.pair.fold)(p);
    if (!s) continue;
    records.push_back({p.pair.left_image, p.pair.right_image, *s, matcher_id});
  }
  return records;
}

}  // namespace softbio
