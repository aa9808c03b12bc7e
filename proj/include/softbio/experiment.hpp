#pragma once

#include <functional>
#include <optional>
#include <span>

#include "softbio/fusion.hpp"
#include "softbio/io.hpp"
#include "softbio/metrics.hpp"
#include "softbio/traits.hpp"

namespace softbio {

struct SoftScorerConfig {
  TraitSet traits;
  MatchConfig match;
};

// Soft-biometric similarity of a joined pair; nullopt when the pair carries
// no trait evidence over the configured set.
std::optional<double> soft_pair_score(const JoinedPair& pair,
                                      const SoftScorerConfig& cfg);

// nullopt = pair dropped from the evaluation.
using PairScorer = std::function<std::optional<double>(const JoinedPair&)>;

// Builds the scorer for one held-out fold from the training pairs (which
// must not contain it).
using ScorerFactory = std::function<PairScorer(
    int held_out_fold, std::span<const JoinedPair> training)>;

// 10-fold style protocol over joined pairs: per held-out fold, the factory
// fits on the other folds, the fold's pairs are scored, and EER (plus the
// trained-threshold accuracy when requested) is reported. Thresholds are
// trained on the training pairs scored with the held-out fold's scorer.
// fold_scores_out, when given, receives each fold's test scores (for ROC
// emission).
FoldReport cross_validate(std::span<const JoinedPair> pairs,
                          const ScorerFactory& factory, bool train_threshold,
                          std::vector<ScoreSet>* fold_scores_out = nullptr);

// Same protocol with a fixed scorer (no per-fold fitting).
FoldReport cross_validate(std::span<const JoinedPair> pairs,
                          const PairScorer& scorer, bool train_threshold,
                          std::vector<ScoreSet>* fold_scores_out = nullptr);

// Pooled (single split) evaluation; used as the SFFS development criterion.
EerResult pooled_eer(std::span<const JoinedPair> pairs,
                     const PairScorer& scorer);

PairScorer face_scorer();
PairScorer make_soft_scorer(const SoftScorerConfig& cfg);

struct FusedConfig {
  SoftScorerConfig soft;
  NormMethod norm = NormMethod::kMinMax;
  FusionConfig fusion;
};

// Factory fitting per-fold face and soft normalizers on the training pairs.
// Throws Error if a training pair belongs to the held-out fold (leakage
// guard).
ScorerFactory make_fused_scorer_factory(const FusedConfig& cfg);

// Fused scorer with normalizers fit on the given pairs themselves (pooled
// evaluation; no fold structure).
PairScorer make_pooled_fused_scorer(std::span<const JoinedPair> pairs,
                                    const FusedConfig& cfg);

// Scores every pair within its own fold context and emits the result in the
// score-file schema under `fused:<face>:<softset>`. Dropped pairs are
// omitted.
std::vector<ScoreRecord> fused_score_records(std::span<const JoinedPair> pairs,
                                             const FusedConfig& cfg,
                                             const std::string& face_matcher);

}  // namespace softbio
