#include "softbio/selection.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace softbio {

namespace {

// Evaluates the criterion with memoization (sound: the criterion is required
// to be deterministic) and wraps failures with the offending subset.
class CriterionCache {
 public:
  explicit CriterionCache(const Criterion& criterion)
      : criterion_(criterion) {}

  double operator()(const TraitSet& set) {
    const auto it = cache_.find(set.bits());
    if (it != cache_.end()) return it->second;
    double value;
    try {
      value = criterion_(set);
    } catch (const std::exception& e) {
      throw DataError("criterion failed on {" + set.to_string() +
                      "}: " + e.what());
    }
    if (!std::isfinite(value))
      throw DataError("criterion returned a non-finite value on {" +
                      set.to_string() + "}");
    cache_.emplace(set.bits(), value);
    return value;
  }

 private:
  const Criterion& criterion_;
  std::map<std::uint8_t, double> cache_;
};

void record_best(std::vector<std::optional<BestSubset>>& best,
                 const TraitSet& set, double value) {
  auto& slot = best[set.size() - 1];
  if (!slot || value < slot->criterion ||
      (value == slot->criterion && traitset_lex_less(set, slot->set))) {
    slot = BestSubset{set, value};
  }
}

}  // namespace

SelectionTrace sffs(const TraitSet& candidates, const Criterion& criterion,
                    int max_n) {
  if (candidates.empty()) throw UsageError("sffs: no candidate traits");
  if (max_n < 1 || max_n > candidates.size())
    throw UsageError("sffs: max_n must lie in 1.." +
                     std::to_string(candidates.size()));

  CriterionCache J(criterion);
  SelectionTrace trace;
  trace.best_per_size.resize(max_n);

  TraitSet current;
  while (current.size() < max_n) {
    // Forward step: include the trait whose addition minimizes the criterion.
    TraitKind best_add = TraitKind::kGender;
    double best_value = std::numeric_limits<double>::infinity();
    bool found = false;
    for (TraitKind kind : kAllTraitKinds) {
      if (!candidates.contains(kind) || current.contains(kind)) continue;
      const double value = J(current.with(kind));
      if (value < best_value) {
        best_value = value;
        best_add = kind;
        found = true;
      }
    }
    if (!found) break;  // candidates exhausted (cannot happen with max_n guard)
    current = current.with(best_add);
    trace.steps.push_back({SelectionStep::Action::kAdd, best_add, current,
                           best_value});
    record_best(trace.best_per_size, current, best_value);

    // Floating step: drop traits while the reduced set strictly beats the
    // best known set of that size.
    while (current.size() >= 2) {
      TraitKind best_remove = TraitKind::kGender;
      double best_reduced = std::numeric_limits<double>::infinity();
      for (TraitKind kind : kAllTraitKinds) {
        if (!current.contains(kind)) continue;
        const double value = J(current.without(kind));
        if (value < best_reduced) {
          best_reduced = value;
          best_remove = kind;
        }
      }
      const auto& incumbent = trace.best_per_size[current.size() - 2];
      if (incumbent && !(best_reduced < incumbent->criterion)) break;
      current = current.without(best_remove);
      trace.steps.push_back({SelectionStep::Action::kRemove, best_remove,
                             current, best_reduced});
      record_best(trace.best_per_size, current, best_reduced);
    }
  }
  return trace;
}

std::vector<BestSubset> exhaustive_best(const TraitSet& candidates,
                                        const Criterion& criterion) {
  if (candidates.empty())
    throw UsageError("exhaustive_best: no candidate traits");
  if (candidates.size() > 20)
    throw UsageError("exhaustive_best: refusing more than 20 candidates");

  const std::uint8_t all = candidates.bits();
  std::vector<std::optional<BestSubset>> best(candidates.size());
  // Enumerate the nonempty submasks of the candidate mask.
  for (std::uint8_t sub = all;; sub = (sub - 1) & all) {
    if (sub != 0) {
      const TraitSet set = TraitSet::from_bits(sub);
      double value;
      try {
        value = criterion(set);
      } catch (const std::exception& e) {
        throw DataError("criterion failed on {" + set.to_string() +
                        "}: " + e.what());
      }
      if (!std::isfinite(value))
        throw DataError("criterion returned a non-finite value on {" +
                        set.to_string() + "}");
      record_best(best, set, value);
    }
    if (sub == 0) break;
  }

  std::vector<BestSubset> out;
  out.reserve(best.size());
  for (const auto& slot : best) out.push_back(*slot);
  return out;
}

}  // namespace softbio
