#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "softbio/traits.hpp"

namespace softbio {

// Subset criterion to minimize (EER in the verification use). Must be
// deterministic for a given set.
using Criterion = std::function<double(const TraitSet&)>;

struct SelectionStep {
  enum class Action { kAdd, kRemove };
  Action action;
  TraitKind trait;
  TraitSet result;      // the set after the step
  double criterion;     // criterion of `result`
};

struct BestSubset {
  TraitSet set;
  double criterion = 0.0;
};

struct SelectionTrace {
  std::vector<SelectionStep> steps;
  // Best set found for each size 1..max_n (index size-1). A size the search
  // never visited is disengaged (cannot happen for sizes <= max_n).
  std::vector<std::optional<BestSubset>> best_per_size;
};

// Sequential floating forward selection minimizing the criterion: repeatedly
// add the best trait, then undo additions while dropping a trait improves the
// best known set of the smaller size (strict improvement). Ties resolve to
// the earliest trait in the fixed order. Runs until size max_n is reached and
// no removal improves; records the best set per size along the way.
SelectionTrace sffs(const TraitSet& candidates, const Criterion& criterion,
                    int max_n);

// Evaluates every nonempty subset (guarded to <= 20 candidates) and returns
// the minimum-criterion subset per size, ties broken lexicographically by the
// fixed trait order.
std::vector<BestSubset> exhaustive_best(const TraitSet& candidates,
                                        const Criterion& criterion);

}  // namespace softbio
