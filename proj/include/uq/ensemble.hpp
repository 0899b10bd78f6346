#pragma once

// Weighted-average ensemble over component confidence scores, plus the two
// tuning regimes:
//   - threshold-agnostic: seeded uniform-Dirichlet random search maximizing
//     AUROC, optionally followed by threshold tuning on an F1 grid
//     (tune_sequential composes both);
//   - threshold-aware: seeded random search over (weights, threshold) jointly
//     maximizing F1.
//
// Both searches break objective ties deterministically: the first trial wins.
// A local coordinate-refinement pass (on by default) then walks deterministic
// candidates from the incumbent: dropping one component and convex moves
// toward each vertex. A candidate replaces the incumbent iff it strictly
// improves the objective, or ties it with strictly fewer nonzero weights.
// Plateaued objectives therefore resolve to the simplest weight vector on the
// plateau instead of an arbitrary early sample. Pass refine = false for the
// bare random search.
//
// Rows whose ensemble score is MISSING (every weighted component missing) are
// excluded from tuning objectives.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uq/core.hpp"

namespace uq::ensemble {

enum class Objective { auroc, f1 };

std::string to_string(Objective objective);
Objective objective_from_string(const std::string& s);

// Graded score rows for tuning: every row's ScoreVector must cover
// scorer_names (a MISSING entry with a reason still counts as covered).
struct TuningDataset {
    std::vector<std::string> scorer_names;
    std::vector<std::pair<ScoreVector, CorrectnessLabel>> rows;

    void validate() const;
};

struct TuneResult {
    EnsembleConfig config;
    double objective_value = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    Objective objective_name = Objective::auroc;
};

// Weighted average of the non-MISSING components, with weights renormalized
// over the available ones. All components MISSING yields MISSING. If present
// components carry zero total weight, the score falls back to their unweighted
// mean, preserving the guarantee that any present component produces a score
// in [0, 1]. A weight naming a scorer the vector has never heard of (neither
// present nor missing) is a configuration error.
std::optional<double> ensemble_score(const ScoreVector& scores,
                                     const std::map<std::string, double>& weights);

// Maximizes AUROC of the ensemble score over the weight simplex. The returned
// config carries a neutral placeholder threshold of 0.5; use tune_sequential
// or tune_threshold to fit one.
TuneResult tune_weights_threshold_agnostic(const TuningDataset& data, int trials,
                                           std::uint64_t seed, bool refine = true);

// F1-optimal threshold over the fixed grid {0.01, 0.02, ..., 0.99}, for
// predicting correctness via score >= threshold. Lowest grid value wins ties.
double tune_threshold(const std::vector<double>& ensemble_scores,
                      const std::vector<int>& labels_correct);

inline constexpr int kThresholdGridSize = 99;

// Sequential regime: AUROC-tuned weights first, then the F1 grid
// threshold on the resulting ensemble scores. objective_value reports the
// weight-stage AUROC.
TuneResult tune_sequential(const TuningDataset& data, int trials, std::uint64_t seed,
                           bool refine = true);

// Joint regime: random search over (weights, threshold) maximizing F1. The
// refinement pass re-fits candidate weights with their grid-optimal threshold.
TuneResult tune_joint(const TuningDataset& data, int trials, std::uint64_t seed,
                      bool refine = true);

}  // namespace uq::ensemble
