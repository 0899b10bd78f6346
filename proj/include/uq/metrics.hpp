#pragma once

// Evaluation metrics and harnesses: AUROC, precision/recall/F1, filtered
// accuracy over a confidence-threshold grid, stratified k-fold
// cross-validation, and the candidate-count sweep for black-box scorers.
//
// Label orientation everywhere: labels are is_correct (1 = correct response),
// and confidence scores are treated as scores for the correct class.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uq/blackbox.hpp"
#include "uq/core.hpp"
#include "uq/ensemble.hpp"
#include "uq/providers.hpp"

namespace uq::metrics {

// Rank-based AUROC with mid-rank tie handling; equals concordant-pair
// counting with ties worth one half, exactly. Throws DegenerateObjective
// unless both classes appear.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;  // some denominator was zero and yielded 0
};

// Standard definitions for the positive (correct) class.
Prf precision_recall_f1(const std::vector<int>& predictions, const std::vector<int>& labels);

struct FilteredAccuracyPoint {
    double tau = 0.0;
    std::optional<double> accuracy;  // empty when no rows were retained
    std::size_t n_retained = 0;
};

// Grid {0.0, 0.1, ..., 0.9}.
std::vector<double> default_filter_grid();

// Accuracy over rows whose confidence exceeds tau (strictly), with tau = 0
// retaining the full sample via score >= 0. Empty retained sets record an
// undefined accuracy marker rather than failing, so curves stay aligned.
std::vector<FilteredAccuracyPoint> filtered_accuracy_at_tau(const std::vector<double>& scores,
                                                            const std::vector<int>& labels_correct,
                                                            const std::vector<double>& tau_grid);

// ============================================================================
// Cross-validated evaluation
// ============================================================================

struct FoldMetrics {
    double auroc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double threshold = 0.0;
};

struct EvalReport {
    std::vector<FoldMetrics> per_fold;
    FoldMetrics aggregate;  // unweighted means across folds
    std::vector<FilteredAccuracyPoint> filtered_accuracy;  // pooled out-of-fold scores
    // What was evaluated: a concrete config (fixed or tuned on the full data)
    // or a bare scorer name in single-scorer mode.
    std::optional<EnsembleConfig> config_snapshot;
    std::string scorer_name;
};

enum class EvalMode { tune_ensemble, fixed_config, single_scorer };

struct CvOptions {
    int k = 5;
    std::uint64_t seed = 0;
    EvalMode mode = EvalMode::tune_ensemble;
    // tune_ensemble: objective auroc runs the sequential regime per fold,
    // objective f1 the joint regime.
    ensemble::Objective objective = ensemble::Objective::auroc;
    int trials = 1000;
    bool refine = true;
    EnsembleConfig fixed_config;  // fixed_config mode
    std::string scorer;           // single_scorer mode
};

// Deterministic stratified fold assignment: per-class seeded shuffle followed
// by round-robin dealing. Returns k index sets. Throws SplitError when a
// class has fewer members than k.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int k,
                                                       std::uint64_t seed);

// Per fold: fit on the other k-1 folds per CvOptions, evaluate AUROC and
// threshold metrics on the holdout, then aggregate by unweighted mean.
// The filtered-accuracy curve is computed over pooled out-of-fold scores.
EvalReport kfold_cv_evaluate(const ensemble::TuningDataset& data, const CvOptions& options);

// ============================================================================
// Candidate-count sweep
// ============================================================================

struct SweepRow {
    std::string scorer;
    int m = 0;
    double auroc_value = 0.0;
};

// Recomputes the requested black-box scorers with candidates truncated to the
// first m for each m in m_values, and reports AUROC per (scorer, m). Rows are
// emitted scorer-major in input order. Providers may be null only if no
// requested scorer needs them.
std::vector<SweepRow> candidate_count_sweep(const std::vector<ResponseRecord>& records,
                                            const std::vector<int>& m_values,
                                            const std::vector<std::string>& scorers,
                                            const std::vector<CorrectnessLabel>& labels,
                                            providers::NliModel* nli,
                                            providers::TokenEmbedder* token_embedder,
                                            providers::SentenceEmbedder* sentence_embedder,
                                            double entail_threshold = blackbox::kDefaultEntailThreshold,
                                            int parallel = 1);

}  // namespace uq::metrics
