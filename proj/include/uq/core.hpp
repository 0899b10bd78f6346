#pragma once

// Domain types shared by every module: prompts, generations, score vectors,
// correctness labels, and the ensemble configuration. All types are immutable
// value types in practice (constructed, validated, then only read), which
// makes them safe to share across worker threads.
//
// Conventions pinned here:
//   - Confidence scores live in [0, 1]; higher means more confident the
//     response is correct. A scorer that cannot produce a value reports a
//     MISSING entry (std::optional empty / ScoreVector missing-reason).
//   - Correctness labels store both is_correct and the hallucination
//     indicator h with h = 1 - is_correct.
//   - A response is predicted to be a hallucination iff its confidence score
//     is strictly below the threshold.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uq/errors.hpp"

namespace uq {

// ============================================================================
// Prompts and generations
// ============================================================================

enum class TaskKind { math, multiple_choice, short_answer, freeform };

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& s);

struct PromptRecord {
    std::string id;    // unique within a dataset
    std::string text;  // the prompt given to the model
    TaskKind task_kind = TaskKind::freeform;
    // Reference answer(s). Math holds one integer-as-text, multiple choice one
    // letter, short answer any number of acceptable phrasings. Empty when no
    // reference is available (freeform / manual grading).
    std::vector<std::string> reference;

    void validate() const;  // id and text non-empty
};

struct Generation {
    std::string text;
    // Per-token probabilities in generation order, each in [0, 1]. Absent when
    // the provider does not expose token probabilities.
    std::optional<std::vector<double>> token_probs;

    std::size_t token_count() const { return token_probs ? token_probs->size() : 0; }
    void validate() const;  // if present: non-empty and every p in [0, 1]
};

struct ResponseRecord {
    PromptRecord prompt;
    Generation original;
    std::vector<Generation> candidates;  // m sampled candidates, may be empty
    double sampling_temperature = 1.0;   // temperature used for candidates

    std::size_t m() const { return candidates.size(); }
    void validate() const;
};

// ============================================================================
// Scores and labels
// ============================================================================

// Named confidence scores for one response. A scorer appears either in
// values (with a score in [0, 1]) or in missing (with a reason code), never
// both. Reason codes are a small fixed vocabulary, see scores file docs:
// no_candidates, no_token_probs, provider_failure, parse_failure,
// not_configured.
struct ScoreVector {
    std::map<std::string, double> values;
    std::map<std::string, std::string> missing;

    void set(const std::string& name, double value);
    void set_missing(const std::string& name, const std::string& reason);
    bool has(const std::string& name) const { return values.count(name) != 0; }
    double at(const std::string& name) const;
    std::optional<double> get(const std::string& name) const;
    // True if the name appears at all, present or missing.
    bool knows(const std::string& name) const;
};

struct CorrectnessLabel {
    int is_correct = 0;  // 1 when the response matches the reference
    int h = 1;           // hallucination indicator, h = 1 - is_correct

    static CorrectnessLabel from_correct(bool correct) {
        CorrectnessLabel label;
        label.is_correct = correct ? 1 : 0;
        label.h = correct ? 0 : 1;
        return label;
    }
    void validate() const;
};

// ============================================================================
// Ensemble configuration
// ============================================================================

struct EnsembleConfig {
    std::map<std::string, double> weights;  // scorer name -> weight on simplex
    double threshold = 0.5;                 // tau in (0, 1)

    void validate() const;
};

// Accepts iff all weights are >= 0 and sum to 1 within 1e-9; returns the map
// unchanged. Throws SimplexViolation otherwise.
const std::map<std::string, double>& validate_simplex(const std::map<std::string, double>& weights);

inline constexpr double kSimplexTolerance = 1e-9;

// Returns 1 iff score < threshold (strict), else 0. Requires score in [0, 1]
// and threshold in (0, 1).
int predict_hallucination(double score, double threshold);

}  // namespace uq
