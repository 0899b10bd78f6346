#pragma once

// Batch orchestration: a bounded order-preserving parallel map, provider
// construction from a JSON config, cache-aware dataset generation, and
// dataset scoring with explicit per-scorer missing reasons.
//
// Missing-reason vocabulary written into score files:
//   no_candidates     consistency scorer with m = 0
//   no_token_probs    token-probability scorer without token probabilities
//   provider_failure  provider error that survived retries
//   parse_failure     judge replies never contained a numeric literal
//   not_configured    scorer requested without its provider (only reachable
//                     when pre-flight validation is bypassed)

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "json.hpp"
#include "uq/blackbox.hpp"
#include "uq/core.hpp"
#include "uq/datastore.hpp"
#include "uq/judge.hpp"
#include "uq/providers.hpp"

namespace uq::pipeline {

// ============================================================================
// Parallel map
// ============================================================================

// Applies fn to every input on up to `parallel` worker threads, returning
// results in input order. The first exception (by input index) is rethrown
// after all workers finish; fn must be safe to call concurrently.
template <class In, class F>
auto parallel_map(const std::vector<In>& inputs, F fn, int parallel)
    -> std::vector<std::invoke_result_t<F&, const In&>> {
    using Out = std::invoke_result_t<F&, const In&>;
    if (parallel < 1) throw InputError("parallel must be >= 1");
    std::vector<Out> results(inputs.size());
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(parallel), inputs.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < inputs.size(); ++i) results[i] = fn(inputs[i]);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(inputs.size());
    std::atomic<bool> any_error{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= inputs.size()) return;
            try {
                results[i] = fn(inputs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
                any_error.store(true);
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (any_error.load()) {
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    return results;
}

// One independent unit of work that either produced a value or failed with a
// recorded message. Used where partial completion is a valid outcome.
template <class T>
struct Outcome {
    std::optional<T> value;
    std::string error;

    bool ok() const { return value.has_value(); }
};

// parallel_map, but each input's exception is captured into its Outcome
// instead of aborting the batch.
template <class In, class F>
auto try_parallel_map(const std::vector<In>& inputs, F fn, int parallel)
    -> std::vector<Outcome<std::invoke_result_t<F&, const In&>>> {
    using Out = std::invoke_result_t<F&, const In&>;
    auto wrapped = [&fn](const In& input) -> Outcome<Out> {
        Outcome<Out> outcome;
        try {
            outcome.value = fn(input);
        } catch (const std::exception& e) {
            outcome.error = e.what();
        }
        return outcome;
    };
    return parallel_map(inputs, wrapped, parallel);
}

// ============================================================================
// Provider configuration
// ============================================================================

// The providers one run can draw on. Any slot may be empty; operations
// validate up front that the slots they need are filled. Judges are named
// generator providers addressed by scorer name "judge:<id>".
struct ProviderSet {
    std::shared_ptr<providers::Generator> generator;
    std::shared_ptr<providers::NliModel> nli;
    std::shared_ptr<providers::SentenceEmbedder> sentence_embedder;
    std::shared_ptr<providers::TokenEmbedder> token_embedder;
    std::vector<std::pair<std::string, std::shared_ptr<providers::Generator>>> judges;

    std::shared_ptr<providers::Generator> judge(const std::string& id) const;
};

// Builds a ProviderSet from a config object with optional keys "generator",
// "nli", "sentence_embedder", "token_embedder", and "judges" (a list whose
// entries additionally carry a unique "id"). Each provider object selects a
// backend via "kind":
//   mock      {"seed": u64, "vocabulary": [str...], "fail_first": int, "dim": int}
//   scripted  {"replies": [str...], "fail_first": int}  (generators only)
//   remote    {"id": str, "base_url": str, "api_key_env": str, "max_in_flight": int}
// Unknown kinds or malformed entries raise ConfigError.
ProviderSet make_providers(const nlohmann::json& config);

// Scorer-name helpers: judge scorers are "judge:<provider-id>".
bool is_judge_scorer(const std::string& name);
std::string judge_provider_id(const std::string& name);

// The non-judge scorer names in canonical order.
const std::vector<std::string>& known_scorers();

// ============================================================================
// Generation
// ============================================================================

struct GenerateOptions {
    int num_candidates = 10;            // m
    double candidate_temperature = 1.0;
    double original_temperature = 0.0;
    std::uint64_t seed = 0;
    int parallel = 1;
};

struct GenerateStats {
    std::size_t cache_hits = 0;    // generations served from the cache
    std::size_t cache_misses = 0;  // generations fetched from the provider
};

// Produces one ResponseRecord per prompt: the original generation at
// original_temperature with token probabilities (when supported), then
// num_candidates candidates at candidate_temperature. Every generation is
// looked up in the cache first and stored back on a fresh fetch, so reruns
// after a partial failure only touch the missing rows. Per-prompt failures
// are captured in the Outcome, not thrown.
std::vector<Outcome<ResponseRecord>> generate_records(const std::vector<PromptRecord>& prompts,
                                                      const GenerateOptions& options,
                                                      providers::Generator& generator,
                                                      store::GenerationCache* cache = nullptr,
                                                      GenerateStats* stats = nullptr);

// ============================================================================
// Scoring
// ============================================================================

struct ScoreOptions {
    std::vector<std::string> scorers;
    double entail_threshold = blackbox::kDefaultEntailThreshold;
    int parallel = 1;
    int judge_max_retries = 3;
    judge::JudgeConfig::Fallback judge_fallback = judge::JudgeConfig::Fallback::missing;
    double judge_temperature = 0.0;
};

// Validates that every requested scorer exists and its provider slot is
// filled (ConfigError before any provider call), then scores every record.
// Each output ScoreVector covers all requested scorers, as a value or as a
// missing entry with a reason from the vocabulary above.
std::vector<std::pair<std::string, ScoreVector>> score_records(
    const std::vector<ResponseRecord>& records, const ScoreOptions& options,
    const ProviderSet& providers);

}  // namespace uq::pipeline
