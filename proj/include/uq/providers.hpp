#pragma once

// Uniform interfaces to external model services: text generation, NLI
// classification, sentence embedding, and token embedding. The judge scorer
// reuses the Generator interface. Deterministic mocks (providers_mock.hpp)
// and remote HTTP adapters (providers_remote.hpp) implement these.
//
// The free functions below are the module entry points: they validate
// preconditions, run the provider call through the retry policy, and enforce
// postconditions (count, simplex, normalization) uniformly for every backend.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "uq/core.hpp"
#include "uq/errors.hpp"

namespace uq::providers {

// ============================================================================
// Value types
// ============================================================================

// Probability triple from an NLI classifier for an ordered (premise,
// hypothesis) pair. NLI is asymmetric: swapping the pair may change the triple.
struct NliProbs {
    double entailment = 0.0;
    double neutral = 0.0;
    double contradiction = 0.0;

    void validate() const;  // each in [0, 1], sum within 1e-6 of 1
};

inline constexpr double kNliSumTolerance = 1e-6;

struct EmbeddingVector {
    std::vector<double> values;
};

// Per-token contextual embeddings for one text. Adapters unit-normalize every
// vector so downstream dot products are cosine similarities in [-1, 1].
struct TokenEmbeddings {
    std::vector<std::string> tokens;
    std::vector<std::vector<double>> vectors;

    void validate() const;  // same non-zero length, consistent dimension
};

struct GenerationRequest {
    std::string prompt;
    double temperature = 1.0;
    int num_samples = 1;
    bool want_token_probs = false;
    std::uint64_t seed = 0;  // honored by mocks; remote providers may ignore it
};

// ============================================================================
// Interfaces
// ============================================================================

class Generator {
public:
    virtual ~Generator() = default;
    virtual std::string id() const = 0;
    virtual std::vector<Generation> generate(const GenerationRequest& request) = 0;
    virtual bool supports_token_probs() const { return true; }
};

class NliModel {
public:
    virtual ~NliModel() = default;
    virtual std::string id() const = 0;
    virtual NliProbs classify(const std::string& premise, const std::string& hypothesis) = 0;
};

class SentenceEmbedder {
public:
    virtual ~SentenceEmbedder() = default;
    virtual std::string id() const = 0;
    virtual EmbeddingVector embed(const std::string& text) = 0;
};

class TokenEmbedder {
public:
    virtual ~TokenEmbedder() = default;
    virtual std::string id() const = 0;
    virtual TokenEmbeddings embed(const std::string& text) = 0;
};

// ============================================================================
// Retry policy
// ============================================================================

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{50};  // doubles after each failure
};

// Runs fn, retrying on retryable ProviderError up to policy.max_attempts total
// attempts with exponential backoff. Non-retryable errors and exhaustion
// propagate. A successful payload is returned untouched.
template <class F>
auto with_retries(F&& fn, const RetryPolicy& policy = {}) -> decltype(fn()) {
    int attempt = 0;
    std::chrono::milliseconds delay = policy.base_delay;
    for (;;) {
        try {
            return fn();
        } catch (const ProviderError& e) {
            ++attempt;
            if (!e.retryable || attempt >= policy.max_attempts) throw;
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
    }
}

// ============================================================================
// Operations (validated entry points)
// ============================================================================

// Returns exactly request.num_samples generations. Token probabilities are
// present iff requested and the provider supports them; an unsupported
// request degrades to generations without token_probs rather than erroring.
std::vector<Generation> generate(const GenerationRequest& request, Generator& client,
                                 const RetryPolicy& retry = {});

NliProbs nli_probs(const std::string& premise, const std::string& hypothesis, NliModel& client,
                   const RetryPolicy& retry = {});

EmbeddingVector embed_sentence(const std::string& text, SentenceEmbedder& client,
                               const RetryPolicy& retry = {});

// Token embeddings are unit-normalized here, on the adapter side of the
// scorer boundary, so every backend satisfies the same dot-product contract.
TokenEmbeddings embed_tokens(const std::string& text, TokenEmbedder& client,
                             const RetryPolicy& retry = {});

}  // namespace uq::providers
