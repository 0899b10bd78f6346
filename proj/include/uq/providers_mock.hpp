#pragma once

// Deterministic in-process providers used by tests and by any offline run.
// Every mock is a pure function of (inputs, constructor config, seed), so
// fixed seeds give byte-identical behavior across runs. Fault hooks are
// explicit constructor options rather than hidden randomness.

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "uq/providers.hpp"

namespace uq::providers {

// Stable 64-bit hash of a string (SHA-256 prefix); the seed for every
// derived pseudo-random quantity in the mocks.
std::uint64_t stable_hash(const std::string& s);

// ============================================================================
// Generation
// ============================================================================

// Deterministic text generator. With an empty vocabulary it emits synthetic
// tag strings unique to (prompt, seed, temperature, index); with a vocabulary
// it picks entries pseudo-randomly, which yields the repeated/varied answer
// patterns consistency scorers need. Temperature 0 pins the pick to index 0.
// Prompts containing "[[fail]]" always raise a retryable provider error
// (deterministic fault hook for partial-failure tests); fail_first makes the
// first N generate() calls fail regardless of prompt.
class MockGenerator : public Generator {
public:
    explicit MockGenerator(std::uint64_t seed, std::vector<std::string> vocabulary = {},
                           int fail_first = 0)
        : seed_(seed), vocabulary_(std::move(vocabulary)), fail_remaining_(fail_first) {}

    std::string id() const override { return "mock-gen"; }
    std::vector<Generation> generate(const GenerationRequest& request) override;

private:
    std::string sample_text(const GenerationRequest& request, int index) const;
    std::vector<double> token_probs_for(const std::string& text) const;

    std::uint64_t seed_;
    std::vector<std::string> vocabulary_;
    std::atomic<int> fail_remaining_;
};

// Replays a fixed list of replies, one per generate() call (the last reply
// repeats once the script is exhausted). num_samples copies of the current
// reply are returned. fail_first makes the first N calls raise a retryable
// provider error before consuming any reply.
class ScriptedGenerator : public Generator {
public:
    explicit ScriptedGenerator(std::vector<std::string> replies, int fail_first = 0)
        : replies_(std::move(replies)), fail_remaining_(fail_first) {}

    std::string id() const override { return "scripted-gen"; }
    bool supports_token_probs() const override { return false; }
    std::vector<Generation> generate(const GenerationRequest& request) override;

    int calls() const { return calls_.load(); }

private:
    std::vector<std::string> replies_;
    std::atomic<int> fail_remaining_;
    std::atomic<int> calls_{0};
};

// ============================================================================
// NLI
// ============================================================================

// Rule-based NLI probabilities:
//   - identical strings after trimming -> (1, 0, 0)
//   - disjoint token sets              -> (0.05, 0.05, 0.90)
//   - otherwise, with j = Jaccard overlap of token sets:
//       entailment = 0.2 + 0.6 j, contradiction = 0.6 (1 - j), neutral = 0.2
// Exact (premise, hypothesis) overrides take precedence and may be asymmetric.
class MockNliModel : public NliModel {
public:
    MockNliModel() = default;

    std::string id() const override { return "mock-nli"; }
    NliProbs classify(const std::string& premise, const std::string& hypothesis) override;

    void set_override(const std::string& premise, const std::string& hypothesis, NliProbs probs);

private:
    std::map<std::pair<std::string, std::string>, NliProbs> overrides_;
};

// Always fails with a retryable provider error; exercises retry exhaustion.
class FailingNli : public NliModel {
public:
    std::string id() const override { return "failing-nli"; }
    NliProbs classify(const std::string&, const std::string&) override {
        throw ProviderError("nli backend unavailable", /*retryable=*/true);
    }
};

// ============================================================================
// Embeddings
// ============================================================================

// Hash-based sentence embedder: a deterministic vector in [-1, 1]^dim per
// text. Identical texts map to identical vectors. Per-text overrides support
// constructed geometry (orthogonal, antipodal, zero-norm).
class MockSentenceEmbedder : public SentenceEmbedder {
public:
    explicit MockSentenceEmbedder(std::size_t dim = 8, std::uint64_t seed = 0)
        : dim_(dim), seed_(seed) {}

    std::string id() const override { return "mock-sent"; }
    EmbeddingVector embed(const std::string& text) override;

    void set_override(const std::string& text, std::vector<double> vector);

private:
    std::size_t dim_;
    std::uint64_t seed_;
    std::map<std::string, std::vector<double>> overrides_;
};

// Hash-based token embedder over whitespace tokens: each distinct token maps
// to a deterministic vector, so shared words dot to 1 after the adapter
// normalization. Per-token overrides support hand-built similarity tables.
class MockTokenEmbedder : public TokenEmbedder {
public:
    explicit MockTokenEmbedder(std::size_t dim = 8, std::uint64_t seed = 0)
        : dim_(dim), seed_(seed) {}

    std::string id() const override { return "mock-tok"; }
    TokenEmbeddings embed(const std::string& text) override;

    void set_override(const std::string& token, std::vector<double> vector);

private:
    std::size_t dim_;
    std::uint64_t seed_;
    std::map<std::string, std::vector<double>> overrides_;
};

}  // namespace uq::providers
