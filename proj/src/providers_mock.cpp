#include "uq/providers_mock.hpp"

#include <algorithm>
#include <set>

#include "uq/text.hpp"

namespace uq::providers {

std::uint64_t stable_hash(const std::string& s) {
    const std::string hex = text::sha256_hex(s);
    std::uint64_t h = 0;
    for (int i = 0; i < 16; ++i) {
        h = (h << 4) | static_cast<std::uint64_t>(
                           hex[i] <= '9' ? hex[i] - '0' : hex[i] - 'a' + 10);
    }
    return h;
}

namespace {

// Maps a hash to [0, 1) with 53 bits of the mixed value.
double unit_fraction(std::uint64_t h) {
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::set<std::string> token_set(const std::string& s) {
    auto tokens = text::split_ws(s);
    return {tokens.begin(), tokens.end()};
}

}  // namespace

// ============================================================================
// MockGenerator
// ============================================================================

std::vector<Generation> MockGenerator::generate(const GenerationRequest& request) {
    if (fail_remaining_.fetch_sub(1) > 0) {
        throw ProviderError("mock generator transient fault", /*retryable=*/true);
    }
    fail_remaining_.store(0);
    if (text::contains(request.prompt, "[[fail]]")) {
        throw ProviderError("mock generator poisoned prompt", /*retryable=*/true);
    }
    std::vector<Generation> out;
    out.reserve(static_cast<std::size_t>(request.num_samples));
    for (int i = 0; i < request.num_samples; ++i) {
        Generation g;
        g.text = sample_text(request, request.temperature == 0.0 ? 0 : i);
        if (request.want_token_probs) g.token_probs = token_probs_for(g.text);
        out.push_back(std::move(g));
    }
    return out;
}

std::string MockGenerator::sample_text(const GenerationRequest& request, int index) const {
    const std::string key = request.prompt + "|s" + std::to_string(seed_ + request.seed) + "|t" +
                            std::to_string(request.temperature) + "|i" + std::to_string(index);
    if (vocabulary_.empty()) {
        return "mock:" + text::sha256_hex(key).substr(0, 12);
    }
    const std::size_t pick = static_cast<std::size_t>(stable_hash(key) % vocabulary_.size());
    return vocabulary_[pick];
}

std::vector<double> MockGenerator::token_probs_for(const std::string& genText) const {
    auto tokens = text::split_ws(genText);
    if (tokens.empty()) tokens.push_back(genText);
    std::vector<double> probs;
    probs.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::uint64_t h =
            stable_hash(tokens[i] + "#" + std::to_string(i) + "#" + std::to_string(seed_));
        // Probabilities in [0.5, 1): nonzero, so log-space scorers stay finite.
        probs.push_back(0.5 + 0.5 * unit_fraction(h));
    }
    return probs;
}

// ============================================================================
// ScriptedGenerator
// ============================================================================

std::vector<Generation> ScriptedGenerator::generate(const GenerationRequest& request) {
    if (fail_remaining_.fetch_sub(1) > 0) {
        throw ProviderError("scripted generator transient fault", /*retryable=*/true);
    }
    fail_remaining_.store(0);
    const int call = calls_.fetch_add(1);
    if (replies_.empty()) {
        throw ProviderError("scripted generator has no replies", /*retryable=*/false);
    }
    const std::size_t idx = std::min(static_cast<std::size_t>(call), replies_.size() - 1);
    std::vector<Generation> out(static_cast<std::size_t>(request.num_samples));
    for (Generation& g : out) g.text = replies_[idx];
    return out;
}

// ============================================================================
// MockNliModel
// ============================================================================

NliProbs MockNliModel::classify(const std::string& premise, const std::string& hypothesis) {
    auto it = overrides_.find({premise, hypothesis});
    if (it != overrides_.end()) return it->second;

    if (text::trim(premise) == text::trim(hypothesis)) return {1.0, 0.0, 0.0};

    const auto a = token_set(premise);
    const auto b = token_set(hypothesis);
    std::size_t inter = 0;
    for (const auto& t : a) inter += b.count(t);
    const std::size_t uni = a.size() + b.size() - inter;
    if (inter == 0 || uni == 0) return {0.05, 0.05, 0.90};

    const double j = static_cast<double>(inter) / static_cast<double>(uni);
    const double entailment = 0.2 + 0.6 * j;
    const double contradiction = 0.6 * (1.0 - j);
    return {entailment, 1.0 - entailment - contradiction, contradiction};
}

void MockNliModel::set_override(const std::string& premise, const std::string& hypothesis,
                                NliProbs probs) {
    probs.validate();
    overrides_[{premise, hypothesis}] = probs;
}

// ============================================================================
// MockSentenceEmbedder
// ============================================================================

EmbeddingVector MockSentenceEmbedder::embed(const std::string& input) {
    auto it = overrides_.find(input);
    if (it != overrides_.end()) return {it->second};
    std::vector<double> v(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        const std::uint64_t h =
            stable_hash(input + "@" + std::to_string(i) + "@" + std::to_string(seed_));
        v[i] = 2.0 * unit_fraction(h) - 1.0;
    }
    return {v};
}

void MockSentenceEmbedder::set_override(const std::string& input, std::vector<double> vector) {
    overrides_[input] = std::move(vector);
}

// ============================================================================
// MockTokenEmbedder
// ============================================================================

TokenEmbeddings MockTokenEmbedder::embed(const std::string& input) {
    auto tokens = text::split_ws(input);
    if (tokens.empty()) tokens.push_back(input);
    TokenEmbeddings out;
    out.tokens = tokens;
    out.vectors.reserve(tokens.size());
    for (const auto& tok : tokens) {
        auto it = overrides_.find(tok);
        if (it != overrides_.end()) {
            out.vectors.push_back(it->second);
            continue;
        }
        std::vector<double> v(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            const std::uint64_t h =
                stable_hash(tok + "$" + std::to_string(i) + "$" + std::to_string(seed_));
            v[i] = 2.0 * unit_fraction(h) - 1.0;
        }
        out.vectors.push_back(std::move(v));
    }
    return out;
}

void MockTokenEmbedder::set_override(const std::string& token, std::vector<double> vector) {
    overrides_[token] = std::move(vector);
}

}  // namespace uq::providers
