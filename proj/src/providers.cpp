#include "uq/providers.hpp"

namespace uq::providers {

void NliProbs::validate() const {
    for (double p : {entailment, neutral, contradiction}) {
        if (!(p >= 0.0 && p <= 1.0) || !std::isfinite(p)) {
            throw ContractViolation("NliProbs component outside [0, 1]");
        }
    }
    const double sum = entailment + neutral + contradiction;
    if (std::fabs(sum - 1.0) > kNliSumTolerance) {
        throw ContractViolation("NliProbs components sum to " + std::to_string(sum));
    }
}

void TokenEmbeddings::validate() const {
    if (tokens.empty() || tokens.size() != vectors.size()) {
        throw ContractViolation("TokenEmbeddings requires equal non-zero token/vector counts");
    }
    const std::size_t dim = vectors.front().size();
    for (const auto& v : vectors) {
        if (v.size() != dim || dim == 0) {
            throw ContractViolation("TokenEmbeddings vectors must share a non-zero dimension");
        }
        for (double x : v) {
            if (!std::isfinite(x)) throw ContractViolation("TokenEmbeddings value not finite");
        }
    }
}

std::vector<Generation> generate(const GenerationRequest& request, Generator& client,
                                 const RetryPolicy& retry) {
    if (request.num_samples < 1) {
        throw ContractViolation("generate: num_samples must be >= 1");
    }
    if (request.num_samples > 1 && !(request.temperature > 0.0)) {
        throw ContractViolation("generate: sampling multiple candidates requires temperature > 0");
    }
    auto out = with_retries([&] { return client.generate(request); }, retry);
    if (out.size() != static_cast<std::size_t>(request.num_samples)) {
        throw ProviderError("provider '" + client.id() + "' returned " +
                                std::to_string(out.size()) + " of " +
                                std::to_string(request.num_samples) + " samples",
                            /*retryable=*/true);
    }
    for (Generation& g : out) {
        if (!request.want_token_probs) g.token_probs.reset();
        g.validate();
    }
    return out;
}

NliProbs nli_probs(const std::string& premise, const std::string& hypothesis, NliModel& client,
                   const RetryPolicy& retry) {
    if (premise.empty() || hypothesis.empty()) {
        throw InputError("nli_probs: premise and hypothesis must be non-empty");
    }
    NliProbs probs = with_retries([&] { return client.classify(premise, hypothesis); }, retry);
    probs.validate();
    return probs;
}

EmbeddingVector embed_sentence(const std::string& text, SentenceEmbedder& client,
                               const RetryPolicy& retry) {
    if (text.empty()) throw InputError("embed_sentence: text must be non-empty");
    EmbeddingVector v = with_retries([&] { return client.embed(text); }, retry);
    if (v.values.empty()) throw ProviderError("embedder returned an empty vector", false);
    for (double x : v.values) {
        if (!std::isfinite(x)) throw ProviderError("embedder returned non-finite values", false);
    }
    return v;
}

TokenEmbeddings embed_tokens(const std::string& text, TokenEmbedder& client,
                             const RetryPolicy& retry) {
    if (text.empty()) throw InputError("embed_tokens: text must be non-empty");
    TokenEmbeddings e = with_retries([&] { return client.embed(text); }, retry);
    e.validate();
    for (auto& v : e.vectors) {
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) throw ProviderError("token embedder returned a zero vector", false);
        for (double& x : v) x /= norm;
    }
    return e;
}

}  // namespace uq::providers
