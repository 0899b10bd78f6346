#include "uq/blackbox.hpp"

#include <algorithm>
#include <cmath>

#include "uq/text.hpp"

namespace uq::blackbox {

using providers::EmbeddingVector;
using providers::NliModel;
using providers::SentenceEmbedder;
using providers::TokenEmbedder;
using providers::TokenEmbeddings;

std::vector<std::size_t> ClusterPartition::sizes() const {
    std::vector<std::size_t> out;
    out.reserve(clusters.size());
    for (const auto& c : clusters) out.push_back(c.size());
    return out;
}

void ClusterPartition::validate(std::size_t total) const {
    std::vector<bool> seen(total, false);
    std::size_t count = 0;
    for (const auto& cluster : clusters) {
        if (cluster.empty()) throw ContractViolation("empty cluster in partition");
        for (std::size_t idx : cluster) {
            if (idx >= total || seen[idx]) {
                throw ContractViolation("cluster indices must partition the responses");
            }
            seen[idx] = true;
            ++count;
        }
    }
    if (count != total) throw ContractViolation("clusters do not cover all responses");
}

std::optional<double> exact_match_rate(const std::string& original,
                                       const std::vector<std::string>& candidates) {
    if (candidates.empty()) return std::nullopt;
    const std::string base = text::trim(original);
    std::size_t matches = 0;
    for (const auto& c : candidates) {
        if (text::trim(c) == base) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(candidates.size());
}

std::optional<double> non_contradiction_probability(const std::string& original,
                                                    const std::vector<std::string>& candidates,
                                                    NliModel& nli) {
    if (candidates.empty()) return std::nullopt;
    double contradiction_sum = 0.0;
    try {
        for (const auto& c : candidates) {
            const double forward = providers::nli_probs(original, c, nli).contradiction;
            const double backward = providers::nli_probs(c, original, nli).contradiction;
            contradiction_sum += (forward + backward) / 2.0;
        }
    } catch (const ProviderError&) {
        return std::nullopt;
    }
    const double value = 1.0 - contradiction_sum / static_cast<double>(candidates.size());
    return std::clamp(value, 0.0, 1.0);
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

// Mean over tokens of `from` of the best dot product against tokens of `to`.
double greedy_match_mean(const TokenEmbeddings& from, const TokenEmbeddings& to) {
    double total = 0.0;
    for (const auto& v : from.vectors) {
        double best = -2.0;
        for (const auto& w : to.vectors) best = std::max(best, dot(v, w));
        total += best;
    }
    return total / static_cast<double>(from.vectors.size());
}

}  // namespace

double pairwise_bertscore_f1(const TokenEmbeddings& a, const TokenEmbeddings& b) {
    a.validate();
    b.validate();
    if (a.vectors.front().size() != b.vectors.front().size()) {
        throw InputError("token embedding dimensions differ");
    }
    const double precision = greedy_match_mean(a, b);
    const double recall = greedy_match_mean(b, a);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

std::optional<double> bert_score_confidence(const std::string& original,
                                            const std::vector<std::string>& candidates,
                                            TokenEmbedder& embedder) {
    if (candidates.empty()) return std::nullopt;
    try {
        const TokenEmbeddings base = providers::embed_tokens(original, embedder);
        double sum = 0.0;
        for (const auto& c : candidates) {
            sum += pairwise_bertscore_f1(base, providers::embed_tokens(c, embedder));
        }
        const double mean = sum / static_cast<double>(candidates.size());
        return std::clamp(mean, 0.0, 1.0);
    } catch (const ProviderError&) {
        return std::nullopt;
    }
}

namespace {

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.values.size() != b.values.size()) throw InputError("embedding dimensions differ");
    const double ab = dot(a.values, b.values);
    const double na = std::sqrt(dot(a.values, a.values));
    const double nb = std::sqrt(dot(b.values, b.values));
    if (na == 0.0 || nb == 0.0) throw InputError("zero-norm sentence embedding");
    return ab / (na * nb);
}

}  // namespace

std::optional<double> normalized_cosine_similarity(const std::string& original,
                                                   const std::vector<std::string>& candidates,
                                                   SentenceEmbedder& embedder) {
    if (candidates.empty()) return std::nullopt;
    try {
        const EmbeddingVector base = providers::embed_sentence(original, embedder);
        double sum = 0.0;
        for (const auto& c : candidates) {
            sum += cosine(base, providers::embed_sentence(c, embedder));
        }
        const double value = sum / (2.0 * static_cast<double>(candidates.size())) + 0.5;
        return std::clamp(value, 0.0, 1.0);
    } catch (const ProviderError&) {
        return std::nullopt;
    }
}

ClusterPartition cluster_by_bidirectional_entailment(const std::vector<std::string>& responses,
                                                     NliModel& nli, double entail_threshold) {
    if (responses.empty()) throw InputError("clustering requires at least one response");
    ClusterPartition partition;
    for (std::size_t i = 0; i < responses.size(); ++i) {
        bool placed = false;
        for (auto& cluster : partition.clusters) {
            const std::string& representative = responses[cluster.front()];
            const double fwd =
                providers::nli_probs(representative, responses[i], nli).entailment;
            if (fwd < entail_threshold) continue;
            const double bwd =
                providers::nli_probs(responses[i], representative, nli).entailment;
            if (bwd < entail_threshold) continue;
            cluster.push_back(i);
            placed = true;
            break;
        }
        if (!placed) partition.clusters.push_back({i});
    }
    partition.validate(responses.size());
    return partition;
}

std::optional<double> normalized_semantic_negentropy(const std::string& original,
                                                     const std::vector<std::string>& candidates,
                                                     NliModel& nli, double entail_threshold) {
    if (candidates.empty()) return std::nullopt;
    std::vector<std::string> responses;
    responses.reserve(candidates.size() + 1);
    responses.push_back(original);
    responses.insert(responses.end(), candidates.begin(), candidates.end());

    const ClusterPartition partition =
        cluster_by_bidirectional_entailment(responses, nli, entail_threshold);

    // Entropy extremes are returned exactly: the formula below reproduces them
    // only up to rounding, and the confidence contract pins the endpoints.
    const std::size_t total = responses.size();
    if (partition.clusters.size() == 1) return 1.0;
    if (partition.clusters.size() == total) return 0.0;

    double entropy = 0.0;
    for (const auto& cluster : partition.clusters) {
        const double p = static_cast<double>(cluster.size()) / static_cast<double>(total);
        entropy -= p * std::log(p);
    }
    const double value = 1.0 - entropy / std::log(static_cast<double>(total));
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace uq::blackbox
