#pragma once

// Consistency-based confidence scorers comparing an original response with
// sampled candidate responses. Stable scorer names: "emr", "ncp", "bsc",
// "ncs", "nsn". All scorers return MISSING (empty optional) when there are no
// candidates, since a consistency score over zero comparisons is undefined.
//
// Provider failures: the mean-over-candidates scorers (ncp, bsc, ncs) swallow
// a provider error that survived retries and report MISSING, so one scorer's
// backend outage never blocks the others. Entailment clustering instead
// propagates the error, because a partially clustered partition is not a
// meaningful intermediate result.

#include <optional>
#include <string>
#include <vector>

#include "uq/providers.hpp"

namespace uq::blackbox {

// Disjoint index sets covering all m+1 responses (original at index 0).
struct ClusterPartition {
    std::vector<std::vector<std::size_t>> clusters;

    std::vector<std::size_t> sizes() const;
    void validate(std::size_t total) const;  // exhaustive, disjoint partition
};

inline constexpr double kDefaultEntailThreshold = 0.5;

// Fraction of candidates exactly equal to the original after trimming
// surrounding whitespace. No case folding: exactness belongs here, tolerant
// matching belongs to graders.
std::optional<double> exact_match_rate(const std::string& original,
                                       const std::vector<std::string>& candidates);

// 1 - mean over candidates of the bidirectional contradiction probability
// (forward and backward NLI averaged per pair).
std::optional<double> non_contradiction_probability(const std::string& original,
                                                    const std::vector<std::string>& candidates,
                                                    providers::NliModel& nli);

// Greedy-matching similarity between two token embedding sequences:
// precision averages each token of a against its best match in b, recall
// averages each token of b against its best match in a, combined by harmonic
// mean. Requires unit-normalized vectors; result lies in [-1, 1] and is 0
// when precision + recall is 0.
double pairwise_bertscore_f1(const providers::TokenEmbeddings& a,
                             const providers::TokenEmbeddings& b);

// Mean pairwise greedy-matching F1 between the original and each candidate,
// clamped to [0, 1] to honor the confidence contract (negative cosine mass
// can otherwise pull the mean below zero).
std::optional<double> bert_score_confidence(const std::string& original,
                                            const std::vector<std::string>& candidates,
                                            providers::TokenEmbedder& embedder);

// Mean cosine similarity between sentence embeddings of the original and each
// candidate, mapped from [-1, 1] to [0, 1] by halving and shifting.
std::optional<double> normalized_cosine_similarity(const std::string& original,
                                                   const std::vector<std::string>& candidates,
                                                   providers::SentenceEmbedder& embedder);

// Greedy single-pass clustering in input order: each response joins the first
// cluster whose representative (first member) entails it and is entailed by
// it with P(entailment) >= entail_threshold in both directions, else it
// founds a new cluster.
ClusterPartition cluster_by_bidirectional_entailment(const std::vector<std::string>& responses,
                                                     providers::NliModel& nli,
                                                     double entail_threshold = kDefaultEntailThreshold);

// Discrete semantic entropy over entailment clusters of the m+1 responses
// (original first), normalized to a [0, 1] confidence: 1 - SE / log(m+1).
// Cluster probabilities are size counts over m+1; one cluster scores exactly
// 1.0, all singletons exactly 0.0.
std::optional<double> normalized_semantic_negentropy(const std::string& original,
                                                     const std::vector<std::string>& candidates,
                                                     providers::NliModel& nli,
                                                     double entail_threshold = kDefaultEntailThreshold);

}  // namespace uq::blackbox
