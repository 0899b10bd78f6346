#include "uq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "uq/pipeline.hpp"
#include "uq/random.hpp"

namespace uq::metrics {

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw ContractViolation("auroc requires matching non-empty scores and labels");
    }
    std::size_t positives = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw ContractViolation("auroc labels must be binary");
        positives += static_cast<std::size_t>(l);
    }
    const std::size_t negatives = scores.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw DegenerateObjective("auroc requires both classes");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Mid-rank assignment over tie groups; rank sums stay half-integral, so
    // the result matches pairwise concordance counting bit for bit.
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid_rank = static_cast<double>(i + j) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            if (labels[order[t]] == 1) positive_rank_sum += mid_rank;
        }
        i = j + 1;
    }
    const double p = static_cast<double>(positives);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) /
           (p * static_cast<double>(negatives));
}

Prf precision_recall_f1(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw ContractViolation("precision_recall_f1 requires equal-length inputs");
    }
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int p = predictions[i];
        const int l = labels[i];
        if ((p != 0 && p != 1) || (l != 0 && l != 1)) {
            throw ContractViolation("precision_recall_f1 inputs must be binary");
        }
        if (p == 1 && l == 1) ++tp;
        if (p == 1 && l == 0) ++fp;
        if (p == 0 && l == 1) ++fn;
    }
    Prf out;
    if (tp + fp == 0) {
        out.degenerate = true;
    } else {
        out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn == 0) {
        out.degenerate = true;
    } else {
        out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    if (2 * tp + fp + fn == 0) {
        out.degenerate = true;
    } else {
        out.f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    }
    return out;
}

std::vector<double> default_filter_grid() {
    std::vector<double> grid(10);
    for (int i = 0; i < 10; ++i) grid[i] = static_cast<double>(i) / 10.0;
    return grid;
}

std::vector<FilteredAccuracyPoint> filtered_accuracy_at_tau(const std::vector<double>& scores,
                                                            const std::vector<int>& labels_correct,
                                                            const std::vector<double>& tau_grid) {
    if (scores.size() != labels_correct.size()) {
        throw ContractViolation("filtered accuracy requires equal-length inputs");
    }
    std::vector<FilteredAccuracyPoint> out;
    out.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        FilteredAccuracyPoint point;
        point.tau = tau;
        std::size_t retained = 0;
        std::size_t correct = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            // tau = 0 keeps the full sample; positive thresholds are strict.
            const bool keep = tau == 0.0 ? scores[i] >= 0.0 : scores[i] > tau;
            if (!keep) continue;
            ++retained;
            correct += static_cast<std::size_t>(labels_correct[i]);
        }
        point.n_retained = retained;
        if (retained > 0) {
            point.accuracy = static_cast<double>(correct) / static_cast<double>(retained);
        }
        out.push_back(point);
    }
    return out;
}

// ============================================================================
// Cross-validation
// ============================================================================

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int k,
                                                       std::uint64_t seed) {
    if (k < 2) throw ContractViolation("k-fold requires k >= 2");
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == 1 ? pos : neg).push_back(i);
    }
    if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k)) {
        throw SplitError("stratified " + std::to_string(k) + "-fold split impossible: class counts " +
                         std::to_string(pos.size()) + "/" + std::to_string(neg.size()));
    }
    rnd::Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < pos.size(); ++i) folds[i % k].push_back(pos[i]);
    for (std::size_t i = 0; i < neg.size(); ++i) folds[i % k].push_back(neg[i]);
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

namespace {

ensemble::TuningDataset subset(const ensemble::TuningDataset& data,
                               const std::vector<std::size_t>& indices) {
    ensemble::TuningDataset out;
    out.scorer_names = data.scorer_names;
    out.rows.reserve(indices.size());
    for (std::size_t i : indices) out.rows.push_back(data.rows[i]);
    return out;
}

// Ensemble scores and labels for the rows, skipping rows with no available
// component (mirrors tuning-time row handling).
void scored_rows(const ensemble::TuningDataset& data, const std::vector<std::size_t>& indices,
                 const std::map<std::string, double>& weights, std::vector<double>& scores,
                 std::vector<int>& labels) {
    scores.clear();
    labels.clear();
    for (std::size_t i : indices) {
        const auto& [vector, label] = data.rows[i];
        if (auto s = ensemble::ensemble_score(vector, weights)) {
            scores.push_back(*s);
            labels.push_back(label.is_correct);
        }
    }
}

std::map<std::string, double> vertex_weights(const std::vector<std::string>& names,
                                             const std::string& scorer) {
    if (std::find(names.begin(), names.end(), scorer) == names.end()) {
        throw ConfigError("scorer '" + scorer + "' is not part of the dataset");
    }
    std::map<std::string, double> w;
    for (const auto& name : names) w[name] = name == scorer ? 1.0 : 0.0;
    return w;
}

}  // namespace

EvalReport kfold_cv_evaluate(const ensemble::TuningDataset& data, const CvOptions& options) {
    data.validate();
    std::vector<int> labels;
    labels.reserve(data.rows.size());
    for (const auto& row : data.rows) labels.push_back(row.second.is_correct);
    const auto folds = stratified_folds(labels, options.k, options.seed);

    std::vector<std::size_t> all_indices(data.rows.size());
    std::iota(all_indices.begin(), all_indices.end(), 0);

    EvalReport report;
    std::vector<double> pooled_scores;
    std::vector<int> pooled_labels;

    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> train_indices;
        for (std::size_t g = 0; g < folds.size(); ++g) {
            if (g == f) continue;
            train_indices.insert(train_indices.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(train_indices.begin(), train_indices.end());
        const std::uint64_t fold_seed = options.seed + f;

        EnsembleConfig config;
        if (options.mode == EvalMode::fixed_config) {
            config = options.fixed_config;
            config.validate();
        } else if (options.mode == EvalMode::single_scorer) {
            config.weights = vertex_weights(data.scorer_names, options.scorer);
            std::vector<double> train_scores;
            std::vector<int> train_labels;
            scored_rows(data, train_indices, config.weights, train_scores, train_labels);
            config.threshold = ensemble::tune_threshold(train_scores, train_labels);
        } else {
            const ensemble::TuningDataset train = subset(data, train_indices);
            const ensemble::TuneResult tuned =
                options.objective == ensemble::Objective::auroc
                    ? ensemble::tune_sequential(train, options.trials, fold_seed, options.refine)
                    : ensemble::tune_joint(train, options.trials, fold_seed, options.refine);
            config = tuned.config;
        }

        std::vector<double> test_scores;
        std::vector<int> test_labels;
        scored_rows(data, folds[f], config.weights, test_scores, test_labels);

        FoldMetrics fold;
        fold.auroc = auroc(test_scores, test_labels);
        std::vector<int> predictions(test_scores.size());
        for (std::size_t i = 0; i < test_scores.size(); ++i) {
            predictions[i] = test_scores[i] >= config.threshold ? 1 : 0;
        }
        const Prf prf = precision_recall_f1(predictions, test_labels);
        fold.precision = prf.precision;
        fold.recall = prf.recall;
        fold.f1 = prf.f1;
        fold.threshold = config.threshold;
        report.per_fold.push_back(fold);

        pooled_scores.insert(pooled_scores.end(), test_scores.begin(), test_scores.end());
        pooled_labels.insert(pooled_labels.end(), test_labels.begin(), test_labels.end());
    }

    for (const FoldMetrics& fold : report.per_fold) {
        report.aggregate.auroc += fold.auroc;
        report.aggregate.precision += fold.precision;
        report.aggregate.recall += fold.recall;
        report.aggregate.f1 += fold.f1;
        report.aggregate.threshold += fold.threshold;
    }
    const double k = static_cast<double>(report.per_fold.size());
    report.aggregate.auroc /= k;
    report.aggregate.precision /= k;
    report.aggregate.recall /= k;
    report.aggregate.f1 /= k;
    report.aggregate.threshold /= k;

    report.filtered_accuracy =
        filtered_accuracy_at_tau(pooled_scores, pooled_labels, default_filter_grid());

    if (options.mode == EvalMode::single_scorer) {
        report.scorer_name = options.scorer;
    } else if (options.mode == EvalMode::fixed_config) {
        report.config_snapshot = options.fixed_config;
    } else {
        // Snapshot the deployable config: tuned once on the full dataset.
        const ensemble::TuneResult full =
            options.objective == ensemble::Objective::auroc
                ? ensemble::tune_sequential(data, options.trials, options.seed, options.refine)
                : ensemble::tune_joint(data, options.trials, options.seed, options.refine);
        report.config_snapshot = full.config;
    }
    return report;
}

// ============================================================================
// Candidate-count sweep
// ============================================================================

std::vector<SweepRow> candidate_count_sweep(const std::vector<ResponseRecord>& records,
                                            const std::vector<int>& m_values,
                                            const std::vector<std::string>& scorers,
                                            const std::vector<CorrectnessLabel>& labels,
                                            providers::NliModel* nli,
                                            providers::TokenEmbedder* token_embedder,
                                            providers::SentenceEmbedder* sentence_embedder,
                                            double entail_threshold, int parallel) {
    if (records.empty() || records.size() != labels.size()) {
        throw InputError("sweep requires records with matching labels");
    }
    if (m_values.empty()) throw InputError("sweep requires at least one m value");
    int max_m = 0;
    for (int m : m_values) {
        if (m < 1) throw InputError("sweep m values must be >= 1");
        max_m = std::max(max_m, m);
    }
    for (const auto& record : records) {
        if (record.candidates.size() < static_cast<std::size_t>(max_m)) {
            throw InputError("record '" + record.prompt.id + "' has " +
                             std::to_string(record.candidates.size()) + " candidates, sweep needs " +
                             std::to_string(max_m));
        }
    }
    static const std::set<std::string> kBlackbox = {"emr", "ncp", "bsc", "ncs", "nsn"};
    for (const auto& scorer : scorers) {
        if (!kBlackbox.count(scorer)) {
            throw ConfigError("sweep supports black-box scorers only, got '" + scorer + "'");
        }
        if ((scorer == "ncp" || scorer == "nsn") && nli == nullptr) {
            throw ConfigError("scorer '" + scorer + "' requires an NLI provider");
        }
        if (scorer == "bsc" && token_embedder == nullptr) {
            throw ConfigError("scorer 'bsc' requires a token embedder");
        }
        if (scorer == "ncs" && sentence_embedder == nullptr) {
            throw ConfigError("scorer 'ncs' requires a sentence embedder");
        }
    }

    // scores[record][m index][scorer index]
    const auto compute_record = [&](const ResponseRecord& record) {
        std::vector<std::vector<double>> per_m;
        per_m.reserve(m_values.size());
        for (int m : m_values) {
            std::vector<std::string> texts;
            texts.reserve(static_cast<std::size_t>(m));
            for (int j = 0; j < m; ++j) texts.push_back(record.candidates[j].text);
            std::vector<double> row;
            row.reserve(scorers.size());
            for (const auto& scorer : scorers) {
                std::optional<double> value;
                if (scorer == "emr") {
                    value = blackbox::exact_match_rate(record.original.text, texts);
                } else if (scorer == "ncp") {
                    value = blackbox::non_contradiction_probability(record.original.text, texts, *nli);
                } else if (scorer == "bsc") {
                    value = blackbox::bert_score_confidence(record.original.text, texts, *token_embedder);
                } else if (scorer == "ncs") {
                    value = blackbox::normalized_cosine_similarity(record.original.text, texts,
                                                                   *sentence_embedder);
                } else {
                    value = blackbox::normalized_semantic_negentropy(record.original.text, texts, *nli,
                                                                     entail_threshold);
                }
                if (!value) throw DataError("sweep scorer '" + scorer + "' returned no value");
                row.push_back(*value);
            }
            per_m.push_back(std::move(row));
        }
        return per_m;
    };

    const auto all = pipeline::parallel_map(records, compute_record, parallel);

    std::vector<int> label_values;
    label_values.reserve(labels.size());
    for (const auto& label : labels) label_values.push_back(label.is_correct);

    std::vector<SweepRow> rows;
    rows.reserve(scorers.size() * m_values.size());
    for (std::size_t s = 0; s < scorers.size(); ++s) {
        for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
            std::vector<double> scores;
            scores.reserve(records.size());
            for (std::size_t r = 0; r < records.size(); ++r) scores.push_back(all[r][mi][s]);
            rows.push_back({scorers[s], m_values[mi], auroc(scores, label_values)});
        }
    }
    return rows;
}

}  // namespace uq::metrics
