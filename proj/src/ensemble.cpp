#include "uq/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "uq/metrics.hpp"
#include "uq/random.hpp"

namespace uq::ensemble {

namespace {
// Weights at or below this count as zero when the refinement pass compares
// sparsity and when a dropped component is renormalized away.
constexpr double kWeightEpsilon = 1e-12;
}  // namespace

std::string to_string(Objective objective) {
    return objective == Objective::auroc ? "auroc" : "f1";
}

Objective objective_from_string(const std::string& s) {
    if (s == "auroc") return Objective::auroc;
    if (s == "f1") return Objective::f1;
    throw ConfigError("unknown objective: " + s);
}

void TuningDataset::validate() const {
    if (scorer_names.empty()) throw ContractViolation("TuningDataset has no scorer names");
    for (const auto& [scores, label] : rows) {
        label.validate();
        for (const auto& name : scorer_names) {
            if (!scores.knows(name)) {
                throw ContractViolation("tuning row lacks scorer '" + name + "'");
            }
        }
    }
}

std::optional<double> ensemble_score(const ScoreVector& scores,
                                     const std::map<std::string, double>& weights) {
    validate_simplex(weights);
    double weighted_sum = 0.0;
    double available_weight = 0.0;
    double plain_sum = 0.0;
    std::size_t present = 0;
    for (const auto& [name, w] : weights) {
        if (!scores.knows(name)) {
            throw ConfigError("weights reference unknown scorer '" + name + "'");
        }
        const auto value = scores.get(name);
        if (!value) continue;
        weighted_sum += w * *value;
        available_weight += w;
        plain_sum += *value;
        ++present;
    }
    if (present == 0) return std::nullopt;
    const double value = available_weight > 0.0
                             ? weighted_sum / available_weight
                             : plain_sum / static_cast<double>(present);
    return std::clamp(value, 0.0, 1.0);
}

// ============================================================================
// Tuning internals
// ============================================================================

namespace {

// Dense view of a TuningDataset for fast per-trial evaluation. Semantics must
// match ensemble_score exactly; a unit test pins the equivalence.
struct Compiled {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<double> value;   // n * k, row-major
    std::vector<char> present;   // n * k
    std::vector<int> labels;     // is_correct
};

Compiled compile(const TuningDataset& data) {
    data.validate();
    Compiled c;
    c.n = data.rows.size();
    c.k = data.scorer_names.size();
    c.value.assign(c.n * c.k, 0.0);
    c.present.assign(c.n * c.k, 0);
    c.labels.reserve(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
        const auto& [scores, label] = data.rows[i];
        c.labels.push_back(label.is_correct);
        for (std::size_t j = 0; j < c.k; ++j) {
            if (auto v = scores.get(data.scorer_names[j])) {
                c.value[i * c.k + j] = *v;
                c.present[i * c.k + j] = 1;
            }
        }
    }
    return c;
}

void require_both_classes(const std::vector<int>& labels) {
    bool pos = false;
    bool neg = false;
    for (int l : labels) (l == 1 ? pos : neg) = true;
    if (!pos || !neg) {
        throw DegenerateObjective("tuning requires both label classes to be present");
    }
}

// Ensemble scores for one weight vector; rows with no available component are
// skipped and their labels dropped alongside.
void ensemble_rows(const Compiled& c, const std::vector<double>& w, std::vector<double>& scores,
                   std::vector<int>& labels) {
    scores.clear();
    labels.clear();
    scores.reserve(c.n);
    labels.reserve(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
        double weighted_sum = 0.0;
        double available = 0.0;
        double plain_sum = 0.0;
        std::size_t present = 0;
        const std::size_t base = i * c.k;
        for (std::size_t j = 0; j < c.k; ++j) {
            if (!c.present[base + j]) continue;
            weighted_sum += w[j] * c.value[base + j];
            available += w[j];
            plain_sum += c.value[base + j];
            ++present;
        }
        if (present == 0) continue;
        const double s = available > 0.0 ? weighted_sum / available
                                         : plain_sum / static_cast<double>(present);
        scores.push_back(std::clamp(s, 0.0, 1.0));
        labels.push_back(c.labels[i]);
    }
}

double f1_at_threshold(const std::vector<double>& scores, const std::vector<int>& labels,
                       double tau) {
    std::vector<int> predictions(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) predictions[i] = scores[i] >= tau ? 1 : 0;
    return metrics::precision_recall_f1(predictions, labels).f1;
}

// Best grid threshold and its F1 for fixed scores; lowest tau wins ties.
std::pair<double, double> best_grid_threshold(const std::vector<double>& scores,
                                              const std::vector<int>& labels) {
    double best_tau = 0.01;
    double best_f1 = -1.0;
    for (int i = 1; i <= kThresholdGridSize; ++i) {
        const double tau = static_cast<double>(i) / 100.0;
        const double f1 = f1_at_threshold(scores, labels, tau);
        if (f1 > best_f1) {
            best_f1 = f1;
            best_tau = tau;
        }
    }
    return {best_tau, best_f1};
}

std::size_t nonzero_count(const std::vector<double>& w) {
    std::size_t count = 0;
    for (double x : w) count += x > kWeightEpsilon ? 1 : 0;
    return count;
}

void normalize(std::vector<double>& w) {
    double sum = 0.0;
    for (double x : w) sum += x;
    for (double& x : w) x /= sum;
}

// Local coordinate refinement. Candidates from the incumbent, swept in scorer
// order: drop component k (renormalize the rest), then move toward vertex k
// by fractions 1, 1/2, 1/4. Acceptance: strictly better objective, or equal
// objective with strictly fewer nonzero weights. Sweeps repeat until one
// makes no change (bounded). Deterministic.
template <class Eval>
void refine_weights(std::vector<double>& w, double& best_value, const Eval& evaluate) {
    const std::size_t k = w.size();
    if (k < 2) return;
    constexpr int kMaxSweeps = 8;
    constexpr double kSteps[] = {1.0, 0.5, 0.25};
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool changed = false;
        for (std::size_t target = 0; target < k; ++target) {
            std::vector<std::vector<double>> candidates;
            if (w[target] > kWeightEpsilon && w[target] < 1.0 - kWeightEpsilon) {
                std::vector<double> dropped = w;
                dropped[target] = 0.0;
                normalize(dropped);
                candidates.push_back(std::move(dropped));
            }
            for (double step : kSteps) {
                std::vector<double> moved(k);
                for (std::size_t j = 0; j < k; ++j) moved[j] = (1.0 - step) * w[j];
                moved[target] += step;
                normalize(moved);
                candidates.push_back(std::move(moved));
            }
            for (auto& candidate : candidates) {
                const double value = evaluate(candidate);
                const bool better = value > best_value;
                const bool sparser_tie =
                    value == best_value && nonzero_count(candidate) < nonzero_count(w);
                if (better || sparser_tie) {
                    w = candidate;
                    best_value = value;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
}

std::map<std::string, double> to_weight_map(const std::vector<std::string>& names,
                                            const std::vector<double>& w) {
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = w[i];
    return out;
}

}  // namespace

// ============================================================================
// Tuning entry points
// ============================================================================

TuneResult tune_weights_threshold_agnostic(const TuningDataset& data, int trials,
                                           std::uint64_t seed, bool refine) {
    if (trials < 1) throw ContractViolation("tuning requires at least one trial");
    const Compiled c = compile(data);
    require_both_classes(c.labels);

    std::vector<double> scores;
    std::vector<int> labels;
    const auto evaluate = [&](const std::vector<double>& w) {
        ensemble_rows(c, w, scores, labels);
        require_both_classes(labels);
        return metrics::auroc(scores, labels);
    };

    rnd::Rng rng(seed);
    std::vector<double> best_w;
    double best_value = -1.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> w = rng.dirichlet(c.k);
        const double value = evaluate(w);
        if (value > best_value) {
            best_value = value;
            best_w = std::move(w);
        }
    }
    if (refine) refine_weights(best_w, best_value, evaluate);

    TuneResult result;
    result.config.weights = to_weight_map(data.scorer_names, best_w);
    result.config.threshold = 0.5;  // placeholder; threshold tuning is separate
    result.config.validate();
    result.objective_value = best_value;
    result.trials = trials;
    result.seed = seed;
    result.objective_name = Objective::auroc;
    return result;
}

double tune_threshold(const std::vector<double>& ensemble_scores,
                      const std::vector<int>& labels_correct) {
    if (ensemble_scores.size() != labels_correct.size() || ensemble_scores.empty()) {
        throw ContractViolation("tune_threshold requires matching non-empty inputs");
    }
    require_both_classes(labels_correct);
    return best_grid_threshold(ensemble_scores, labels_correct).first;
}

TuneResult tune_sequential(const TuningDataset& data, int trials, std::uint64_t seed,
                           bool refine) {
    TuneResult result = tune_weights_threshold_agnostic(data, trials, seed, refine);
    const Compiled c = compile(data);
    std::vector<double> w;
    w.reserve(data.scorer_names.size());
    for (const auto& name : data.scorer_names) w.push_back(result.config.weights.at(name));
    std::vector<double> scores;
    std::vector<int> labels;
    ensemble_rows(c, w, scores, labels);
    result.config.threshold = tune_threshold(scores, labels);
    result.config.validate();
    return result;
}

TuneResult tune_joint(const TuningDataset& data, int trials, std::uint64_t seed, bool refine) {
    if (trials < 1) throw ContractViolation("tuning requires at least one trial");
    const Compiled c = compile(data);
    require_both_classes(c.labels);

    std::vector<double> scores;
    std::vector<int> labels;
    const auto f1_of = [&](const std::vector<double>& w, double tau) {
        ensemble_rows(c, w, scores, labels);
        require_both_classes(labels);
        return f1_at_threshold(scores, labels, tau);
    };

    rnd::Rng rng(seed);
    std::vector<double> best_w;
    double best_tau = 0.5;
    double best_value = -1.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> w = rng.dirichlet(c.k);
        double u = 0.0;
        do {
            u = rng.uniform();
        } while (u == 0.0);
        const double value = f1_of(w, u);
        if (value > best_value) {
            best_value = value;
            best_w = std::move(w);
            best_tau = u;
        }
    }

    if (refine) {
        // Upgrade the incumbent to its grid-optimal threshold, then refine
        // weights with each candidate paired to its own grid-optimal threshold.
        ensemble_rows(c, best_w, scores, labels);
        const auto [grid_tau, grid_f1] = best_grid_threshold(scores, labels);
        if (grid_f1 > best_value) {
            best_value = grid_f1;
            best_tau = grid_tau;
        }
        std::vector<double> w = best_w;
        double value = best_value;
        refine_weights(w, value, [&](const std::vector<double>& candidate) {
            ensemble_rows(c, candidate, scores, labels);
            require_both_classes(labels);
            return best_grid_threshold(scores, labels).second;
        });
        if (w != best_w) {
            ensemble_rows(c, w, scores, labels);
            const auto [tau, f1] = best_grid_threshold(scores, labels);
            best_w = w;
            best_tau = tau;
            best_value = f1;
        }
    }

    TuneResult result;
    result.config.weights = to_weight_map(data.scorer_names, best_w);
    result.config.threshold = best_tau;
    result.config.validate();
    result.objective_value = best_value;
    result.trials = trials;
    result.seed = seed;
    result.objective_name = Objective::f1;
    return result;
}

}  // namespace uq::ensemble
