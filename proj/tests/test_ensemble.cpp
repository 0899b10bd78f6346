#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"
#include "uq/ensemble.hpp"
#include "uq/metrics.hpp"
#include "uq/random.hpp"

using namespace uq;
using ensemble::Objective;
using ensemble::TuningDataset;

namespace {

ScoreVector scores_of(std::initializer_list<std::pair<const char*, double>> values,
                      std::initializer_list<const char*> missing = {}) {
    ScoreVector v;
    for (const auto& [name, value] : values) v.set(name, value);
    for (const char* name : missing) v.set_missing(name, "provider_failure");
    return v;
}

// Rows where scorer "a" equals the label exactly and "b" is uninformative.
TuningDataset perfect_a_dataset(std::size_t n = 40) {
    TuningDataset data;
    data.scorer_names = {"a", "b"};
    rnd::Rng rng(5);
    for (std::size_t i = 0; i < n; ++i) {
        const bool correct = i % 2 == 0;
        ScoreVector v;
        v.set("a", correct ? 0.9 : 0.1);
        v.set("b", rng.uniform());
        data.rows.emplace_back(v, CorrectnessLabel::from_correct(correct));
    }
    return data;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("objective names round-trip") {
    CHECK(ensemble::to_string(Objective::auroc) == "auroc");
    CHECK(ensemble::to_string(Objective::f1) == "f1");
    CHECK(ensemble::objective_from_string("auroc") == Objective::auroc);
    CHECK(ensemble::objective_from_string("f1") == Objective::f1);
    CHECK_THROWS_AS(ensemble::objective_from_string("accuracy"), ConfigError);
}

TEST_CASE("tuning dataset validation requires full scorer coverage") {
    TuningDataset data;
    data.scorer_names = {"a", "b"};
    data.rows.emplace_back(scores_of({{"a", 0.5}}, {"b"}), CorrectnessLabel::from_correct(true));
    CHECK_NOTHROW(data.validate());
    data.rows.emplace_back(scores_of({{"a", 0.5}}), CorrectnessLabel::from_correct(false));
    CHECK_THROWS_AS(data.validate(), ContractViolation);
}

TEST_CASE("ensemble score arithmetic") {
    CHECK(*ensemble::ensemble_score(scores_of({{"a", 0.8}, {"b", 0.6}}),
                                    {{"a", 0.5}, {"b", 0.5}}) ==
          doctest::Approx(0.7).epsilon(1e-15));
    // Vertex identity reproduces the component exactly.
    CHECK(*ensemble::ensemble_score(scores_of({{"a", 0.837}, {"b", 0.2}}),
                                    {{"a", 1.0}, {"b", 0.0}}) == 0.837);
}

TEST_CASE("missing components renormalize the weights") {
    const auto v = scores_of({{"a", 0.8}}, {"b"});
    CHECK(*ensemble::ensemble_score(v, {{"a", 0.5}, {"b", 0.5}}) ==
          doctest::Approx(0.8).epsilon(1e-15));
    // Three components, one missing: weights 0.5/0.25/0.25 renormalize to
    // 2/3 and 1/3 over the survivors.
    const auto w = scores_of({{"a", 0.9}, {"b", 0.3}}, {"c"});
    CHECK(*ensemble::ensemble_score(w, {{"a", 0.5}, {"b", 0.25}, {"c", 0.25}}) ==
          doctest::Approx((0.5 * 0.9 + 0.25 * 0.3) / 0.75).epsilon(1e-12));
}

TEST_CASE("all components missing yields missing") {
    const auto v = scores_of({}, {"a", "b"});
    CHECK_FALSE(ensemble::ensemble_score(v, {{"a", 0.5}, {"b", 0.5}}).has_value());
}

TEST_CASE("zero weight on the only present component falls back to plain mean") {
    const auto v = scores_of({{"a", 0.8}}, {"b"});
    CHECK(*ensemble::ensemble_score(v, {{"a", 0.0}, {"b", 1.0}}) ==
          doctest::Approx(0.8).epsilon(1e-15));
    const auto two = scores_of({{"a", 0.8}, {"c", 0.4}}, {"b"});
    CHECK(*ensemble::ensemble_score(two, {{"a", 0.0}, {"b", 1.0}, {"c", 0.0}}) ==
          doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("unknown scorer in weights is a config error") {
    const auto v = scores_of({{"a", 0.8}});
    CHECK_THROWS_AS(ensemble::ensemble_score(v, {{"a", 0.5}, {"ghost", 0.5}}), ConfigError);
    CHECK_THROWS_AS(ensemble::ensemble_score(v, {{"a", 0.5}, {"b", 0.6}}), SimplexViolation);
}

TEST_CASE("ensemble score matches the oracle on random inputs") {
    rnd::Rng rng(21);
    const std::vector<std::string> names = {"s0", "s1", "s2", "s3"};
    for (int trial = 0; trial < 500; ++trial) {
        ScoreVector v;
        std::map<std::string, double> present;
        for (const auto& name : names) {
            if (rng.uniform() < 0.3) {
                v.set_missing(name, "provider_failure");
            } else {
                const double s = rng.uniform();
                v.set(name, s);
                present[name] = s;
            }
        }
        const auto w = rng.dirichlet(names.size());
        std::map<std::string, double> weights;
        for (std::size_t i = 0; i < names.size(); ++i) weights[names[i]] = w[i];
        const auto lib = ensemble::ensemble_score(v, weights);
        const auto ref = oracle::ensemble(present, weights);
        REQUIRE(lib.has_value() == ref.has_value());
        if (lib) {
            CHECK(std::fabs(*lib - *ref) < 1e-12);
            CHECK(*lib >= 0.0);
            CHECK(*lib <= 1.0);
        }
    }
}

TEST_CASE("ensemble score is monotone in each component") {
    const std::map<std::string, double> weights = {{"a", 0.6}, {"b", 0.4}};
    rnd::Rng rng(22);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = rng.uniform();
        const double b = rng.uniform();
        const double bump = rng.uniform(0.0, 1.0 - a);
        const auto low = *ensemble::ensemble_score(scores_of({{"a", a}, {"b", b}}), weights);
        const auto high =
            *ensemble::ensemble_score(scores_of({{"a", a + bump}, {"b", b}}), weights);
        CHECK(high >= low - 1e-15);
    }
}

// ============================================================================
// Threshold tuning
// ============================================================================

TEST_CASE("threshold grid returns the lowest maximizer") {
    // Any tau in (0.2, 0.8] gives F1 = 1; the grid's lowest such point is 0.21.
    CHECK(ensemble::tune_threshold({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) ==
          doctest::Approx(0.21).epsilon(1e-12));
}

TEST_CASE("threshold tuning rejects single-class labels") {
    CHECK_THROWS_AS(ensemble::tune_threshold({0.9, 0.8}, {1, 1}), DegenerateObjective);
    CHECK_THROWS_AS(ensemble::tune_threshold({0.9, 0.8}, {0, 0}), DegenerateObjective);
}

TEST_CASE("threshold tuning achieves the exhaustive grid optimum") {
    // The tuned tau must sit on the grid and reach the best F1 the oracle can
    // find anywhere on it. Taus themselves may differ when two grid points tie
    // mathematically but round differently, so the comparison is on F1.
    rnd::Rng rng(23);
    auto oracle_f1_at = [](const std::vector<double>& scores, const std::vector<int>& labels,
                           double tau) {
        std::vector<int> preds(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) preds[i] = scores[i] >= tau ? 1 : 0;
        return oracle::prf(preds, labels).f1;
    };
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 10 + rng.index(40);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool pos = false;
        bool neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = std::round(rng.uniform() * 20.0) / 20.0;  // coarse: plateaus and ties
            labels[i] = rng.uniform() < 0.5 ? 1 : 0;
            (labels[i] ? pos : neg) = true;
        }
        if (!pos || !neg) continue;
        const double tau = ensemble::tune_threshold(scores, labels);
        const double grid_slot = std::round(tau * 100.0);
        CHECK(tau == doctest::Approx(grid_slot / 100.0).epsilon(1e-12));
        CHECK(grid_slot >= 1.0);
        CHECK(grid_slot <= 99.0);
        const double best = oracle_f1_at(scores, labels, oracle::best_grid_threshold(scores, labels));
        CHECK(oracle_f1_at(scores, labels, tau) == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("anti-informative scores still get the brute-force-optimal threshold") {
    // Scores inverted against labels: grid oracle decides the best achievable F1.
    const std::vector<double> scores = {0.1, 0.2, 0.8, 0.9};
    const std::vector<int> labels = {1, 1, 0, 0};
    const double tau = ensemble::tune_threshold(scores, labels);
    CHECK(tau == doctest::Approx(oracle::best_grid_threshold(scores, labels)).epsilon(1e-12));
    std::vector<int> preds;
    for (double s : scores) preds.push_back(s >= tau ? 1 : 0);
    const auto prf = metrics::precision_recall_f1(preds, labels);
    // Predicting everything positive is the best an inverted scorer can do.
    CHECK(prf.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

// ============================================================================
// Weight tuning
// ============================================================================

TEST_CASE("threshold-agnostic tuning finds the informative scorer") {
    const auto data = perfect_a_dataset();
    const auto result = ensemble::tune_weights_threshold_agnostic(data, 300, 9);
    CHECK(result.objective_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.config.threshold == 0.5);  // placeholder until a threshold pass
    CHECK(result.trials == 300);
    CHECK(result.seed == 9);
    CHECK(result.objective_name == Objective::auroc);
    CHECK_NOTHROW(validate_simplex(result.config.weights));
}

TEST_CASE("single scorer forces the vertex") {
    TuningDataset data;
    data.scorer_names = {"only"};
    for (int i = 0; i < 10; ++i) {
        ScoreVector v;
        v.set("only", i % 2 ? 0.8 : 0.2);
        data.rows.emplace_back(v, CorrectnessLabel::from_correct(i % 2 == 1));
    }
    const auto result = ensemble::tune_weights_threshold_agnostic(data, 10, 1);
    CHECK(result.config.weights.at("only") == 1.0);
}

TEST_CASE("tuning requires both classes") {
    TuningDataset data;
    data.scorer_names = {"a"};
    for (int i = 0; i < 6; ++i) {
        ScoreVector v;
        v.set("a", 0.5);
        data.rows.emplace_back(v, CorrectnessLabel::from_correct(true));
    }
    CHECK_THROWS_AS(ensemble::tune_weights_threshold_agnostic(data, 10, 1), DegenerateObjective);
    CHECK_THROWS_AS(ensemble::tune_joint(data, 10, 1), DegenerateObjective);
}

TEST_CASE("tuning is deterministic for a fixed seed") {
    const auto data = support::noisy_informative_dataset(120, 3);
    for (bool refine : {false, true}) {
        const auto a = ensemble::tune_weights_threshold_agnostic(data, 50, 17, refine);
        const auto b = ensemble::tune_weights_threshold_agnostic(data, 50, 17, refine);
        CHECK(a.config.weights == b.config.weights);
        CHECK(a.objective_value == b.objective_value);
        const auto ja = ensemble::tune_joint(data, 50, 17, refine);
        const auto jb = ensemble::tune_joint(data, 50, 17, refine);
        CHECK(ja.config.weights == jb.config.weights);
        CHECK(ja.config.threshold == jb.config.threshold);
    }
}

TEST_CASE("refinement never loses objective value") {
    const auto data = support::noisy_informative_dataset(150, 8);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto bare = ensemble::tune_weights_threshold_agnostic(data, 40, seed, false);
        const auto refined = ensemble::tune_weights_threshold_agnostic(data, 40, seed, true);
        CHECK(refined.objective_value >= bare.objective_value - 1e-15);
        const auto joint_bare = ensemble::tune_joint(data, 40, seed, false);
        const auto joint_refined = ensemble::tune_joint(data, 40, seed, true);
        CHECK(joint_refined.objective_value >= joint_bare.objective_value - 1e-15);
    }
}

TEST_CASE("refinement prefers sparser weights on plateaus") {
    // Two identical scorers: every weight vector scores the same AUROC, so
    // refinement should collapse to a single nonzero weight.
    TuningDataset data;
    data.scorer_names = {"a", "b"};
    rnd::Rng rng(33);
    for (int i = 0; i < 60; ++i) {
        const bool correct = i % 2 == 0;
        const double s = correct ? rng.uniform(0.5, 1.0) : rng.uniform(0.0, 0.5);
        ScoreVector v;
        v.set("a", s);
        v.set("b", s);
        data.rows.emplace_back(v, CorrectnessLabel::from_correct(correct));
    }
    const auto result = ensemble::tune_weights_threshold_agnostic(data, 30, 4, true);
    int nonzero = 0;
    for (const auto& [name, w] : result.config.weights) {
        if (w > 1e-12) ++nonzero;
    }
    CHECK(nonzero == 1);
}

TEST_CASE("sequential regime pairs auroc weights with a grid threshold") {
    const auto data = perfect_a_dataset();
    const auto result = ensemble::tune_sequential(data, 200, 11);
    CHECK(result.objective_name == Objective::auroc);
    CHECK(result.objective_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.config.threshold > 0.0);
    CHECK(result.config.threshold < 1.0);
    // The fitted threshold separates the 0.1/0.9 score groups.
    CHECK(result.config.threshold > 0.1);
    CHECK(result.config.threshold <= 0.9);
}

TEST_CASE("joint regime maximizes F1 directly") {
    const auto data = perfect_a_dataset();
    const auto result = ensemble::tune_joint(data, 300, 12);
    CHECK(result.objective_name == Objective::f1);
    CHECK(result.objective_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.trials == 300);

    const auto single = ensemble::tune_joint(data, 1, 13, false);
    CHECK(single.trials == 1);
    CHECK_NOTHROW(single.config.validate());
}

TEST_CASE("joint F1 is never much below sequential F1") {
    for (std::uint64_t seed : {100ULL, 200ULL, 300ULL}) {
        const auto data = support::noisy_informative_dataset(200, seed);
        const auto sequential = ensemble::tune_sequential(data, 150, seed);
        const auto joint = ensemble::tune_joint(data, 150, seed);

        auto f1_of = [&](const EnsembleConfig& config) {
            std::vector<int> preds;
            std::vector<int> labels;
            for (const auto& [v, label] : data.rows) {
                const auto s = ensemble::ensemble_score(v, config.weights);
                preds.push_back(*s >= config.threshold ? 1 : 0);
                labels.push_back(label.is_correct);
            }
            return metrics::precision_recall_f1(preds, labels).f1;
        };
        CHECK(f1_of(joint.config) >= f1_of(sequential.config) - 0.02);
    }
}

TEST_CASE("tuned ensemble beats the best single component on the tuning set") {
    const auto data = support::noisy_informative_dataset(400, 44);
    const auto result = ensemble::tune_weights_threshold_agnostic(data, 1000, 7);

    double best_single = 0.0;
    for (const auto& name : data.scorer_names) {
        std::vector<double> scores;
        std::vector<int> labels;
        for (const auto& [v, label] : data.rows) {
            scores.push_back(v.at(name));
            labels.push_back(label.is_correct);
        }
        best_single = std::max(best_single, metrics::auroc(scores, labels));
    }
    CHECK(result.objective_value >= best_single - 0.01);
}

TEST_CASE("rows with every component missing are excluded from tuning") {
    auto data = perfect_a_dataset(20);
    data.rows.emplace_back(scores_of({}, {"a", "b"}), CorrectnessLabel::from_correct(true));
    const auto result = ensemble::tune_weights_threshold_agnostic(data, 100, 2);
    CHECK(result.objective_value == doctest::Approx(1.0).epsilon(1e-12));
}

}  // TEST_SUITE
