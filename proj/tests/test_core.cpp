#include "doctest.h"
#include "uq/core.hpp"
#include "uq/random.hpp"

using namespace uq;

TEST_SUITE("core") {

TEST_CASE("task kind names round-trip") {
    for (TaskKind k : {TaskKind::math, TaskKind::multiple_choice, TaskKind::short_answer,
                       TaskKind::freeform}) {
        CHECK(task_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(task_kind_from_string("essay"), InputError);
}

TEST_CASE("prompt and generation validation") {
    PromptRecord p;
    p.id = "q1";
    p.text = "What is 2+2?";
    CHECK_NOTHROW(p.validate());
    p.id = "";
    CHECK_THROWS_AS(p.validate(), ContractViolation);
    p.id = "q1";
    p.text = "";
    CHECK_THROWS_AS(p.validate(), ContractViolation);

    Generation g;
    g.text = "4";
    CHECK_NOTHROW(g.validate());
    CHECK(g.token_count() == 0);
    g.token_probs = std::vector<double>{0.5, 1.0, 0.0};
    CHECK_NOTHROW(g.validate());
    CHECK(g.token_count() == 3);
    g.token_probs = std::vector<double>{};
    CHECK_THROWS_AS(g.validate(), ContractViolation);
    g.token_probs = std::vector<double>{1.5};
    CHECK_THROWS_AS(g.validate(), ContractViolation);
    g.token_probs = std::vector<double>{-0.1};
    CHECK_THROWS_AS(g.validate(), ContractViolation);
}

TEST_CASE("response record validation") {
    ResponseRecord r;
    r.prompt.id = "q";
    r.prompt.text = "t";
    r.original.text = "a";
    r.candidates.push_back(Generation{"b", std::nullopt});
    r.sampling_temperature = 1.0;
    CHECK_NOTHROW(r.validate());
    CHECK(r.m() == 1);
    r.sampling_temperature = 0.0;
    CHECK_THROWS_AS(r.validate(), ContractViolation);
    r.sampling_temperature = -1.0;
    CHECK_THROWS_AS(r.validate(), ContractViolation);
}

TEST_CASE("score vector keeps values and missing reasons disjoint") {
    ScoreVector v;
    v.set("emr", 0.5);
    CHECK(v.has("emr"));
    CHECK(v.at("emr") == 0.5);
    CHECK(v.get("emr") == 0.5);
    CHECK(v.knows("emr"));

    v.set_missing("emr", "no_candidates");
    CHECK_FALSE(v.has("emr"));
    CHECK(v.knows("emr"));
    CHECK(v.missing.at("emr") == "no_candidates");
    CHECK_FALSE(v.get("emr").has_value());
    CHECK_THROWS_AS(v.at("emr"), ContractViolation);

    v.set("emr", 0.25);
    CHECK(v.has("emr"));
    CHECK(v.missing.count("emr") == 0);

    CHECK_FALSE(v.knows("never-set"));
    CHECK_THROWS_AS(v.set("bad", 1.5), ContractViolation);
    CHECK_THROWS_AS(v.set("bad", -0.1), ContractViolation);
    CHECK_NOTHROW(v.set("edge0", 0.0));
    CHECK_NOTHROW(v.set("edge1", 1.0));
}

TEST_CASE("correctness label pins h = 1 - is_correct") {
    const auto yes = CorrectnessLabel::from_correct(true);
    CHECK(yes.is_correct == 1);
    CHECK(yes.h == 0);
    const auto no = CorrectnessLabel::from_correct(false);
    CHECK(no.is_correct == 0);
    CHECK(no.h == 1);
    CHECK_NOTHROW(yes.validate());

    CorrectnessLabel broken;
    broken.is_correct = 1;
    broken.h = 1;
    CHECK_THROWS_AS(broken.validate(), ContractViolation);
    broken.is_correct = 2;
    CHECK_THROWS_AS(broken.validate(), ContractViolation);
}

TEST_CASE("simplex validation accepts exact and near-exact weights") {
    CHECK_NOTHROW(validate_simplex({{"a", 0.5}, {"b", 0.5}}));
    CHECK_NOTHROW(validate_simplex({{"a", 1.0}, {"b", 0.0}}));
    CHECK_NOTHROW(validate_simplex({{"a", 1.0}}));
    CHECK_THROWS_AS(validate_simplex({{"a", 0.6}, {"b", 0.6}}), SimplexViolation);
    CHECK_THROWS_AS(validate_simplex({{"a", -0.1}, {"b", 1.1}}), SimplexViolation);
    CHECK_THROWS_AS(validate_simplex({}), SimplexViolation);
    CHECK_THROWS_AS(validate_simplex({{"a", 1.0 + 1e-8}}), SimplexViolation);
    CHECK_NOTHROW(validate_simplex({{"a", 1.0 + 1e-10}}));
}

TEST_CASE("dirichlet samples always pass simplex validation") {
    rnd::Rng rng(31);
    for (int i = 0; i < 500; ++i) {
        const auto w = rng.dirichlet(1 + rng.index(6));
        std::map<std::string, double> weights;
        for (std::size_t j = 0; j < w.size(); ++j) weights["s" + std::to_string(j)] = w[j];
        CHECK_NOTHROW(validate_simplex(weights));
    }
}

TEST_CASE("ensemble config validation") {
    EnsembleConfig c;
    c.weights = {{"a", 0.7}, {"b", 0.3}};
    c.threshold = 0.5;
    CHECK_NOTHROW(c.validate());
    c.threshold = 0.0;
    CHECK_THROWS_AS(c.validate(), ContractViolation);
    c.threshold = 1.0;
    CHECK_THROWS_AS(c.validate(), ContractViolation);
    c.threshold = 0.5;
    c.weights = {{"a", 0.7}, {"b", 0.7}};
    CHECK_THROWS_AS(c.validate(), SimplexViolation);
}

TEST_CASE("hallucination prediction is strict-below") {
    CHECK(predict_hallucination(0.3, 0.5) == 1);
    CHECK(predict_hallucination(0.5, 0.5) == 0);
    CHECK(predict_hallucination(0.9999, 0.5) == 0);
    CHECK(predict_hallucination(0.0, 0.5) == 1);
    CHECK(predict_hallucination(1.0, 0.5) == 0);
    CHECK_THROWS_AS(predict_hallucination(1.1, 0.5), ContractViolation);
    CHECK_THROWS_AS(predict_hallucination(-0.1, 0.5), ContractViolation);
    CHECK_THROWS_AS(predict_hallucination(0.5, 0.0), ContractViolation);
    CHECK_THROWS_AS(predict_hallucination(0.5, 1.0), ContractViolation);
}

TEST_CASE("prediction is monotone in the score") {
    rnd::Rng rng(8);
    for (int i = 0; i < 1000; ++i) {
        const double tau = rng.uniform(0.01, 0.99);
        double s1 = rng.uniform();
        double s2 = rng.uniform();
        if (s1 > s2) std::swap(s1, s2);
        CHECK(predict_hallucination(s1, tau) >= predict_hallucination(s2, tau));
    }
}

}  // TEST_SUITE
