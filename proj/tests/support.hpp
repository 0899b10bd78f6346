#pragma once

// Shared fixtures for the test suites and the acceptance harness: temp
// directories, record builders, synthetic datasets, and a CLI process runner.

#include <sys/wait.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "uq/core.hpp"
#include "uq/ensemble.hpp"
#include "uq/random.hpp"

namespace support {

// Unique scratch directory, removed recursively on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        const int n = counter.fetch_add(1);
        path_ = std::filesystem::temp_directory_path() /
                ("uqkit-test-" + std::to_string(::getpid()) + "-" + std::to_string(n));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// ============================================================================
// Record builders
// ============================================================================

inline uq::Generation make_gen(std::string text,
                               std::optional<std::vector<double>> probs = std::nullopt) {
    uq::Generation g;
    g.text = std::move(text);
    g.token_probs = std::move(probs);
    return g;
}

inline uq::ResponseRecord make_record(const std::string& id, const std::string& original,
                                      const std::vector<std::string>& candidates,
                                      std::optional<std::vector<double>> probs = std::nullopt) {
    uq::ResponseRecord r;
    r.prompt.id = id;
    r.prompt.text = "question " + id;
    r.prompt.task_kind = uq::TaskKind::freeform;
    r.original = make_gen(original, std::move(probs));
    for (const auto& c : candidates) r.candidates.push_back(make_gen(c));
    r.sampling_temperature = 1.0;
    return r;
}

// ============================================================================
// Synthetic tuning data
// ============================================================================

// One informative scorer "a" (is_correct plus clamped Gaussian noise, sigma
// 0.1) plus three uniform-noise scorers. Labels are balanced Bernoulli(1/2).
inline uq::ensemble::TuningDataset noisy_informative_dataset(std::size_t n, std::uint64_t seed) {
    uq::ensemble::TuningDataset data;
    data.scorer_names = {"a", "n1", "n2", "n3"};
    uq::rnd::Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const bool correct = rng.uniform() < 0.5;
        uq::ScoreVector v;
        const double a = static_cast<double>(correct) + 0.1 * rng.normal();
        v.set("a", std::min(1.0, std::max(0.0, a)));
        v.set("n1", rng.uniform());
        v.set("n2", rng.uniform());
        v.set("n3", rng.uniform());
        data.rows.emplace_back(v, uq::CorrectnessLabel::from_correct(correct));
    }
    return data;
}

// Noisy-consistency records for the candidate-count sweep: each record holds
// m_max candidates. A correct record's original is the truth and each
// candidate independently repeats the truth with probability q; a
// hallucinated record's original is its own distinct wrong answer and each
// candidate repeats the truth with probability 1 - q, otherwise emitting a
// distinct wrong answer. Distinct wrong strings never match anything.
struct SweepData {
    std::vector<uq::ResponseRecord> records;
    std::vector<uq::CorrectnessLabel> labels;
};

inline SweepData noisy_consistency_records(std::size_t n, int m_max, double q,
                                           std::uint64_t seed) {
    SweepData out;
    uq::rnd::Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const bool correct = i % 2 == 0;  // balanced by construction
        const std::string truth = "ans-" + std::to_string(i);
        std::vector<std::string> candidates;
        const double agree_p = correct ? q : 1.0 - q;
        for (int j = 0; j < m_max; ++j) {
            if (rng.uniform() < agree_p) {
                candidates.push_back(truth);
            } else {
                candidates.push_back("alt-" + std::to_string(i) + "-" + std::to_string(j));
            }
        }
        const std::string original =
            correct ? truth : "alt-" + std::to_string(i) + "-orig";
        out.records.push_back(make_record("r" + std::to_string(i), original, candidates));
        out.labels.push_back(uq::CorrectnessLabel::from_correct(correct));
    }
    return out;
}

// ============================================================================
// CLI process runner
// ============================================================================

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

// Runs the uqkit binary with the given arguments, capturing combined output.
inline CliResult run_cli(const std::string& binary, const std::vector<std::string>& args,
                         const TempDir& scratch) {
    static std::atomic<int> counter{0};
    const std::string capture = scratch.file("cli-out-" + std::to_string(counter.fetch_add(1)));
    std::string command = "'" + binary + "'";
    for (const auto& a : args) command += " '" + a + "'";
    command += " > '" + capture + "' 2>&1";
    const int raw = std::system(command.c_str());
    CliResult result;
    if (raw == -1) {
        result.exit_code = -1;
    } else if (WIFEXITED(raw)) {
        result.exit_code = WEXITSTATUS(raw);
    } else {
        result.exit_code = 128;
    }
    result.output = read_file(capture);
    return result;
}

// Binary path for suites run under ctest (the cli suite); acceptance passes
// the path explicitly instead.
inline std::string uqkit_binary() {
    const char* env = std::getenv("UQKIT_BIN");
    return env ? env : "";
}

// Provider config JSON with every mock slot filled plus one scripted judge.
inline std::string mock_provider_config(const std::vector<std::string>& judge_replies = {"80"}) {
    std::string replies;
    for (std::size_t i = 0; i < judge_replies.size(); ++i) {
        if (i) replies += ",";
        replies += "\"" + judge_replies[i] + "\"";
    }
    return std::string("{\n") +
           "  \"generator\": {\"kind\": \"mock\", \"seed\": 7, \"vocabulary\": [\"alpha\", \"beta\", \"gamma\"]},\n" +
           "  \"nli\": {\"kind\": \"mock\"},\n" +
           "  \"sentence_embedder\": {\"kind\": \"mock\", \"dim\": 8},\n" +
           "  \"token_embedder\": {\"kind\": \"mock\", \"dim\": 8},\n" +
           "  \"judges\": [{\"kind\": \"scripted\", \"id\": \"rater\", \"replies\": [" + replies + "]}]\n" +
           "}\n";
}

// Four-prompt JSONL dataset covering every task kind except freeform.
inline std::string sample_prompts_jsonl() {
    return std::string() +
           "{\"manifest\":\"\",\"schema\":\"prompts\",\"version\":1}\n" +
           "{\"id\":\"q1\",\"reference\":[\"alpha\"],\"task_kind\":\"short_answer\",\"text\":\"Say alpha.\"}\n" +
           "{\"id\":\"q2\",\"reference\":[\"4\"],\"task_kind\":\"math\",\"text\":\"What is 2+2?\"}\n" +
           "{\"id\":\"q3\",\"reference\":[\"B\"],\"task_kind\":\"multiple_choice\",\"text\":\"Pick B.\"}\n" +
           "{\"id\":\"q4\",\"reference\":[\"beta\"],\"task_kind\":\"short_answer\",\"text\":\"Say beta.\"}\n";
}

}  // namespace support
