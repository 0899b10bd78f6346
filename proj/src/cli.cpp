#include "uq/cli.hpp"

#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uq/core.hpp"
#include "uq/datastore.hpp"
#include "uq/ensemble.hpp"
#include "uq/errors.hpp"
#include "uq/graders.hpp"
#include "uq/judge.hpp"
#include "uq/metrics.hpp"
#include "uq/pipeline.hpp"

namespace uq::cli {

namespace {

using nlohmann::json;

std::string now_iso8601() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Run manifest written next to each command's primary output. Output file
// headers carry the manifest's basename, so every artifact names the run
// that produced it.
class Manifest {
public:
    Manifest(const std::string& command, const std::filesystem::path& primary_output)
        : path_(primary_output.string() + ".manifest.json") {
        j_["command"] = command;
        j_["started_at"] = now_iso8601();
        j_["inputs"] = json::object();
        j_["outputs"] = json::array();
        output(primary_output);
    }

    void input(const std::string& role, const std::filesystem::path& p) {
        j_["inputs"][role] = p.string();
    }
    void output(const std::filesystem::path& p) {
        j_["outputs"].push_back(p.string());
    }
    void field(const std::string& key, json value) { j_[key] = std::move(value); }

    std::string name() const { return path_.filename().string(); }

    void write() {
        j_["finished_at"] = now_iso8601();
        std::ofstream out(path_, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write manifest '" + path_.string() + "'");
        out << j_.dump(2) << '\n';
        if (!out.flush()) throw DataError("write to '" + path_.string() + "' failed");
    }

private:
    std::filesystem::path path_;
    json j_ = json::object();
};

json load_provider_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open provider config '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("provider config '" + path.string() + "': " + e.what());
    }
}

// Manual labels: a JSON object mapping record id to a boolean (or 0/1).
std::map<std::string, bool> load_manual_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manual labels '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("manual labels '" + path.string() + "': " + e.what());
    }
    if (!j.is_object()) throw DataError("manual labels must be a JSON object of id -> correct");
    std::map<std::string, bool> labels;
    for (const auto& [id, value] : j.items()) {
        if (value.is_boolean()) {
            labels[id] = value.get<bool>();
        } else if (value.is_number_integer()) {
            const auto v = value.get<long long>();
            if (v != 0 && v != 1) {
                throw DataError("manual label for '" + id + "' must be 0/1 or boolean");
            }
            labels[id] = v == 1;
        } else {
            throw DataError("manual label for '" + id + "' must be 0/1 or boolean");
        }
    }
    return labels;
}

std::vector<ResponseRecord> records_of(const std::vector<store::GenerationRow>& rows) {
    std::vector<ResponseRecord> records;
    records.reserve(rows.size());
    for (const auto& row : rows) records.push_back(row.record);
    return records;
}

// Joins a scores file with a graded file by record id. Every scored row needs
// a grade; extra graded rows are allowed (grading may cover a superset).
// With no explicit scorer list, the dataset covers the union of scorer names
// seen in the file.
ensemble::TuningDataset build_dataset(const std::vector<store::ScoresRow>& score_rows,
                                      const std::vector<store::GradedRow>& graded_rows,
                                      std::vector<std::string> scorer_names) {
    std::map<std::string, CorrectnessLabel> grades;
    for (const auto& g : graded_rows) grades.emplace(g.id, g.label);

    if (scorer_names.empty()) {
        std::set<std::string> names;
        for (const auto& row : score_rows) {
            for (const auto& [name, value] : row.scores.values) {
                (void)value;
                names.insert(name);
            }
            for (const auto& [name, reason] : row.scores.missing) {
                (void)reason;
                names.insert(name);
            }
        }
        scorer_names.assign(names.begin(), names.end());
    }
    if (scorer_names.empty()) throw DataError("scores file names no scorers");
    if (score_rows.empty()) throw DataError("scores file has no rows");

    ensemble::TuningDataset data;
    data.scorer_names = std::move(scorer_names);
    data.rows.reserve(score_rows.size());
    for (const auto& row : score_rows) {
        const auto it = grades.find(row.id);
        if (it == grades.end()) throw DataError("no grade for scored record '" + row.id + "'");
        for (const auto& name : data.scorer_names) {
            if (!row.scores.knows(name)) {
                throw DataError("record '" + row.id + "' lacks scorer '" + name + "'");
            }
        }
        data.rows.emplace_back(row.scores, it->second);
    }
    data.validate();
    return data;
}

json fold_json(const metrics::FoldMetrics& fold) {
    json j = json::object();
    j["auroc"] = fold.auroc;
    j["f1"] = fold.f1;
    return j;
}

// ============================================================================
// generate
// ============================================================================

struct GenerateArgs {
    std::string prompts;
    std::string generations;
    std::string provider_config;
    std::string cache;
    bool no_cache = false;
    int m = 10;
    double temperature = 1.0;
    double original_temperature = 0.0;
    std::uint64_t seed = 0;
    int parallel = 1;
};

int cmd_generate(const GenerateArgs& args) {
    const auto prompts = store::load_prompts(args.prompts);
    const json provider_config = load_provider_config(args.provider_config);
    const auto providers = pipeline::make_providers(provider_config);
    if (providers.generator == nullptr) {
        throw ConfigError("provider config does not configure a generator");
    }

    Manifest manifest("generate", args.generations);
    manifest.input("prompts", args.prompts);
    manifest.input("provider_config", args.provider_config);
    manifest.field("provider_config", provider_config);
    manifest.field("m", args.m);
    manifest.field("temperature", args.temperature);
    manifest.field("original_temperature", args.original_temperature);
    manifest.field("seed", args.seed);

    std::optional<store::GenerationCache> cache;
    if (!args.no_cache) {
        const std::filesystem::path cache_path(
            args.cache.empty() ? args.generations + ".cache" : args.cache);
        cache.emplace(cache_path);
        manifest.output(cache_path);
    }

    pipeline::GenerateOptions options;
    options.num_candidates = args.m;
    options.candidate_temperature = args.temperature;
    options.original_temperature = args.original_temperature;
    options.seed = args.seed;
    options.parallel = args.parallel;

    pipeline::GenerateStats stats;
    const auto outcomes = pipeline::generate_records(prompts, options, *providers.generator,
                                                     cache ? &*cache : nullptr, &stats);

    std::vector<store::GenerationRow> rows;
    rows.reserve(outcomes.size());
    std::size_t failed = 0;
    std::string first_error;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].ok()) {
            store::GenerationRow row;
            row.record = *outcomes[i].value;
            rows.push_back(std::move(row));
        } else {
            ++failed;
            if (first_error.empty()) first_error = outcomes[i].error;
            std::cerr << "uqkit: generate: record '" << prompts[i].id
                      << "' failed: " << outcomes[i].error << "\n";
        }
    }
    store::write_generations(args.generations, rows, manifest.name());
    manifest.field("rows_written", rows.size());
    manifest.field("rows_failed", failed);
    manifest.field("cache_hits", stats.cache_hits);
    manifest.field("cache_misses", stats.cache_misses);
    manifest.write();

    std::cout << "generate: wrote " << rows.size() << " of " << prompts.size() << " records ("
              << stats.cache_hits << " cache hits, " << stats.cache_misses << " provider calls)"
              << "\n";
    if (failed > 0 && rows.empty()) {
        throw ProviderError("every record failed; first error: " + first_error,
                            /*retryable=*/false);
    }
    return failed > 0 ? 5 : 0;
}

// ============================================================================
// score
// ============================================================================

struct ScoreArgs {
    std::string generations;
    std::string scores;
    std::string provider_config;
    std::vector<std::string> scorers;
    double entail_threshold = blackbox::kDefaultEntailThreshold;
    int parallel = 1;
    int judge_max_retries = 3;
    std::string judge_fallback = "missing";
    double judge_temperature = 0.0;
};

int cmd_score(const ScoreArgs& args) {
    const auto generation_rows = store::load_generations(args.generations);
    const json provider_config = load_provider_config(args.provider_config);
    const auto providers = pipeline::make_providers(provider_config);

    pipeline::ScoreOptions options;
    options.scorers = args.scorers;
    options.entail_threshold = args.entail_threshold;
    options.parallel = args.parallel;
    options.judge_max_retries = args.judge_max_retries;
    options.judge_fallback = args.judge_fallback == "half" ? judge::JudgeConfig::Fallback::half
                                                           : judge::JudgeConfig::Fallback::missing;
    options.judge_temperature = args.judge_temperature;

    const auto records = records_of(generation_rows);
    const auto scored = pipeline::score_records(records, options, providers);

    Manifest manifest("score", args.scores);
    manifest.input("generations", args.generations);
    manifest.input("provider_config", args.provider_config);
    manifest.field("provider_config", provider_config);
    manifest.field("scorers", args.scorers);
    manifest.field("entail_threshold", args.entail_threshold);
    bool any_judge = false;
    for (const auto& name : args.scorers) any_judge = any_judge || pipeline::is_judge_scorer(name);
    if (any_judge) {
        manifest.field("judge_prompt_template_version", std::string(judge::kPromptTemplateVersion));
        manifest.field("judge_fallback", args.judge_fallback);
        manifest.field("judge_max_retries", args.judge_max_retries);
        manifest.field("judge_temperature", args.judge_temperature);
    }

    std::vector<store::ScoresRow> rows;
    rows.reserve(scored.size());
    std::size_t missing_entries = 0;
    for (const auto& [id, scores] : scored) {
        store::ScoresRow row;
        row.id = id;
        row.scores = scores;
        missing_entries += scores.missing.size();
        rows.push_back(std::move(row));
    }
    store::write_scores(args.scores, rows, manifest.name());
    manifest.field("rows_written", rows.size());
    manifest.field("missing_entries", missing_entries);
    manifest.write();

    std::cout << "score: wrote " << rows.size() << " records x " << args.scorers.size()
              << " scorers (" << missing_entries << " missing entries)\n";
    return 0;
}

// ============================================================================
// grade
// ============================================================================

struct GradeArgs {
    std::string generations;
    std::string graded;
    std::string manual;
};

int cmd_grade(const GradeArgs& args) {
    const auto generation_rows = store::load_generations(args.generations);
    std::map<std::string, bool> manual;
    if (!args.manual.empty()) manual = load_manual_labels(args.manual);

    std::vector<store::GradedRow> rows;
    rows.reserve(generation_rows.size());
    std::size_t correct = 0;
    for (const auto& generation_row : generation_rows) {
        const ResponseRecord& record = generation_row.record;
        store::GradedRow row;
        row.id = record.prompt.id;
        const auto it = manual.find(row.id);
        if (it != manual.end()) {
            row.label = CorrectnessLabel::from_correct(it->second);
            row.grader_kind = graders::GraderKind::manual;
        } else if (record.prompt.task_kind == TaskKind::freeform && !args.manual.empty()) {
            throw DataError("manual label file lacks record '" + row.id + "'");
        } else {
            const auto sample = graders::grade(record);
            row.label = sample.label;
            row.grader_kind = sample.grader_kind;
        }
        correct += static_cast<std::size_t>(row.label.is_correct);
        rows.push_back(std::move(row));
    }

    Manifest manifest("grade", args.graded);
    manifest.input("generations", args.generations);
    if (!args.manual.empty()) manifest.input("manual", args.manual);
    store::write_graded(args.graded, rows, manifest.name());
    manifest.field("rows_written", rows.size());
    manifest.field("correct", correct);
    manifest.write();

    std::cout << "grade: wrote " << rows.size() << " labels (" << correct << " correct, "
              << rows.size() - correct << " incorrect)\n";
    return 0;
}

// ============================================================================
// tune
// ============================================================================

struct TuneArgs {
    std::string scores;
    std::string graded;
    std::string config;
    std::vector<std::string> scorers;
    std::string objective = "auroc";
    int trials = 1000;
    std::uint64_t seed = 0;
    bool no_refine = false;
};

int cmd_tune(const TuneArgs& args) {
    const auto score_rows = store::load_scores(args.scores);
    const auto graded_rows = store::load_graded(args.graded);
    const auto dataset = build_dataset(score_rows, graded_rows, args.scorers);
    const auto objective = ensemble::objective_from_string(args.objective);

    const ensemble::TuneResult result =
        objective == ensemble::Objective::auroc
            ? ensemble::tune_sequential(dataset, args.trials, args.seed, !args.no_refine)
            : ensemble::tune_joint(dataset, args.trials, args.seed, !args.no_refine);

    Manifest manifest("tune", args.config);
    manifest.input("scores", args.scores);
    manifest.input("graded", args.graded);
    manifest.field("scorers", dataset.scorer_names);
    manifest.field("objective", args.objective);
    manifest.field("trials", args.trials);
    manifest.field("seed", args.seed);
    manifest.field("refine", !args.no_refine);

    store::StoredConfig stored;
    stored.config = result.config;
    stored.objective_value = result.objective_value;
    stored.trials = result.trials;
    stored.seed = result.seed;
    stored.objective = result.objective_name;
    store::write_config(args.config, stored, manifest.name());
    manifest.write();

    std::cout << "tune: " << args.objective << " = " << result.objective_value << ", threshold "
              << result.config.threshold << " over " << dataset.scorer_names.size()
              << " scorers\n";
    return 0;
}

// ============================================================================
// evaluate
// ============================================================================

struct EvaluateArgs {
    std::string scores;
    std::string graded;
    std::string report;
    std::string config;
    std::string scorer = "ensemble";
    std::vector<std::string> scorers;
    std::string objective = "auroc";
    int trials = 1000;
    int k = 5;
    std::uint64_t seed = 0;
    bool no_refine = false;
};

int cmd_evaluate(const EvaluateArgs& args) {
    if (!args.config.empty() && args.scorer != "ensemble") {
        throw ConfigError("--config and --scorer are mutually exclusive");
    }
    const auto score_rows = store::load_scores(args.scores);
    const auto graded_rows = store::load_graded(args.graded);
    const auto dataset = build_dataset(score_rows, graded_rows, args.scorers);

    metrics::CvOptions options;
    options.k = args.k;
    options.seed = args.seed;
    options.objective = ensemble::objective_from_string(args.objective);
    options.trials = args.trials;
    options.refine = !args.no_refine;
    std::string mode;
    if (!args.config.empty()) {
        options.mode = metrics::EvalMode::fixed_config;
        options.fixed_config = store::load_config(args.config).config;
        mode = "fixed-config";
    } else if (args.scorer != "ensemble") {
        options.mode = metrics::EvalMode::single_scorer;
        options.scorer = args.scorer;
        mode = "single-scorer";
    } else {
        options.mode = metrics::EvalMode::tune_ensemble;
        mode = "tuned-ensemble";
    }

    const metrics::EvalReport report = metrics::kfold_cv_evaluate(dataset, options);

    Manifest manifest("evaluate", args.report);
    manifest.input("scores", args.scores);
    manifest.input("graded", args.graded);
    if (!args.config.empty()) manifest.input("config", args.config);
    manifest.field("scorers", dataset.scorer_names);
    manifest.field("mode", mode);
    if (options.mode == metrics::EvalMode::single_scorer) manifest.field("scorer", args.scorer);
    if (options.mode == metrics::EvalMode::tune_ensemble) {
        manifest.field("objective", args.objective);
        manifest.field("trials", args.trials);
        manifest.field("refine", !args.no_refine);
    }
    manifest.field("k", args.k);
    manifest.field("seed", args.seed);

    store::StoredReport stored;
    stored.report = report;
    store::write_report(args.report, stored, manifest.name());
    manifest.field("aggregate", fold_json(report.aggregate));
    manifest.write();

    std::cout << "evaluate (" << mode << "): " << args.k << "-fold auroc " << report.aggregate.auroc
              << ", f1 " << report.aggregate.f1 << "\n";
    return 0;
}

// ============================================================================
// sweep
// ============================================================================

struct SweepArgs {
    std::string generations;
    std::string graded;
    std::string report;
    std::string provider_config;
    std::vector<int> m_values;
    std::vector<std::string> scorers = {"emr", "ncp", "bsc", "ncs", "nsn"};
    double entail_threshold = blackbox::kDefaultEntailThreshold;
    int parallel = 1;
};

int cmd_sweep(const SweepArgs& args) {
    const auto generation_rows = store::load_generations(args.generations);
    const auto graded_rows = store::load_graded(args.graded);
    const json provider_config = load_provider_config(args.provider_config);
    const auto providers = pipeline::make_providers(provider_config);

    std::map<std::string, CorrectnessLabel> grades;
    for (const auto& g : graded_rows) grades.emplace(g.id, g.label);
    std::vector<ResponseRecord> records;
    std::vector<CorrectnessLabel> labels;
    records.reserve(generation_rows.size());
    labels.reserve(generation_rows.size());
    for (const auto& row : generation_rows) {
        const auto it = grades.find(row.record.prompt.id);
        if (it == grades.end()) {
            throw DataError("no grade for record '" + row.record.prompt.id + "'");
        }
        records.push_back(row.record);
        labels.push_back(it->second);
    }

    const auto rows = metrics::candidate_count_sweep(
        records, args.m_values, args.scorers, labels, providers.nli.get(),
        providers.token_embedder.get(), providers.sentence_embedder.get(), args.entail_threshold,
        args.parallel);

    Manifest manifest("sweep", args.report);
    manifest.input("generations", args.generations);
    manifest.input("graded", args.graded);
    manifest.input("provider_config", args.provider_config);
    manifest.field("provider_config", provider_config);
    manifest.field("m", args.m_values);
    manifest.field("scorers", args.scorers);
    manifest.field("entail_threshold", args.entail_threshold);

    store::SweepTable table;
    table.rows = rows;
    store::write_sweep(args.report, table, manifest.name());
    manifest.write();

    std::cout << "sweep: wrote " << rows.size() << " rows (" << args.scorers.size()
              << " scorers x " << args.m_values.size() << " candidate counts)\n";
    return 0;
}

// ============================================================================
// wiring
// ============================================================================

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "uqkit: config error: " << e.what() << "\n";
        return 2;
    } catch (const ProviderError& e) {
        std::cerr << "uqkit: provider error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "uqkit: data error: " << e.what() << "\n";
        return 4;
    } catch (const InputError& e) {
        std::cerr << "uqkit: data error: " << e.what() << "\n";
        return 4;
    } catch (const ParseError& e) {
        std::cerr << "uqkit: data error: " << e.what() << "\n";
        return 4;
    } catch (const DegenerateObjective& e) {
        std::cerr << "uqkit: data error: " << e.what() << "\n";
        return 4;
    } catch (const SplitError& e) {
        std::cerr << "uqkit: data error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "uqkit: error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "uqkit: error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Confidence scoring and hallucination detection for language model outputs"};
    app.require_subcommand(1);

    std::function<int()> action;

    GenerateArgs generate_args;
    auto* generate = app.add_subcommand(
        "generate", "Sample an original response and m candidates per prompt");
    generate->add_option("--prompts", generate_args.prompts, "Prompts file")->required();
    generate->add_option("--generations", generate_args.generations, "Output generations file")
        ->required();
    generate->add_option("--provider-config", generate_args.provider_config,
                         "Provider config JSON")
        ->required();
    generate->add_option("--m", generate_args.m, "Candidates per prompt")
        ->check(CLI::NonNegativeNumber);
    generate->add_option("--temperature", generate_args.temperature, "Candidate temperature");
    generate->add_option("--original-temperature", generate_args.original_temperature,
                         "Original response temperature");
    generate->add_option("--seed", generate_args.seed, "Sampling seed");
    generate->add_option("--parallel", generate_args.parallel, "Worker threads")
        ->check(CLI::PositiveNumber);
    generate->add_option("--cache", generate_args.cache,
                         "Generation cache path (default: <generations>.cache)");
    generate->add_flag("--no-cache", generate_args.no_cache, "Disable the generation cache");
    generate->callback([&] { action = [&] { return cmd_generate(generate_args); }; });

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Compute confidence scores for generated records");
    score->add_option("--generations", score_args.generations, "Generations file")->required();
    score->add_option("--scores", score_args.scores, "Output scores file")->required();
    score->add_option("--provider-config", score_args.provider_config, "Provider config JSON")
        ->required();
    score
        ->add_option("--scorers", score_args.scorers,
                     "Scorers to run (emr,ncp,bsc,ncs,nsn,lntp,mtp,judge:<id>)")
        ->required()
        ->delimiter(',');
    score->add_option("--entail-threshold", score_args.entail_threshold,
                      "Bidirectional entailment threshold for clustering");
    score->add_option("--parallel", score_args.parallel, "Worker threads")
        ->check(CLI::PositiveNumber);
    score->add_option("--judge-max-retries", score_args.judge_max_retries,
                      "Judge re-queries after an unparsable reply");
    score->add_option("--judge-fallback", score_args.judge_fallback,
                      "Judge fallback on exhaustion")
        ->check(CLI::IsMember({"missing", "half"}));
    score->add_option("--judge-temperature", score_args.judge_temperature, "Judge temperature");
    score->callback([&] { action = [&] { return cmd_score(score_args); }; });

    GradeArgs grade_args;
    auto* grade = app.add_subcommand("grade", "Label original responses against references");
    grade->add_option("--generations", grade_args.generations, "Generations file")->required();
    grade->add_option("--graded", grade_args.graded, "Output graded file")->required();
    grade->add_option("--manual", grade_args.manual,
                      "JSON object of record id -> correct, for freeform tasks");
    grade->callback([&] { action = [&] { return cmd_grade(grade_args); }; });

    TuneArgs tune_args;
    auto* tune = app.add_subcommand("tune", "Fit ensemble weights and threshold");
    tune->add_option("--scores", tune_args.scores, "Scores file")->required();
    tune->add_option("--graded", tune_args.graded, "Graded file")->required();
    tune->add_option("--config", tune_args.config, "Output ensemble config file")->required();
    tune->add_option("--scorers", tune_args.scorers, "Scorer subset to tune over")
        ->delimiter(',');
    tune->add_option("--objective", tune_args.objective,
                     "auroc: weights by AUROC then threshold by F1; f1: joint search")
        ->check(CLI::IsMember({"auroc", "f1"}));
    tune->add_option("--trials", tune_args.trials, "Random search trials")
        ->check(CLI::PositiveNumber);
    tune->add_option("--seed", tune_args.seed, "Search seed");
    tune->add_flag("--no-refine", tune_args.no_refine, "Skip the local refinement pass");
    tune->callback([&] { action = [&] { return cmd_tune(tune_args); }; });

    EvaluateArgs evaluate_args;
    auto* evaluate = app.add_subcommand("evaluate", "Cross-validated evaluation report");
    evaluate->add_option("--scores", evaluate_args.scores, "Scores file")->required();
    evaluate->add_option("--graded", evaluate_args.graded, "Graded file")->required();
    evaluate->add_option("--report", evaluate_args.report, "Output report file")->required();
    evaluate->add_option("--config", evaluate_args.config,
                         "Evaluate this stored config instead of tuning per fold");
    evaluate->add_option("--scorer", evaluate_args.scorer,
                         "\"ensemble\" (default) or a single scorer name");
    evaluate->add_option("--scorers", evaluate_args.scorers, "Scorer subset for the dataset")
        ->delimiter(',');
    evaluate->add_option("--objective", evaluate_args.objective, "Tuning objective")
        ->check(CLI::IsMember({"auroc", "f1"}));
    evaluate->add_option("--trials", evaluate_args.trials, "Random search trials per fold")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--k", evaluate_args.k, "Folds")->check(CLI::Range(2, 1000));
    evaluate->add_option("--seed", evaluate_args.seed, "Fold and tuning seed");
    evaluate->add_flag("--no-refine", evaluate_args.no_refine, "Skip the local refinement pass");
    evaluate->callback([&] { action = [&] { return cmd_evaluate(evaluate_args); }; });

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "AUROC vs candidate count for consistency scorers");
    sweep->add_option("--generations", sweep_args.generations, "Generations file")->required();
    sweep->add_option("--graded", sweep_args.graded, "Graded file")->required();
    sweep->add_option("--report", sweep_args.report, "Output sweep file")->required();
    sweep->add_option("--provider-config", sweep_args.provider_config, "Provider config JSON")
        ->required();
    sweep->add_option("--m", sweep_args.m_values, "Candidate counts, e.g. 1,3,5,10,15")
        ->required()
        ->delimiter(',');
    sweep->add_option("--scorers", sweep_args.scorers, "Consistency scorers to sweep")
        ->delimiter(',');
    sweep->add_option("--entail-threshold", sweep_args.entail_threshold,
                      "Bidirectional entailment threshold for clustering");
    sweep->add_option("--parallel", sweep_args.parallel, "Worker threads")
        ->check(CLI::PositiveNumber);
    sweep->callback([&] { action = [&] { return cmd_sweep(sweep_args); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return guarded(action);
}

}  // namespace uq::cli
