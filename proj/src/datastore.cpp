#include "uq/datastore.hpp"

#include <iostream>
#include <set>
#include <sstream>

#include "uq/text.hpp"

namespace uq::store {

using nlohmann::json;

namespace {

// ============================================================================
// File plumbing
// ============================================================================

json parse_line(const std::filesystem::path& path, std::size_t line_number,
                const std::string& line) {
    try {
        json j = json::parse(line);
        if (!j.is_object()) throw DataError("record is not a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ":" + std::to_string(line_number) + ": " + e.what());
    }
}

json header_json(const std::string& schema, const std::string& manifest) {
    json h = json::object();
    h["manifest"] = manifest;
    h["schema"] = schema;
    h["version"] = kSchemaVersion;
    return h;
}

class FileWriter {
public:
    FileWriter(const std::filesystem::path& path, const std::string& schema,
               const std::string& manifest)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw DataError("cannot open '" + path.string() + "' for writing");
        line(header_json(schema, manifest));
    }

    void line(const json& j) { out_ << j.dump() << '\n'; }

    void finish() {
        out_.flush();
        if (!out_) throw DataError("write to '" + path_.string() + "' failed");
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

class FileReader {
public:
    FileReader(const std::filesystem::path& path, const std::string& schema) : path_(path), in_(path) {
        if (!in_) throw DataError("cannot open '" + path.string() + "'");
        std::string first;
        if (!std::getline(in_, first)) throw DataError(path.string() + " is empty (no header)");
        line_number_ = 1;
        const json h = parse_line(path_, 1, first);
        if (!h.contains("schema") || !h.contains("version")) {
            throw DataError(path.string() + ":1: missing schema header");
        }
        if (h.at("schema").get<std::string>() != schema) {
            throw DataError(path.string() + ": expected schema '" + schema + "', found '" +
                            h.at("schema").get<std::string>() + "'");
        }
        const int version = h.at("version").get<int>();
        if (version > kSchemaVersion) {
            throw MigrationError(path.string() + ": schema version " + std::to_string(version) +
                                 " needs migration (this build reads version " +
                                 std::to_string(kSchemaVersion) + ")");
        }
        if (version != kSchemaVersion) {
            throw DataError(path.string() + ": invalid schema version " + std::to_string(version));
        }
    }

    // Returns records line by line; empty optional at end of file.
    std::optional<json> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_number_;
            if (text::trim(line).empty()) continue;
            return parse_line(path_, line_number_, line);
        }
        return std::nullopt;
    }

    std::string context() const { return path_.string() + ":" + std::to_string(line_number_); }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_number_ = 0;
};

// Extras = all keys of j not claimed by the schema.
json extras_of(const json& j, const std::set<std::string>& known) {
    json extras = json::object();
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) extras[key] = value;
    }
    return extras;
}

// Starts a record from its extras so unknown fields survive the round trip.
json from_extras(const json& extras) {
    return extras.is_object() ? extras : json::object();
}

template <class T>
T require(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key)) throw DataError(context + ": missing field '" + std::string(key) + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(context + ": field '" + std::string(key) + "': " + e.what());
    }
}

void reject_duplicate(std::set<std::string>& seen, const std::string& id,
                      const std::string& context) {
    if (!seen.insert(id).second) {
        throw DataError(context + ": duplicate id '" + id + "'");
    }
}

// ============================================================================
// JSON mappings
// ============================================================================

json prompt_to_json(const PromptRecord& p) {
    json j = json::object();
    j["id"] = p.id;
    j["reference"] = p.reference;
    j["task_kind"] = to_string(p.task_kind);
    j["text"] = p.text;
    return j;
}

PromptRecord prompt_from_json(const json& j, const std::string& context) {
    PromptRecord p;
    p.id = require<std::string>(j, "id", context);
    p.text = require<std::string>(j, "text", context);
    p.task_kind = task_kind_from_string(require<std::string>(j, "task_kind", context));
    p.reference = require<std::vector<std::string>>(j, "reference", context);
    try {
        p.validate();
    } catch (const Error& e) {
        throw DataError(context + ": " + e.what());
    }
    return p;
}

json generation_to_json(const Generation& g) {
    json j = json::object();
    j["text"] = g.text;
    if (g.token_probs) j["token_probs"] = *g.token_probs;
    return j;
}

Generation generation_from_json(const json& j, const std::string& context) {
    Generation g;
    g.text = require<std::string>(j, "text", context);
    if (j.contains("token_probs")) {
        g.token_probs = require<std::vector<double>>(j, "token_probs", context);
    }
    try {
        g.validate();
    } catch (const Error& e) {
        throw DataError(context + ": " + e.what());
    }
    return g;
}

json fold_to_json(const metrics::FoldMetrics& f) {
    json j = json::object();
    j["auroc"] = f.auroc;
    j["f1"] = f.f1;
    j["precision"] = f.precision;
    j["recall"] = f.recall;
    j["threshold"] = f.threshold;
    return j;
}

metrics::FoldMetrics fold_from_json(const json& j, const std::string& context) {
    metrics::FoldMetrics f;
    f.auroc = require<double>(j, "auroc", context);
    f.f1 = require<double>(j, "f1", context);
    f.precision = require<double>(j, "precision", context);
    f.recall = require<double>(j, "recall", context);
    f.threshold = require<double>(j, "threshold", context);
    return f;
}

json config_to_json(const EnsembleConfig& c) {
    json j = json::object();
    j["threshold"] = c.threshold;
    j["weights"] = c.weights;
    return j;
}

EnsembleConfig config_from_json(const json& j, const std::string& context) {
    EnsembleConfig c;
    c.weights = require<std::map<std::string, double>>(j, "weights", context);
    c.threshold = require<double>(j, "threshold", context);
    try {
        c.validate();
    } catch (const Error& e) {
        throw DataError(context + ": " + e.what());
    }
    return c;
}

}  // namespace

// ============================================================================
// Prompt files
// ============================================================================

void write_prompts(const std::filesystem::path& path, const std::vector<PromptRecord>& records,
                   const std::string& manifest) {
    FileWriter out(path, "prompts", manifest);
    for (const auto& p : records) {
        p.validate();
        out.line(prompt_to_json(p));
    }
    out.finish();
}

std::vector<PromptRecord> load_prompts(const std::filesystem::path& path) {
    FileReader in(path, "prompts");
    std::vector<PromptRecord> out;
    std::set<std::string> seen;
    while (auto j = in.next()) {
        PromptRecord p = prompt_from_json(*j, in.context());
        reject_duplicate(seen, p.id, in.context());
        out.push_back(std::move(p));
    }
    return out;
}

// ============================================================================
// Generation files
// ============================================================================

namespace {
const std::set<std::string> kGenerationKeys = {"candidates", "original", "prompt", "temperature"};
}

void write_generations(const std::filesystem::path& path, const std::vector<GenerationRow>& rows,
                       const std::string& manifest) {
    FileWriter out(path, "generations", manifest);
    for (const auto& row : rows) {
        row.record.validate();
        json j = from_extras(row.extras);
        j["prompt"] = prompt_to_json(row.record.prompt);
        j["original"] = generation_to_json(row.record.original);
        json candidates = json::array();
        for (const auto& c : row.record.candidates) candidates.push_back(generation_to_json(c));
        j["candidates"] = candidates;
        j["temperature"] = row.record.sampling_temperature;
        out.line(j);
    }
    out.finish();
}

std::vector<GenerationRow> load_generations(const std::filesystem::path& path) {
    FileReader in(path, "generations");
    std::vector<GenerationRow> out;
    std::set<std::string> seen;
    while (auto j = in.next()) {
        GenerationRow row;
        if (!j->contains("prompt")) throw DataError(in.context() + ": missing field 'prompt'");
        row.record.prompt = prompt_from_json(j->at("prompt"), in.context());
        if (!j->contains("original")) throw DataError(in.context() + ": missing field 'original'");
        row.record.original = generation_from_json(j->at("original"), in.context());
        if (!j->contains("candidates") || !j->at("candidates").is_array()) {
            throw DataError(in.context() + ": missing field 'candidates'");
        }
        for (const auto& c : j->at("candidates")) {
            row.record.candidates.push_back(generation_from_json(c, in.context()));
        }
        row.record.sampling_temperature = require<double>(*j, "temperature", in.context());
        try {
            row.record.validate();
        } catch (const Error& e) {
            throw DataError(in.context() + ": " + e.what());
        }
        reject_duplicate(seen, row.record.prompt.id, in.context());
        row.extras = extras_of(*j, kGenerationKeys);
        out.push_back(std::move(row));
    }
    return out;
}

// ============================================================================
// Score files
// ============================================================================

namespace {
const std::set<std::string> kScoresKeys = {"id", "missing", "scores"};
}

void write_scores(const std::filesystem::path& path, const std::vector<ScoresRow>& rows,
                  const std::string& manifest) {
    FileWriter out(path, "scores", manifest);
    for (const auto& row : rows) {
        json j = from_extras(row.extras);
        j["id"] = row.id;
        j["scores"] = row.scores.values;
        j["missing"] = row.scores.missing;
        out.line(j);
    }
    out.finish();
}

std::vector<ScoresRow> load_scores(const std::filesystem::path& path) {
    FileReader in(path, "scores");
    std::vector<ScoresRow> out;
    std::set<std::string> seen;
    while (auto j = in.next()) {
        ScoresRow row;
        row.id = require<std::string>(*j, "id", in.context());
        reject_duplicate(seen, row.id, in.context());
        const auto values = require<std::map<std::string, double>>(*j, "scores", in.context());
        for (const auto& [name, value] : values) {
            try {
                row.scores.set(name, value);
            } catch (const Error& e) {
                throw DataError(in.context() + ": " + e.what());
            }
        }
        if (j->contains("missing")) {
            const auto missing =
                require<std::map<std::string, std::string>>(*j, "missing", in.context());
            for (const auto& [name, reason] : missing) row.scores.set_missing(name, reason);
        }
        row.extras = extras_of(*j, kScoresKeys);
        out.push_back(std::move(row));
    }
    return out;
}

// ============================================================================
// Graded files
// ============================================================================

namespace {
const std::set<std::string> kGradedKeys = {"grader", "h", "id", "is_correct"};
}

void write_graded(const std::filesystem::path& path, const std::vector<GradedRow>& rows,
                  const std::string& manifest) {
    FileWriter out(path, "graded", manifest);
    for (const auto& row : rows) {
        row.label.validate();
        json j = from_extras(row.extras);
        j["grader"] = graders::to_string(row.grader_kind);
        j["h"] = row.label.h;
        j["id"] = row.id;
        j["is_correct"] = row.label.is_correct;
        out.line(j);
    }
    out.finish();
}

std::vector<GradedRow> load_graded(const std::filesystem::path& path) {
    FileReader in(path, "graded");
    std::vector<GradedRow> out;
    std::set<std::string> seen;
    while (auto j = in.next()) {
        GradedRow row;
        row.id = require<std::string>(*j, "id", in.context());
        reject_duplicate(seen, row.id, in.context());
        row.label.is_correct = require<int>(*j, "is_correct", in.context());
        row.label.h = require<int>(*j, "h", in.context());
        try {
            row.label.validate();
        } catch (const Error& e) {
            throw DataError(in.context() + ": " + e.what());
        }
        row.grader_kind =
            graders::grader_kind_from_string(require<std::string>(*j, "grader", in.context()));
        row.extras = extras_of(*j, kGradedKeys);
        out.push_back(std::move(row));
    }
    return out;
}

// ============================================================================
// Config files
// ============================================================================

namespace {
const std::set<std::string> kConfigKeys = {"objective", "objective_value", "seed", "threshold",
                                           "trials", "weights"};
}

void write_config(const std::filesystem::path& path, const StoredConfig& config,
                  const std::string& manifest) {
    config.config.validate();
    FileWriter out(path, "config", manifest);
    json j = from_extras(config.extras);
    j["objective"] = ensemble::to_string(config.objective);
    j["objective_value"] = config.objective_value;
    j["seed"] = config.seed;
    j["threshold"] = config.config.threshold;
    j["trials"] = config.trials;
    j["weights"] = config.config.weights;
    out.line(j);
    out.finish();
}

StoredConfig load_config(const std::filesystem::path& path) {
    FileReader in(path, "config");
    auto j = in.next();
    if (!j) throw DataError(path.string() + ": config file has no record");
    StoredConfig config;
    config.config = config_from_json(*j, in.context());
    config.objective_value = require<double>(*j, "objective_value", in.context());
    config.trials = require<int>(*j, "trials", in.context());
    config.seed = require<std::uint64_t>(*j, "seed", in.context());
    config.objective =
        ensemble::objective_from_string(require<std::string>(*j, "objective", in.context()));
    config.extras = extras_of(*j, kConfigKeys);
    if (in.next()) throw DataError(path.string() + ": config file has more than one record");
    return config;
}

// ============================================================================
// Report and sweep files
// ============================================================================

namespace {
const std::set<std::string> kReportKeys = {"aggregate", "config",   "filtered_accuracy",
                                           "kind",      "per_fold", "scorer"};
const std::set<std::string> kSweepKeys = {"kind", "rows"};

json report_record(const StoredReport& stored) {
    const metrics::EvalReport& r = stored.report;
    json j = from_extras(stored.extras);
    j["kind"] = "cv";
    j["aggregate"] = fold_to_json(r.aggregate);
    json folds = json::array();
    for (const auto& f : r.per_fold) folds.push_back(fold_to_json(f));
    j["per_fold"] = folds;
    json curve = json::array();
    for (const auto& point : r.filtered_accuracy) {
        json p = json::object();
        p["accuracy"] = point.accuracy ? json(*point.accuracy) : json(nullptr);
        p["n_retained"] = point.n_retained;
        p["tau"] = point.tau;
        curve.push_back(p);
    }
    j["filtered_accuracy"] = curve;
    if (r.config_snapshot) j["config"] = config_to_json(*r.config_snapshot);
    if (!r.scorer_name.empty()) j["scorer"] = r.scorer_name;
    return j;
}

}  // namespace

void write_report(const std::filesystem::path& path, const StoredReport& report,
                  const std::string& manifest) {
    FileWriter out(path, "report", manifest);
    out.line(report_record(report));
    out.finish();
}

StoredReport load_report(const std::filesystem::path& path) {
    FileReader in(path, "report");
    auto j = in.next();
    if (!j) throw DataError(path.string() + ": report file has no record");
    if (require<std::string>(*j, "kind", in.context()) != "cv") {
        throw DataError(path.string() + ": not a cross-validation report");
    }
    StoredReport stored;
    metrics::EvalReport& r = stored.report;
    r.aggregate = fold_from_json(j->at("aggregate"), in.context());
    for (const auto& f : j->at("per_fold")) r.per_fold.push_back(fold_from_json(f, in.context()));
    for (const auto& p : j->at("filtered_accuracy")) {
        metrics::FilteredAccuracyPoint point;
        point.tau = require<double>(p, "tau", in.context());
        point.n_retained = require<std::size_t>(p, "n_retained", in.context());
        if (!p.contains("accuracy")) throw DataError(in.context() + ": missing field 'accuracy'");
        if (!p.at("accuracy").is_null()) point.accuracy = p.at("accuracy").get<double>();
        r.filtered_accuracy.push_back(point);
    }
    if (j->contains("config")) r.config_snapshot = config_from_json(j->at("config"), in.context());
    if (j->contains("scorer")) r.scorer_name = j->at("scorer").get<std::string>();
    stored.extras = extras_of(*j, kReportKeys);
    if (in.next()) throw DataError(path.string() + ": report file has more than one record");
    return stored;
}

void write_sweep(const std::filesystem::path& path, const SweepTable& table,
                 const std::string& manifest) {
    FileWriter out(path, "report", manifest);
    json j = from_extras(table.extras);
    j["kind"] = "sweep";
    json rows = json::array();
    for (const auto& row : table.rows) {
        json r = json::object();
        r["auroc"] = row.auroc_value;
        r["m"] = row.m;
        r["scorer"] = row.scorer;
        rows.push_back(r);
    }
    j["rows"] = rows;
    out.line(j);
    out.finish();
}

SweepTable load_sweep(const std::filesystem::path& path) {
    FileReader in(path, "report");
    auto j = in.next();
    if (!j) throw DataError(path.string() + ": sweep file has no record");
    if (require<std::string>(*j, "kind", in.context()) != "sweep") {
        throw DataError(path.string() + ": not a sweep table");
    }
    SweepTable table;
    for (const auto& r : j->at("rows")) {
        metrics::SweepRow row;
        row.auroc_value = require<double>(r, "auroc", in.context());
        row.m = require<int>(r, "m", in.context());
        row.scorer = require<std::string>(r, "scorer", in.context());
        table.rows.push_back(std::move(row));
    }
    table.extras = extras_of(*j, kSweepKeys);
    if (in.next()) throw DataError(path.string() + ": sweep file has more than one record");
    return table;
}

// ============================================================================
// Generation cache
// ============================================================================

CacheKey make_cache_key(const std::string& provider_id, const std::string& prompt_text,
                        double temperature, int sample_index, std::uint64_t seed) {
    CacheKey key;
    key.provider_id = provider_id;
    key.prompt_sha256 = text::sha256_hex(text::trim_trailing_newlines(prompt_text));
    key.temperature = temperature;
    key.sample_index = sample_index;
    key.seed = seed;
    return key;
}

namespace {

json cache_key_to_json(const CacheKey& key) {
    json j = json::object();
    j["prompt_sha256"] = key.prompt_sha256;
    j["provider"] = key.provider_id;
    j["sample_index"] = key.sample_index;
    j["seed"] = key.seed;
    j["temperature"] = key.temperature;
    return j;
}

CacheKey cache_key_from_json(const json& j, const std::string& context) {
    CacheKey key;
    key.provider_id = require<std::string>(j, "provider", context);
    key.prompt_sha256 = require<std::string>(j, "prompt_sha256", context);
    key.temperature = require<double>(j, "temperature", context);
    key.sample_index = require<int>(j, "sample_index", context);
    key.seed = require<std::uint64_t>(j, "seed", context);
    return key;
}

}  // namespace

GenerationCache::GenerationCache(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
        std::ifstream in(path_);
        if (!in) throw DataError("cannot open cache '" + path_.string() + "'");
        std::string line;
        std::size_t line_number = 0;
        bool saw_header = false;
        while (std::getline(in, line)) {
            ++line_number;
            if (text::trim(line).empty()) continue;
            try {
                const json j = json::parse(line);
                if (!saw_header) {
                    const int version = j.at("version").get<int>();
                    if (j.at("schema").get<std::string>() != "cache" || version != kSchemaVersion) {
                        throw DataError("wrong cache header");
                    }
                    saw_header = true;
                    continue;
                }
                const std::string context = path_.string() + ":" + std::to_string(line_number);
                CacheKey key = cache_key_from_json(j.at("key"), context);
                Generation gen = generation_from_json(j.at("generation"), context);
                entries_[key] = std::move(gen);
            } catch (const std::exception& e) {
                if (!saw_header) {
                    throw DataError(path_.string() + ": unreadable cache header: " + e.what());
                }
                std::cerr << "warning: skipping corrupt cache line " << path_.string() << ":"
                          << line_number << ": " << e.what() << "\n";
            }
        }
    }
    const bool fresh = !std::filesystem::exists(path_);
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw DataError("cannot open cache '" + path_.string() + "' for appending");
    if (fresh) {
        out_ << header_json("cache", "").dump() << '\n';
        out_.flush();
    }
}

std::optional<Generation> GenerationCache::lookup(const CacheKey& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void GenerationCache::store(const CacheKey& key, const Generation& generation) {
    generation.validate();
    std::lock_guard<std::mutex> lock(mutex_);
    if (entries_.count(key)) return;
    entries_[key] = generation;
    json j = json::object();
    j["generation"] = generation_to_json(generation);
    j["key"] = cache_key_to_json(key);
    out_ << j.dump() << '\n';
    out_.flush();
}

std::size_t GenerationCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

}  // namespace uq::store
