#pragma once

// Line-delimited JSON persistence for every pipeline artifact. Each file
// starts with a header line carrying the schema kind, schema version, and the
// name of the run manifest that produced it; each following line is one
// record. Files are UTF-8, diffable, and byte-stable for fixed inputs:
// object keys serialize in sorted order and doubles round-trip exactly.
//
// Loaders preserve unknown fields: any keys beyond the known schema are
// retained on each row's extras object and re-emitted on write, so files
// written by a newer minor revision survive a round trip here. A header with
// a larger schema version than this build understands raises MigrationError.

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "uq/core.hpp"
#include "uq/ensemble.hpp"
#include "uq/graders.hpp"
#include "uq/metrics.hpp"

namespace uq::store {

inline constexpr int kSchemaVersion = 1;

// ============================================================================
// Row types
// ============================================================================

struct GenerationRow {
    ResponseRecord record;
    nlohmann::json extras = nlohmann::json::object();
};

struct ScoresRow {
    std::string id;
    ScoreVector scores;
    nlohmann::json extras = nlohmann::json::object();
};

struct GradedRow {
    std::string id;
    CorrectnessLabel label;
    graders::GraderKind grader_kind = graders::GraderKind::manual;
    nlohmann::json extras = nlohmann::json::object();
};

// An ensemble config plus the tuning provenance it shipped with.
struct StoredConfig {
    EnsembleConfig config;
    double objective_value = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    ensemble::Objective objective = ensemble::Objective::auroc;
    nlohmann::json extras = nlohmann::json::object();
};

struct StoredReport {
    metrics::EvalReport report;
    nlohmann::json extras = nlohmann::json::object();
};

struct SweepTable {
    std::vector<metrics::SweepRow> rows;
    nlohmann::json extras = nlohmann::json::object();
};

// ============================================================================
// Readers and writers (write-then-load is identity for every kind)
// ============================================================================

void write_prompts(const std::filesystem::path& path, const std::vector<PromptRecord>& records,
                   const std::string& manifest);
std::vector<PromptRecord> load_prompts(const std::filesystem::path& path);

void write_generations(const std::filesystem::path& path, const std::vector<GenerationRow>& rows,
                       const std::string& manifest);
std::vector<GenerationRow> load_generations(const std::filesystem::path& path);

void write_scores(const std::filesystem::path& path, const std::vector<ScoresRow>& rows,
                  const std::string& manifest);
std::vector<ScoresRow> load_scores(const std::filesystem::path& path);

void write_graded(const std::filesystem::path& path, const std::vector<GradedRow>& rows,
                  const std::string& manifest);
std::vector<GradedRow> load_graded(const std::filesystem::path& path);

void write_config(const std::filesystem::path& path, const StoredConfig& config,
                  const std::string& manifest);
StoredConfig load_config(const std::filesystem::path& path);

void write_report(const std::filesystem::path& path, const StoredReport& report,
                  const std::string& manifest);
StoredReport load_report(const std::filesystem::path& path);

void write_sweep(const std::filesystem::path& path, const SweepTable& table,
                 const std::string& manifest);
SweepTable load_sweep(const std::filesystem::path& path);

// ============================================================================
// Generation cache
// ============================================================================

struct CacheKey {
    std::string provider_id;
    std::string prompt_sha256;
    double temperature = 0.0;
    int sample_index = 0;
    std::uint64_t seed = 0;

    auto tie() const { return std::tie(provider_id, prompt_sha256, temperature, sample_index, seed); }
    bool operator<(const CacheKey& other) const { return tie() < other.tie(); }
    bool operator==(const CacheKey& other) const { return tie() == other.tie(); }
};

// Hashes the prompt text normalized by trimming trailing newlines only.
CacheKey make_cache_key(const std::string& provider_id, const std::string& prompt_text,
                        double temperature, int sample_index, std::uint64_t seed);

// Append-only, content-addressed store of generations keyed by the full
// sampling context. Existing entries are loaded at construction; corrupt
// lines are skipped with a warning on stderr, never silently misread.
// Concurrent stores of distinct keys are safe; storing an existing key is a
// no-op, so identical inputs never produce two entries.
class GenerationCache {
public:
    explicit GenerationCache(std::filesystem::path path);

    std::optional<Generation> lookup(const CacheKey& key) const;
    void store(const CacheKey& key, const Generation& generation);
    std::size_t size() const;

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::map<CacheKey, Generation> entries_;
    std::ofstream out_;
};

}  // namespace uq::store
