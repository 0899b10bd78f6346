#include "uq/pipeline.hpp"

#include <algorithm>
#include <set>

#include "uq/providers_mock.hpp"
#include "uq/providers_remote.hpp"
#include "uq/whitebox.hpp"

namespace uq::pipeline {

using nlohmann::json;

// ============================================================================
// Provider configuration
// ============================================================================

std::shared_ptr<providers::Generator> ProviderSet::judge(const std::string& id) const {
    for (const auto& [judge_id, provider] : judges) {
        if (judge_id == id) return provider;
    }
    return nullptr;
}

namespace {

template <class T>
T option(const json& entry, const char* key, T fallback) {
    if (!entry.contains(key)) return fallback;
    try {
        return entry.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("provider config field '" + std::string(key) + "': " + e.what());
    }
}

template <class T>
T required(const json& entry, const char* key) {
    if (!entry.contains(key)) {
        throw ConfigError("provider config is missing required field '" + std::string(key) + "'");
    }
    try {
        return entry.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("provider config field '" + std::string(key) + "': " + e.what());
    }
}

providers::RemoteConfig remote_config(const json& entry) {
    providers::RemoteConfig config;
    config.id = required<std::string>(entry, "id");
    config.base_url = required<std::string>(entry, "base_url");
    config.api_key_env = option<std::string>(entry, "api_key_env", "");
    config.max_in_flight = option<int>(entry, "max_in_flight", 4);
    config.timeout_seconds = option<int>(entry, "timeout_seconds", 60);
    return config;
}

std::string kind_of(const json& entry, const char* slot) {
    if (!entry.is_object()) {
        throw ConfigError(std::string("provider config '") + slot + "' must be an object");
    }
    return required<std::string>(entry, "kind");
}

std::shared_ptr<providers::Generator> make_generator(const json& entry, const char* slot) {
    const std::string kind = kind_of(entry, slot);
    if (kind == "mock") {
        return std::make_shared<providers::MockGenerator>(
            option<std::uint64_t>(entry, "seed", 0),
            option<std::vector<std::string>>(entry, "vocabulary", {}),
            option<int>(entry, "fail_first", 0));
    }
    if (kind == "scripted") {
        return std::make_shared<providers::ScriptedGenerator>(
            required<std::vector<std::string>>(entry, "replies"),
            option<int>(entry, "fail_first", 0));
    }
    if (kind == "remote") return std::make_shared<providers::RemoteGenerator>(remote_config(entry));
    throw ConfigError(std::string("provider '") + slot + "': unknown kind '" + kind + "'");
}

std::shared_ptr<providers::NliModel> make_nli(const json& entry) {
    const std::string kind = kind_of(entry, "nli");
    if (kind == "mock") return std::make_shared<providers::MockNliModel>();
    if (kind == "remote") return std::make_shared<providers::RemoteNliModel>(remote_config(entry));
    throw ConfigError("provider 'nli': unknown kind '" + kind + "'");
}

std::shared_ptr<providers::SentenceEmbedder> make_sentence_embedder(const json& entry) {
    const std::string kind = kind_of(entry, "sentence_embedder");
    if (kind == "mock") {
        return std::make_shared<providers::MockSentenceEmbedder>(
            option<std::size_t>(entry, "dim", 8), option<std::uint64_t>(entry, "seed", 0));
    }
    if (kind == "remote") {
        return std::make_shared<providers::RemoteSentenceEmbedder>(remote_config(entry));
    }
    throw ConfigError("provider 'sentence_embedder': unknown kind '" + kind + "'");
}

std::shared_ptr<providers::TokenEmbedder> make_token_embedder(const json& entry) {
    const std::string kind = kind_of(entry, "token_embedder");
    if (kind == "mock") {
        return std::make_shared<providers::MockTokenEmbedder>(
            option<std::size_t>(entry, "dim", 8), option<std::uint64_t>(entry, "seed", 0));
    }
    if (kind == "remote") return std::make_shared<providers::RemoteTokenEmbedder>(remote_config(entry));
    throw ConfigError("provider 'token_embedder': unknown kind '" + kind + "'");
}

}  // namespace

ProviderSet make_providers(const json& config) {
    if (!config.is_object()) throw ConfigError("provider config must be a JSON object");
    static const std::set<std::string> kSlots = {"generator", "nli", "sentence_embedder",
                                                 "token_embedder", "judges"};
    for (const auto& [key, value] : config.items()) {
        (void)value;
        if (!kSlots.count(key)) throw ConfigError("provider config has unknown key '" + key + "'");
    }

    ProviderSet set;
    if (config.contains("generator")) set.generator = make_generator(config.at("generator"), "generator");
    if (config.contains("nli")) set.nli = make_nli(config.at("nli"));
    if (config.contains("sentence_embedder")) {
        set.sentence_embedder = make_sentence_embedder(config.at("sentence_embedder"));
    }
    if (config.contains("token_embedder")) {
        set.token_embedder = make_token_embedder(config.at("token_embedder"));
    }
    if (config.contains("judges")) {
        if (!config.at("judges").is_array()) throw ConfigError("'judges' must be a list");
        for (const auto& entry : config.at("judges")) {
            const std::string id = required<std::string>(entry, "id");
            if (set.judge(id) != nullptr) throw ConfigError("duplicate judge id '" + id + "'");
            set.judges.emplace_back(id, make_generator(entry, "judge"));
        }
    }
    return set;
}

bool is_judge_scorer(const std::string& name) {
    return name.rfind("judge:", 0) == 0 && name.size() > 6;
}

std::string judge_provider_id(const std::string& name) {
    if (!is_judge_scorer(name)) throw ConfigError("'" + name + "' is not a judge scorer name");
    return name.substr(6);
}

const std::vector<std::string>& known_scorers() {
    static const std::vector<std::string> kNames = {"emr", "ncp", "bsc", "ncs", "nsn",
                                                    "lntp", "mtp"};
    return kNames;
}

// ============================================================================
// Generation
// ============================================================================

namespace {

// Fetches via the cache when possible. A request is issued only for samples
// the cache does not hold, and fresh samples are stored back immediately, so
// an interrupted run resumes without re-querying completed work.
struct CachedFetch {
    providers::Generator& generator;
    store::GenerationCache* cache;
    const GenerateOptions& options;
    std::atomic<std::size_t>& hits;
    std::atomic<std::size_t>& misses;

    Generation original(const PromptRecord& prompt) const {
        const auto key = store::make_cache_key(generator.id(), prompt.text,
                                               options.original_temperature, 0, options.seed);
        if (cache != nullptr) {
            if (auto hit = cache->lookup(key)) {
                hits.fetch_add(1);
                return *hit;
            }
        }
        providers::GenerationRequest request;
        request.prompt = prompt.text;
        request.temperature = options.original_temperature;
        request.num_samples = 1;
        request.want_token_probs = generator.supports_token_probs();
        request.seed = options.seed;
        Generation gen = providers::generate(request, generator).front();
        misses.fetch_add(1);
        if (cache != nullptr) cache->store(key, gen);
        return gen;
    }

    // Candidates occupy cache sample indices 1..m; index 0 is the original.
    std::vector<Generation> candidates(const PromptRecord& prompt) const {
        const int m = options.num_candidates;
        std::vector<Generation> out(static_cast<std::size_t>(m));
        std::vector<bool> have(static_cast<std::size_t>(m), false);
        bool complete = true;
        if (cache != nullptr) {
            for (int j = 0; j < m; ++j) {
                const auto key = store::make_cache_key(generator.id(), prompt.text,
                                                       options.candidate_temperature, j + 1,
                                                       options.seed);
                if (auto hit = cache->lookup(key)) {
                    out[static_cast<std::size_t>(j)] = *hit;
                    have[static_cast<std::size_t>(j)] = true;
                } else {
                    complete = false;
                }
            }
        } else {
            complete = m == 0;
        }
        if (complete) {
            hits.fetch_add(static_cast<std::size_t>(m));
            return out;
        }

        providers::GenerationRequest request;
        request.prompt = prompt.text;
        request.temperature = options.candidate_temperature;
        request.num_samples = m;
        request.want_token_probs = false;
        request.seed = options.seed;
        const std::vector<Generation> fresh = providers::generate(request, generator);
        for (int j = 0; j < m; ++j) {
            if (have[static_cast<std::size_t>(j)]) {
                hits.fetch_add(1);
                continue;
            }
            misses.fetch_add(1);
            out[static_cast<std::size_t>(j)] = fresh[static_cast<std::size_t>(j)];
            if (cache != nullptr) {
                cache->store(store::make_cache_key(generator.id(), prompt.text,
                                                   options.candidate_temperature, j + 1,
                                                   options.seed),
                             fresh[static_cast<std::size_t>(j)]);
            }
        }
        return out;
    }
};

}  // namespace

std::vector<Outcome<ResponseRecord>> generate_records(const std::vector<PromptRecord>& prompts,
                                                      const GenerateOptions& options,
                                                      providers::Generator& generator,
                                                      store::GenerationCache* cache,
                                                      GenerateStats* stats) {
    if (options.num_candidates < 0) throw ConfigError("candidate count must be >= 0");
    if (!(options.candidate_temperature > 0.0)) {
        throw ConfigError("candidate temperature must be > 0");
    }
    if (options.original_temperature < 0.0) {
        throw ConfigError("original temperature must be >= 0");
    }
    for (const auto& prompt : prompts) prompt.validate();

    std::atomic<std::size_t> hits{0};
    std::atomic<std::size_t> misses{0};
    const CachedFetch fetch{generator, cache, options, hits, misses};
    auto outcomes = try_parallel_map(
        prompts,
        [&](const PromptRecord& prompt) {
            ResponseRecord record;
            record.prompt = prompt;
            record.original = fetch.original(prompt);
            record.candidates = fetch.candidates(prompt);
            record.sampling_temperature = options.candidate_temperature;
            record.validate();
            return record;
        },
        options.parallel);
    if (stats != nullptr) {
        stats->cache_hits = hits.load();
        stats->cache_misses = misses.load();
    }
    return outcomes;
}

// ============================================================================
// Scoring
// ============================================================================

namespace {

constexpr const char* kNoCandidates = "no_candidates";
constexpr const char* kNoTokenProbs = "no_token_probs";
constexpr const char* kProviderFailure = "provider_failure";
constexpr const char* kParseFailure = "parse_failure";

void preflight(const std::vector<std::string>& scorers, const ProviderSet& providers) {
    if (scorers.empty()) throw ConfigError("at least one scorer must be requested");
    std::set<std::string> seen;
    const auto& known = known_scorers();
    for (const auto& name : scorers) {
        if (!seen.insert(name).second) throw ConfigError("scorer '" + name + "' requested twice");
        if (is_judge_scorer(name)) {
            const std::string id = judge_provider_id(name);
            if (providers.judge(id) == nullptr) {
                throw ConfigError("judge provider '" + id + "' is not configured");
            }
            continue;
        }
        if (std::find(known.begin(), known.end(), name) == known.end()) {
            throw ConfigError("unknown scorer '" + name + "'");
        }
        if ((name == "ncp" || name == "nsn") && providers.nli == nullptr) {
            throw ConfigError("scorer '" + name + "' requires an NLI provider");
        }
        if (name == "bsc" && providers.token_embedder == nullptr) {
            throw ConfigError("scorer 'bsc' requires a token embedder");
        }
        if (name == "ncs" && providers.sentence_embedder == nullptr) {
            throw ConfigError("scorer 'ncs' requires a sentence embedder");
        }
    }
}

void apply(ScoreVector& scores, const std::string& name, const std::optional<double>& value,
           const char* missing_reason) {
    if (value) {
        scores.set(name, *value);
    } else {
        scores.set_missing(name, missing_reason);
    }
}

}  // namespace

std::vector<std::pair<std::string, ScoreVector>> score_records(
    const std::vector<ResponseRecord>& records, const ScoreOptions& options,
    const ProviderSet& providers) {
    preflight(options.scorers, providers);
    for (const auto& record : records) record.validate();

    const auto score_one = [&](const ResponseRecord& record) {
        ScoreVector scores;
        std::vector<std::string> texts;
        texts.reserve(record.m());
        for (const auto& candidate : record.candidates) texts.push_back(candidate.text);
        const bool no_candidates = record.m() == 0;

        for (const auto& name : options.scorers) {
            if (is_judge_scorer(name)) {
                judge::JudgeConfig config;
                config.provider_id = judge_provider_id(name);
                config.max_retries = options.judge_max_retries;
                config.fallback = options.judge_fallback;
                config.temperature = options.judge_temperature;
                auto provider = providers.judge(config.provider_id);
                judge::FailureKind failure = judge::FailureKind::none;
                const auto value = judge::judge_score(record.prompt.text, record.original.text,
                                                      *provider, config, failure);
                apply(scores, name, value,
                      failure == judge::FailureKind::provider ? kProviderFailure : kParseFailure);
            } else if (name == "emr") {
                if (no_candidates) {
                    scores.set_missing(name, kNoCandidates);
                } else {
                    scores.set(name, *blackbox::exact_match_rate(record.original.text, texts));
                }
            } else if (name == "ncp") {
                if (no_candidates) {
                    scores.set_missing(name, kNoCandidates);
                } else {
                    apply(scores, name,
                          blackbox::non_contradiction_probability(record.original.text, texts,
                                                                  *providers.nli),
                          kProviderFailure);
                }
            } else if (name == "bsc") {
                if (no_candidates) {
                    scores.set_missing(name, kNoCandidates);
                } else {
                    apply(scores, name,
                          blackbox::bert_score_confidence(record.original.text, texts,
                                                          *providers.token_embedder),
                          kProviderFailure);
                }
            } else if (name == "ncs") {
                if (no_candidates) {
                    scores.set_missing(name, kNoCandidates);
                } else {
                    apply(scores, name,
                          blackbox::normalized_cosine_similarity(record.original.text, texts,
                                                                 *providers.sentence_embedder),
                          kProviderFailure);
                }
            } else if (name == "nsn") {
                if (no_candidates) {
                    scores.set_missing(name, kNoCandidates);
                } else {
                    try {
                        apply(scores, name,
                              blackbox::normalized_semantic_negentropy(record.original.text, texts,
                                                                       *providers.nli,
                                                                       options.entail_threshold),
                              kProviderFailure);
                    } catch (const ProviderError&) {
                        scores.set_missing(name, kProviderFailure);
                    }
                }
            } else if (name == "lntp") {
                apply(scores, name, whitebox::length_normalized_token_probability(record.original),
                      kNoTokenProbs);
            } else {
                apply(scores, name, whitebox::min_token_probability(record.original),
                      kNoTokenProbs);
            }
        }
        return scores;
    };

    const auto all = parallel_map(records, score_one, options.parallel);
    std::vector<std::pair<std::string, ScoreVector>> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        out.emplace_back(records[i].prompt.id, all[i]);
    }
    return out;
}

}  // namespace uq::pipeline
