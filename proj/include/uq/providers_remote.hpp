#pragma once

// HTTP adapters for the provider interfaces. Wire contract (JSON over POST):
//   POST /generate  {prompt, temperature, n, logprobs}  => [{text, token_logprobs?}]
//   POST /nli       {premise, hypothesis}               => {entailment, neutral, contradiction}
//   POST /embed     {text, mode: "sentence"|"tokens"}   => {vector} | {tokens, vectors}
// Token log-probabilities are converted to probabilities (exp) at ingestion.
// Credentials travel as "Authorization: Bearer <token>" with the token read
// from the environment variable named in the config, never from the config
// file itself. Transport failures, non-2xx statuses, and unparsable response
// bodies raise retryable ProviderError; callers hold the retry policy.

#include <memory>
#include <string>

#include "json.hpp"
#include "uq/providers.hpp"

namespace uq::providers {

struct RemoteConfig {
    std::string id;           // provider id recorded in manifests and cache keys
    std::string base_url;     // e.g. "http://127.0.0.1:8080" or ".../v1"
    std::string api_key_env;  // env var holding the bearer token; empty = unauthenticated
    int max_in_flight = 4;    // bounded concurrent requests to this provider
    int timeout_seconds = 60;
};

namespace detail {

// Shared POST plumbing with the in-flight bound. Construction resolves the
// bearer token; a named but unset environment variable is a ConfigError.
class RemoteClient {
public:
    explicit RemoteClient(RemoteConfig config);
    ~RemoteClient();

    nlohmann::json post(const std::string& path, const nlohmann::json& body);
    const RemoteConfig& config() const { return config_; }

private:
    struct Impl;
    RemoteConfig config_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace detail

class RemoteGenerator : public Generator {
public:
    explicit RemoteGenerator(RemoteConfig config) : client_(std::move(config)) {}

    std::string id() const override { return client_.config().id; }
    std::vector<Generation> generate(const GenerationRequest& request) override;

private:
    detail::RemoteClient client_;
};

class RemoteNliModel : public NliModel {
public:
    explicit RemoteNliModel(RemoteConfig config) : client_(std::move(config)) {}

    std::string id() const override { return client_.config().id; }
    NliProbs classify(const std::string& premise, const std::string& hypothesis) override;

private:
    detail::RemoteClient client_;
};

class RemoteSentenceEmbedder : public SentenceEmbedder {
public:
    explicit RemoteSentenceEmbedder(RemoteConfig config) : client_(std::move(config)) {}

    std::string id() const override { return client_.config().id; }
    EmbeddingVector embed(const std::string& text) override;

private:
    detail::RemoteClient client_;
};

class RemoteTokenEmbedder : public TokenEmbedder {
public:
    explicit RemoteTokenEmbedder(RemoteConfig config) : client_(std::move(config)) {}

    std::string id() const override { return client_.config().id; }
    TokenEmbeddings embed(const std::string& text) override;

private:
    detail::RemoteClient client_;
};

}  // namespace uq::providers
