#include "uq/providers_remote.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <condition_variable>

#include "httplib.h"
#include "uq/errors.hpp"

namespace uq::providers {

using nlohmann::json;

namespace detail {

namespace {

// Splits "scheme://host[:port]/prefix" into the client origin and the path
// prefix httplib expects separately.
void split_base_url(const std::string& base_url, std::string& origin, std::string& prefix) {
    const std::size_t scheme = base_url.find("://");
    if (scheme == std::string::npos) {
        throw ConfigError("remote base_url must include a scheme: '" + base_url + "'");
    }
    const std::size_t slash = base_url.find('/', scheme + 3);
    if (slash == std::string::npos) {
        origin = base_url;
        prefix.clear();
        return;
    }
    origin = base_url.substr(0, slash);
    prefix = base_url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
}

// Counting gate bounding concurrent requests per provider.
class InFlightGate {
public:
    explicit InFlightGate(int limit) : limit_(limit) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return in_flight_ < limit_; });
        ++in_flight_;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            --in_flight_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int limit_;
    int in_flight_ = 0;
};

}  // namespace

struct RemoteClient::Impl {
    std::string origin;
    std::string prefix;
    httplib::Headers headers;
    InFlightGate gate;

    explicit Impl(int max_in_flight) : gate(max_in_flight) {}
};

RemoteClient::RemoteClient(RemoteConfig config) : config_(std::move(config)) {
    if (config_.id.empty()) throw ConfigError("remote provider config requires an id");
    if (config_.max_in_flight < 1) throw ConfigError("remote max_in_flight must be >= 1");
    impl_ = std::make_unique<Impl>(config_.max_in_flight);
    split_base_url(config_.base_url, impl_->origin, impl_->prefix);
    impl_->headers.emplace("Content-Type", "application/json");
    if (!config_.api_key_env.empty()) {
        const char* token = std::getenv(config_.api_key_env.c_str());
        if (token == nullptr || *token == '\0') {
            throw ConfigError("environment variable '" + config_.api_key_env +
                              "' for provider '" + config_.id + "' is not set");
        }
        impl_->headers.emplace("Authorization", std::string("Bearer ") + token);
    }
}

RemoteClient::~RemoteClient() = default;

json RemoteClient::post(const std::string& path, const json& body) {
    impl_->gate.acquire();
    struct Release {
        InFlightGate& gate;
        ~Release() { gate.release(); }
    } release{impl_->gate};

    httplib::Client http(impl_->origin);
    http.set_connection_timeout(config_.timeout_seconds, 0);
    http.set_read_timeout(config_.timeout_seconds, 0);
    http.set_write_timeout(config_.timeout_seconds, 0);

    const auto result = http.Post(impl_->prefix + path, impl_->headers, body.dump(),
                                  "application/json");
    if (!result) {
        throw ProviderError("provider '" + config_.id + "': " + httplib::to_string(result.error()),
                            /*retryable=*/true);
    }
    if (result->status < 200 || result->status >= 300) {
        throw ProviderError("provider '" + config_.id + "': HTTP " + std::to_string(result->status),
                            /*retryable=*/true);
    }
    try {
        return json::parse(result->body);
    } catch (const json::exception& e) {
        throw ProviderError("provider '" + config_.id + "': unparsable response: " + e.what(),
                            /*retryable=*/true);
    }
}

}  // namespace detail

namespace {

// Field extraction on a response body; any shape violation is a retryable
// provider error, since a proxy or overloaded backend can garble one reply.
template <class T>
T field(const json& j, const char* key, const std::string& provider_id) {
    if (!j.is_object() || !j.contains(key)) {
        throw ProviderError("provider '" + provider_id + "': response missing '" + key + "'",
                            /*retryable=*/true);
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ProviderError("provider '" + provider_id + "': field '" + std::string(key) +
                                "': " + e.what(),
                            /*retryable=*/true);
    }
}

}  // namespace

std::vector<Generation> RemoteGenerator::generate(const GenerationRequest& request) {
    json body = json::object();
    body["logprobs"] = request.want_token_probs;
    body["n"] = request.num_samples;
    body["prompt"] = request.prompt;
    body["temperature"] = request.temperature;

    const json reply = client_.post("/generate", body);
    if (!reply.is_array()) {
        throw ProviderError("provider '" + id() + "': expected a JSON array of samples",
                            /*retryable=*/true);
    }
    std::vector<Generation> out;
    out.reserve(reply.size());
    for (const auto& sample : reply) {
        Generation gen;
        gen.text = field<std::string>(sample, "text", id());
        if (sample.contains("token_logprobs") && !sample.at("token_logprobs").is_null()) {
            const auto logprobs = field<std::vector<double>>(sample, "token_logprobs", id());
            std::vector<double> probs;
            probs.reserve(logprobs.size());
            for (double lp : logprobs) probs.push_back(std::exp(lp));
            gen.token_probs = std::move(probs);
        }
        out.push_back(std::move(gen));
    }
    return out;
}

NliProbs RemoteNliModel::classify(const std::string& premise, const std::string& hypothesis) {
    json body = json::object();
    body["hypothesis"] = hypothesis;
    body["premise"] = premise;

    const json reply = client_.post("/nli", body);
    NliProbs probs;
    probs.entailment = field<double>(reply, "entailment", id());
    probs.neutral = field<double>(reply, "neutral", id());
    probs.contradiction = field<double>(reply, "contradiction", id());
    return probs;
}

EmbeddingVector RemoteSentenceEmbedder::embed(const std::string& text) {
    json body = json::object();
    body["mode"] = "sentence";
    body["text"] = text;

    const json reply = client_.post("/embed", body);
    EmbeddingVector vector;
    vector.values = field<std::vector<double>>(reply, "vector", id());
    return vector;
}

TokenEmbeddings RemoteTokenEmbedder::embed(const std::string& text) {
    json body = json::object();
    body["mode"] = "tokens";
    body["text"] = text;

    const json reply = client_.post("/embed", body);
    TokenEmbeddings embeddings;
    embeddings.tokens = field<std::vector<std::string>>(reply, "tokens", id());
    embeddings.vectors = field<std::vector<std::vector<double>>>(reply, "vectors", id());
    return embeddings;
}

}  // namespace uq::providers
