#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "uq/pipeline.hpp"
#include "uq/providers_remote.hpp"

using namespace uq;
using nlohmann::json;

namespace {

// In-process HTTP server on a random loopback port, torn down on scope exit.
class TestServer {
public:
    TestServer() = default;
    ~TestServer() { stop(); }

    httplib::Server& server() { return server_; }

    void start() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        REQUIRE(port_ > 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    void stop() {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }

    std::string base_url(const std::string& prefix = "") const {
        return "http://127.0.0.1:" + std::to_string(port_) + prefix;
    }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

providers::RemoteConfig config_for(const TestServer& server, const std::string& prefix = "") {
    providers::RemoteConfig config;
    config.id = "svc";
    config.base_url = server.base_url(prefix);
    config.timeout_seconds = 5;
    return config;
}

void reply_json(httplib::Response& res, const json& body) {
    res.set_content(body.dump(), "application/json");
}

}  // namespace

TEST_SUITE("remote") {

TEST_CASE("generator round-trips samples and converts logprobs to probabilities") {
    TestServer server;
    json seen;
    server.server().Post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        json samples = json::array();
        for (int i = 0; i < seen.at("n").get<int>(); ++i) {
            json sample = {{"text", "sample-" + std::to_string(i)}};
            if (seen.at("logprobs").get<bool>()) {
                sample["token_logprobs"] = {-0.5, -1.0};
            }
            samples.push_back(sample);
        }
        reply_json(res, samples);
    });
    server.start();

    providers::RemoteGenerator generator(config_for(server));
    providers::GenerationRequest request;
    request.prompt = "Name a color.";
    request.temperature = 0.7;
    request.num_samples = 2;
    request.want_token_probs = true;

    const auto out = providers::generate(request, generator);
    REQUIRE(out.size() == 2);
    CHECK(out[0].text == "sample-0");
    CHECK(out[1].text == "sample-1");
    REQUIRE(out[0].token_probs.has_value());
    CHECK((*out[0].token_probs)[0] == std::exp(-0.5));
    CHECK((*out[0].token_probs)[1] == std::exp(-1.0));

    CHECK(seen.at("prompt") == "Name a color.");
    CHECK(seen.at("temperature") == 0.7);
    CHECK(seen.at("n") == 2);
    CHECK(seen.at("logprobs") == true);
}

TEST_CASE("a short sample batch is a provider error, not silent truncation") {
    TestServer server;
    std::atomic<int> calls{0};
    server.server().Post("/generate", [&](const httplib::Request&, httplib::Response& res) {
        calls.fetch_add(1);
        reply_json(res, json::array({{{"text", "only-one"}}}));
    });
    server.start();

    providers::RemoteGenerator generator(config_for(server));
    providers::GenerationRequest request;
    request.prompt = "p";
    request.num_samples = 3;
    try {
        providers::generate(request, generator);
        FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
        CHECK(std::string(e.what()).find("1 of 3") != std::string::npos);
        CHECK(e.retryable);
    }
    CHECK(calls.load() == 1);  // count validation happens after the transport retry loop
}

TEST_CASE("bearer token comes from the environment, never the config") {
    TestServer server;
    server.server().Post("/nli", [&](const httplib::Request& req, httplib::Response& res) {
        if (req.get_header_value("Authorization") != "Bearer sekrit-token") {
            res.status = 401;
            return;
        }
        reply_json(res, {{"entailment", 0.7}, {"neutral", 0.2}, {"contradiction", 0.1}});
    });
    server.start();

    ::setenv("UQKIT_TEST_API_KEY", "sekrit-token", 1);
    auto config = config_for(server);
    config.api_key_env = "UQKIT_TEST_API_KEY";
    providers::RemoteNliModel nli(config);
    const auto probs = nli.classify("a", "b");
    CHECK(probs.entailment == 0.7);
    CHECK(probs.neutral == 0.2);
    CHECK(probs.contradiction == 0.1);

    ::setenv("UQKIT_TEST_API_KEY", "wrong", 1);
    providers::RemoteNliModel rejected(config);
    CHECK_THROWS_AS(rejected.classify("a", "b"), ProviderError);

    ::unsetenv("UQKIT_MISSING_API_KEY");
    config.api_key_env = "UQKIT_MISSING_API_KEY";
    CHECK_THROWS_AS(providers::RemoteNliModel{config}, ConfigError);
}

TEST_CASE("transport-level failures raise retryable provider errors") {
    TestServer server;
    server.server().Post("/nli", [](const httplib::Request&, httplib::Response& res) {
        res.status = 503;
    });
    server.server().Post("/embed", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("definitely not json", "text/plain");
    });
    server.start();

    providers::RemoteNliModel nli(config_for(server));
    try {
        nli.classify("a", "b");
        FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
        CHECK(std::string(e.what()).find("HTTP 503") != std::string::npos);
        CHECK(e.retryable);
    }

    providers::RemoteSentenceEmbedder embedder(config_for(server));
    try {
        embedder.embed("x");
        FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
        CHECK(std::string(e.what()).find("unparsable") != std::string::npos);
        CHECK(e.retryable);
    }
}

TEST_CASE("shape violations in otherwise valid json are provider errors") {
    TestServer server;
    server.server().Post("/nli", [](const httplib::Request&, httplib::Response& res) {
        reply_json(res, {{"entailment", 0.5}, {"neutral", 0.5}});
    });
    server.start();
    providers::RemoteNliModel nli(config_for(server));
    try {
        nli.classify("a", "b");
        FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
        CHECK(std::string(e.what()).find("contradiction") != std::string::npos);
    }
}

TEST_CASE("the validated nli entry point retries transient failures") {
    TestServer server;
    std::atomic<int> calls{0};
    server.server().Post("/nli", [&](const httplib::Request&, httplib::Response& res) {
        if (calls.fetch_add(1) < 2) {
            res.status = 500;
            return;
        }
        reply_json(res, {{"entailment", 1.0}, {"neutral", 0.0}, {"contradiction", 0.0}});
    });
    server.start();

    providers::RemoteNliModel nli(config_for(server));
    providers::RetryPolicy fast;
    fast.base_delay = std::chrono::milliseconds(1);
    const auto probs = providers::nli_probs("a", "b", nli, fast);
    CHECK(probs.entailment == 1.0);
    CHECK(calls.load() == 3);
}

TEST_CASE("a non-simplex nli reply fails postcondition validation") {
    TestServer server;
    server.server().Post("/nli", [](const httplib::Request&, httplib::Response& res) {
        reply_json(res, {{"entailment", 0.9}, {"neutral", 0.9}, {"contradiction", 0.9}});
    });
    server.start();
    providers::RemoteNliModel nli(config_for(server));
    CHECK_THROWS_AS(providers::nli_probs("a", "b", nli), ContractViolation);
}

TEST_CASE("embedding endpoints split on mode and normalize token vectors") {
    TestServer server;
    std::vector<json> bodies;
    std::mutex bodies_mutex;
    server.server().Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        const json body = json::parse(req.body);
        {
            std::lock_guard<std::mutex> lock(bodies_mutex);
            bodies.push_back(body);
        }
        if (body.at("mode") == "sentence") {
            reply_json(res, {{"vector", {1.0, 2.0, 2.0}}});
        } else {
            reply_json(res, {{"tokens", {"a", "b"}}, {"vectors", {{3.0, 4.0}, {0.0, 2.0}}}});
        }
    });
    server.start();

    providers::RemoteSentenceEmbedder sentences(config_for(server));
    const auto vector = providers::embed_sentence("hello", sentences);
    CHECK(vector.values == std::vector<double>{1.0, 2.0, 2.0});

    providers::RemoteTokenEmbedder tokens(config_for(server));
    const auto embeddings = providers::embed_tokens("hello", tokens);
    REQUIRE(embeddings.tokens == std::vector<std::string>{"a", "b"});
    CHECK(embeddings.vectors[0][0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(embeddings.vectors[0][1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(embeddings.vectors[1][0] == 0.0);
    CHECK(embeddings.vectors[1][1] == 1.0);

    REQUIRE(bodies.size() == 2);
    CHECK(bodies[0].at("mode") == "sentence");
    CHECK(bodies[0].at("text") == "hello");
    CHECK(bodies[1].at("mode") == "tokens");
}

TEST_CASE("base_url path prefixes are preserved") {
    TestServer server;
    server.server().Post("/v1/embed", [](const httplib::Request&, httplib::Response& res) {
        reply_json(res, {{"vector", {1.0}}});
    });
    server.start();

    providers::RemoteSentenceEmbedder plain(config_for(server, "/v1"));
    CHECK(plain.embed("x").values == std::vector<double>{1.0});
    providers::RemoteSentenceEmbedder slashed(config_for(server, "/v1/"));
    CHECK(slashed.embed("x").values == std::vector<double>{1.0});
}

TEST_CASE("remote config validation") {
    providers::RemoteConfig config;
    config.id = "svc";
    config.base_url = "127.0.0.1:8080";  // no scheme
    CHECK_THROWS_AS(providers::RemoteGenerator{config}, ConfigError);
    config.base_url = "http://127.0.0.1:8080";
    config.id = "";
    CHECK_THROWS_AS(providers::RemoteGenerator{config}, ConfigError);
    config.id = "svc";
    config.max_in_flight = 0;
    CHECK_THROWS_AS(providers::RemoteGenerator{config}, ConfigError);
}

TEST_CASE("make_providers constructs remote backends without contacting them") {
    const json config = json::parse(
        "{\"generator\": {\"kind\": \"remote\", \"id\": \"svc\","
        " \"base_url\": \"http://127.0.0.1:1\"}}");
    const auto set = pipeline::make_providers(config);
    REQUIRE(set.generator != nullptr);
    CHECK(set.generator->id() == "svc");
    CHECK(set.generator->supports_token_probs());
}

TEST_CASE("concurrent requests are bounded by max_in_flight") {
    TestServer server;
    std::atomic<int> gauge{0};
    std::atomic<int> peak{0};
    server.server().Post("/embed", [&](const httplib::Request&, httplib::Response& res) {
        const int now = gauge.fetch_add(1) + 1;
        int prev = peak.load();
        while (now > prev && !peak.compare_exchange_weak(prev, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(25));
        gauge.fetch_sub(1);
        reply_json(res, {{"vector", {1.0}}});
    });
    server.start();

    auto config = config_for(server);
    config.max_in_flight = 2;
    providers::RemoteSentenceEmbedder embedder(config);
    std::vector<std::thread> threads;
    std::atomic<int> completed{0};
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&] {
            if (!embedder.embed("x").values.empty()) completed.fetch_add(1);
        });
    }
    for (auto& t : threads) t.join();
    CHECK(completed.load() == 8);
    CHECK(peak.load() >= 1);
    CHECK(peak.load() <= 2);
}

}  // TEST_SUITE
