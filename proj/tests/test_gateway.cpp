#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "hygraph/llm_gateway.hpp"
#include "hygraph/scripted.hpp"
#include "support/subprocess.hpp"

using namespace hygraph;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

LlmRequest request(const std::string& prompt, Purpose purpose = Purpose::reader,
                   const std::string& model = "test-model", double temperature = 0.0) {
    LlmRequest req;
    req.purpose = purpose;
    req.model = model;
    req.prompt = prompt;
    req.temperature = temperature;
    return req;
}

std::shared_ptr<ScriptedTransport> echo_script(const std::string& reply) {
    return std::make_shared<ScriptedTransport>(std::vector<ScriptRule>{}, reply);
}

json chat_body(const std::string& content) {
    json message{{"role", "assistant"}, {"content", content}};
    return json{{"choices", json::array({json{{"message", message}}})}};
}

// Fails with the given statuses before finally succeeding.
class FlakyTransport : public Transport {
public:
    explicit FlakyTransport(std::vector<int> failures) : failures_(std::move(failures)) {}
    TransportResponse send(const TransportRequest&) override {
        ++calls;
        if (calls <= static_cast<int>(failures_.size()))
            return {failures_[calls - 1], "upstream unhappy"};
        return {200, chat_body("ok").dump()};
    }
    int calls = 0;

private:
    std::vector<int> failures_;
};

class CapturingTransport : public Transport {
public:
    TransportResponse send(const TransportRequest& req) override {
        last = req;
        json body = chat_body("captured");
        body["usage"] = json{{"prompt_tokens", 41}, {"completion_tokens", 7}};
        return {200, body.dump()};
    }
    TransportRequest last;
};

} // namespace

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("temperature formatting is stable") {
    CHECK(format_temperature(0.0) == "0");
    CHECK(format_temperature(0.5) == "0.5");
    CHECK(format_temperature(1.0) == "1");
}

TEST_CASE("cache key covers model, temperature and prompt") {
    auto base = request("hello");
    std::string key = LlmGateway::cache_key(base);
    CHECK(key.size() == 64);
    CHECK(key == sha256_hex("test-model\x1f" + format_temperature(0.0) + "\x1f" + "hello"));

    CHECK(LlmGateway::cache_key(request("hello", Purpose::baseline)) == key); // purpose excluded
    CHECK(LlmGateway::cache_key(request("hello!")) != key);
    CHECK(LlmGateway::cache_key(request("hello", Purpose::reader, "other-model")) != key);
    CHECK(LlmGateway::cache_key(request("hello", Purpose::reader, "test-model", 0.5)) != key);
}

TEST_CASE("cache keys do not collide over random prompts") {
    std::mt19937_64 rng(31);
    std::set<std::string> keys;
    for (int i = 0; i < 2000; ++i) {
        std::string prompt;
        const size_t len = 1 + rng() % 60;
        for (size_t j = 0; j < len; ++j) prompt.push_back(static_cast<char>('a' + rng() % 26));
        prompt += std::to_string(i); // force distinct requests
        keys.insert(LlmGateway::cache_key(request(prompt)));
    }
    CHECK(keys.size() == 2000);
}

TEST_CASE("record persists, replay serves without the network") {
    auto dir = testgen::scratch_dir("cache");

    GatewayConfig cfg;
    cfg.mode = GatewayMode::record;
    cfg.cache_dir = dir.string();
    auto counting = std::make_shared<CountingTransport>(echo_script("the answer"));
    LlmGateway recorder(cfg, counting);

    auto req = request("what is the answer ?");
    LlmExchange first = recorder.complete(req);
    CHECK(first.response == "the answer");
    CHECK_FALSE(first.from_cache);
    CHECK(counting->calls() == 1);

    // The exchange landed in <dir>/<first2>/<key>.json.
    std::string key = LlmGateway::cache_key(req);
    fs::path expected = dir / key.substr(0, 2) / (key + ".json");
    REQUIRE(fs::exists(expected));
    std::ifstream cache_in(expected);
    json stored = json::parse(cache_in);
    CHECK(stored.at("model") == "test-model");
    CHECK(stored.at("purpose") == "reader");
    CHECK(stored.at("prompt") == "what is the answer ?");
    CHECK(stored.at("response") == "the answer");

    // Recording the same request again is a cache hit, not a new call.
    LlmExchange again = recorder.complete(req);
    CHECK(again.from_cache);
    CHECK(counting->calls() == 1);

    SUBCASE("replay hit is byte identical and never dials out") {
        cfg.mode = GatewayMode::replay;
        auto replay_counter = std::make_shared<CountingTransport>();
        LlmGateway replayer(cfg, replay_counter);
        LlmExchange a = replayer.complete(req);
        LlmExchange b = replayer.complete(req);
        CHECK(a.response == first.response);
        CHECK(b.response == first.response);
        CHECK(a.from_cache);
        CHECK(replay_counter->calls() == 0);
        CHECK(replayer.stats().network_calls == 0);
        CHECK(replayer.stats().cache_hits == 2);
    }

    SUBCASE("replay miss carries the cache key") {
        cfg.mode = GatewayMode::replay;
        LlmGateway replayer(cfg, std::make_shared<CountingTransport>());
        auto missing = request("never recorded");
        try {
            replayer.complete(missing);
            FAIL("expected GatewayError");
        } catch (const GatewayError& e) {
            CHECK(e.cache_key == LlmGateway::cache_key(missing));
        }
    }

    fs::remove_all(dir);
}

TEST_CASE("token counts fall back to the tokenizer when usage is absent") {
    GatewayConfig cfg;
    cfg.mode = GatewayMode::live;
    cfg.tokenizer = "heuristic";
    LlmGateway gw(cfg, echo_script("four score and seven"));
    auto ex = gw.complete(request("Hello world"));
    HeuristicTokenizer t;
    CHECK(ex.prompt_tokens == t.count("Hello world"));
    CHECK(ex.completion_tokens == t.count("four score and seven"));
}

TEST_CASE("token counts come from the endpoint usage block when present") {
    GatewayConfig cfg;
    cfg.mode = GatewayMode::live;
    auto capture = std::make_shared<CapturingTransport>();
    LlmGateway gw(cfg, capture);
    auto ex = gw.complete(request("ping", Purpose::entity_extract));
    CHECK(ex.prompt_tokens == 41);
    CHECK(ex.completion_tokens == 7);

    SUBCASE("request advertises its purpose and carries the payload") {
        bool saw_purpose = false;
        for (const auto& [k, v] : capture->last.headers)
            if (k == "x-purpose") {
                saw_purpose = true;
                CHECK(v == "entity_extract");
            }
        CHECK(saw_purpose);
        json body = json::parse(capture->last.body);
        CHECK(body.at("model") == "test-model");
        CHECK(body.at("temperature") == 0.0);
        CHECK(body.at("messages").at(0).at("content") == "ping");
    }
}

TEST_CASE("live mode retries transient failures") {
    GatewayConfig cfg;
    cfg.mode = GatewayMode::live;
    cfg.backoff_ms = 1;

    SUBCASE("5xx then success") {
        auto flaky = std::make_shared<FlakyTransport>(std::vector<int>{500, 503});
        LlmGateway gw(cfg, flaky);
        CHECK(gw.complete(request("x")).response == "ok");
        CHECK(flaky->calls == 3);
    }
    SUBCASE("429 then success") {
        auto flaky = std::make_shared<FlakyTransport>(std::vector<int>{429});
        LlmGateway gw(cfg, flaky);
        CHECK(gw.complete(request("x")).response == "ok");
        CHECK(flaky->calls == 2);
    }
    SUBCASE("gives up after max attempts") {
        auto flaky = std::make_shared<FlakyTransport>(std::vector<int>{500, 500, 500, 500});
        LlmGateway gw(cfg, flaky);
        CHECK_THROWS_AS(gw.complete(request("x")), GatewayError);
        CHECK(flaky->calls == 3);
    }
    SUBCASE("a plain 4xx fails immediately") {
        auto flaky = std::make_shared<FlakyTransport>(std::vector<int>{404});
        LlmGateway gw(cfg, flaky);
        CHECK_THROWS_AS(gw.complete(request("x")), GatewayError);
        CHECK(flaky->calls == 1);
    }
}

TEST_CASE("gateway config from environment") {
    setenv("HYGRAPH_LLM_ENDPOINT", "http://example.test/v1", 1);
    setenv("HYGRAPH_LLM_API_KEY", "sk-unit", 1);
    setenv("HYGRAPH_CACHE_DIR", "/tmp/unit-cache", 1);
    auto cfg = GatewayConfig::from_env();
    CHECK(cfg.endpoint == "http://example.test/v1");
    CHECK(cfg.api_key == "sk-unit");
    CHECK(cfg.cache_dir == "/tmp/unit-cache");
    unsetenv("HYGRAPH_LLM_ENDPOINT");
    unsetenv("HYGRAPH_LLM_API_KEY");
    unsetenv("HYGRAPH_CACHE_DIR");
}

TEST_CASE("purpose round trip") {
    for (Purpose p : {Purpose::entity_extract, Purpose::header_select, Purpose::entity_map,
                      Purpose::ner, Purpose::reader, Purpose::summarize_table,
                      Purpose::summarize_text, Purpose::baseline})
        CHECK(purpose_from_string(to_string(p)) == p);
    CHECK_THROWS(purpose_from_string("mystery"));
}

TEST_CASE("scripted transport rule matching") {
    std::vector<ScriptRule> rules = {
        {"reader|baseline", {"alpha", "beta"}, "both markers", -1},
        {"reader", {"alpha"}, "alpha only", -1},
        {"", {"limited"}, "finite", 2},
    };
    GatewayConfig cfg;
    cfg.mode = GatewayMode::live;
    LlmGateway gw(cfg, std::make_shared<ScriptedTransport>(rules));

    SUBCASE("first matching rule wins; all substrings must appear") {
        CHECK(gw.complete(request("beta then alpha")).response == "both markers");
        CHECK(gw.complete(request("only alpha here")).response == "alpha only");
    }
    SUBCASE("purpose alternation") {
        CHECK(gw.complete(request("alpha beta", Purpose::baseline)).response == "both markers");
        // baseline does not match the second rule's bare "reader".
        CHECK_THROWS_AS(gw.complete(request("alpha", Purpose::baseline)), GatewayError);
    }
    SUBCASE("finite-use rules exhaust") {
        CHECK(gw.complete(request("limited", Purpose::ner)).response == "finite");
        CHECK(gw.complete(request("limited", Purpose::ner)).response == "finite");
        CHECK_THROWS_AS(gw.complete(request("limited", Purpose::ner)), GatewayError);
    }
    SUBCASE("no rule and no default raises") {
        CHECK_THROWS_AS(gw.complete(request("nothing matches this")), GatewayError);
    }
}

TEST_CASE("scripted transport default response and file loading") {
    auto dir = testgen::scratch_dir("script");
    auto path = (dir / "script.json").string();
    std::ofstream(path) << R"({
      "rules": [{"purpose": "reader", "contains": ["magic"], "response": "ruled", "uses": 1}],
      "default_response": "fallthrough"
    })";
    GatewayConfig cfg;
    cfg.mode = GatewayMode::live;
    LlmGateway gw(cfg, ScriptedTransport::from_file(path));
    CHECK(gw.complete(request("magic word")).response == "ruled");
    CHECK(gw.complete(request("magic word")).response == "fallthrough"); // uses exhausted
    CHECK(gw.complete(request("anything")).response == "fallthrough");
    CHECK_THROWS_AS(ScriptedTransport::from_file((dir / "missing.json").string()), GatewayError);
    fs::remove_all(dir);
}
