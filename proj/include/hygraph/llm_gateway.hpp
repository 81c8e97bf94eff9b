#pragma once
// Single entry point for every model call. Supports three modes:
//   live    - always hit the HTTP endpoint, no cache involvement
//   record  - serve from the on-disk cache, fall through to HTTP on miss
//             and persist the exchange
//   replay  - cache only; a miss raises GatewayError with the cache key
// The cache is content-addressed by SHA-256 over (model, temperature,
// prompt), so identical requests always land on the same file.

#include <atomic>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hygraph/tokenizer.hpp"

namespace hygraph {

enum class Purpose {
    entity_extract,
    header_select,
    entity_map,
    ner,
    reader,
    summarize_table,
    summarize_text,
    baseline,
};

const char* to_string(Purpose p);
Purpose purpose_from_string(std::string_view s);

struct LlmRequest {
    Purpose purpose = Purpose::reader;
    std::string model;
    std::string prompt;
    double temperature = 0.0;
};

// One completed request/response pair, as stored in the cache.
struct LlmExchange {
    LlmRequest request;
    std::string response;
    size_t prompt_tokens = 0;
    size_t completion_tokens = 0;
    bool from_cache = false;
};

// Anything that can answer an LlmRequest: the gateway itself, or a
// per-instance session that additionally collects the exchanges.
class CompletionService {
public:
    virtual ~CompletionService() = default;
    virtual LlmExchange complete(const LlmRequest& req) = 0;
};

struct TransportRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
};

struct TransportResponse {
    int status = 0;
    std::string body;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual TransportResponse send(const TransportRequest& req) = 0;
};

// Real HTTP transport for an OpenAI-compatible chat completions endpoint.
class HttpTransport : public Transport {
public:
    TransportResponse send(const TransportRequest& req) override;
};

// Wraps another transport and counts calls; used to prove replay mode
// never touches the network.
class CountingTransport : public Transport {
public:
    explicit CountingTransport(std::shared_ptr<Transport> inner = nullptr) : inner_(std::move(inner)) {}
    TransportResponse send(const TransportRequest& req) override;
    uint64_t calls() const { return calls_.load(); }

private:
    std::shared_ptr<Transport> inner_;
    std::atomic<uint64_t> calls_{0};
};

enum class GatewayMode { live, record, replay };

GatewayMode gateway_mode_from_string(std::string_view s);
const char* to_string(GatewayMode m);

struct GatewayConfig {
    GatewayMode mode = GatewayMode::replay;
    std::string endpoint = "https://api.openai.com/v1";
    std::string api_key;
    std::string cache_dir; // required unless mode == live
    int max_attempts = 3;
    int backoff_ms = 250;
    std::string tokenizer = "heuristic"; // fallback token counting

    // Reads HYGRAPH_LLM_ENDPOINT, HYGRAPH_LLM_API_KEY, HYGRAPH_CACHE_DIR.
    static GatewayConfig from_env();
};

class GatewayError : public std::runtime_error {
public:
    GatewayError(const std::string& what, std::string cache_key = {})
        : std::runtime_error(what), cache_key(std::move(cache_key)) {}
    std::string cache_key; // set for replay misses
};

struct GatewayStats {
    std::atomic<uint64_t> requests{0};
    std::atomic<uint64_t> cache_hits{0};
    std::atomic<uint64_t> network_calls{0};
};

class LlmGateway : public CompletionService {
public:
    explicit LlmGateway(GatewayConfig cfg, std::shared_ptr<Transport> transport = nullptr);

    // Thread-safe. Throws GatewayError on replay miss or exhausted retries.
    LlmExchange complete(const LlmRequest& req) override;

    static std::string cache_key(const LlmRequest& req);
    std::string cache_path(const std::string& key) const;
    const GatewayStats& stats() const { return stats_; }
    const GatewayConfig& config() const { return cfg_; }

private:
    LlmExchange call_network(const LlmRequest& req);

    GatewayConfig cfg_;
    std::shared_ptr<Transport> transport_;
    std::shared_ptr<Tokenizer> tokenizer_;
    GatewayStats stats_;
};

// Forwards to a gateway and keeps every exchange; one per pipeline
// instance, so token accounting covers analysis and summaries too.
class CollectingSession : public CompletionService {
public:
    explicit CollectingSession(CompletionService& inner) : inner_(inner) {}
    LlmExchange complete(const LlmRequest& req) override {
        LlmExchange ex = inner_.complete(req);
        exchanges.push_back(ex);
        return ex;
    }
    std::vector<LlmExchange> exchanges;

private:
    CompletionService& inner_;
};

std::string sha256_hex(std::string_view data);
std::string format_temperature(double t);

} // namespace hygraph
