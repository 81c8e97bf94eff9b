#include "hygraph/llm_gateway.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <openssl/evp.h>

#include <httplib.h>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace hygraph {

const char* to_string(Purpose p) {
    switch (p) {
        case Purpose::entity_extract: return "entity_extract";
        case Purpose::header_select: return "header_select";
        case Purpose::entity_map: return "entity_map";
        case Purpose::ner: return "ner";
        case Purpose::reader: return "reader";
        case Purpose::summarize_table: return "summarize_table";
        case Purpose::summarize_text: return "summarize_text";
        case Purpose::baseline: return "baseline";
    }
    return "?";
}

Purpose purpose_from_string(std::string_view s) {
    if (s == "entity_extract") return Purpose::entity_extract;
    if (s == "header_select") return Purpose::header_select;
    if (s == "entity_map") return Purpose::entity_map;
    if (s == "ner") return Purpose::ner;
    if (s == "reader") return Purpose::reader;
    if (s == "summarize_table") return Purpose::summarize_table;
    if (s == "summarize_text") return Purpose::summarize_text;
    if (s == "baseline") return Purpose::baseline;
    throw std::invalid_argument("unknown purpose: " + std::string(s));
}

GatewayMode gateway_mode_from_string(std::string_view s) {
    if (s == "live") return GatewayMode::live;
    if (s == "record") return GatewayMode::record;
    if (s == "replay") return GatewayMode::replay;
    throw std::invalid_argument("unknown gateway mode: " + std::string(s));
}

const char* to_string(GatewayMode m) {
    switch (m) {
        case GatewayMode::live: return "live";
        case GatewayMode::record: return "record";
        case GatewayMode::replay: return "replay";
    }
    return "?";
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

std::string format_temperature(double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", t);
    return buf;
}

GatewayConfig GatewayConfig::from_env() {
    GatewayConfig cfg;
    if (const char* e = std::getenv("HYGRAPH_LLM_ENDPOINT")) cfg.endpoint = e;
    if (const char* k = std::getenv("HYGRAPH_LLM_API_KEY")) cfg.api_key = k;
    if (const char* d = std::getenv("HYGRAPH_CACHE_DIR")) cfg.cache_dir = d;
    return cfg;
}

// ---- transports --------------------------------------------------------

namespace {

struct UrlParts {
    std::string scheme_host; // e.g. https://api.openai.com:443
    std::string path;
};

UrlParts split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw GatewayError("endpoint missing scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

TransportResponse HttpTransport::send(const TransportRequest& req) {
    UrlParts parts = split_url(req.url);
    httplib::Client client(parts.scheme_host);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers;
    for (const auto& [k, v] : req.headers) headers.emplace(k, v);
    auto res = client.Post(parts.path, headers, req.body, "application/json");
    if (!res) {
        std::ostringstream os;
        os << "transport error for " << req.url << ": " << httplib::to_string(res.error());
        throw GatewayError(os.str());
    }
    return {res->status, res->body};
}

TransportResponse CountingTransport::send(const TransportRequest& req) {
    calls_.fetch_add(1);
    if (!inner_) throw GatewayError("counting transport has no inner transport");
    return inner_->send(req);
}

// ---- gateway -----------------------------------------------------------

LlmGateway::LlmGateway(GatewayConfig cfg, std::shared_ptr<Transport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
    if (!transport_) transport_ = std::make_shared<HttpTransport>();
    tokenizer_ = make_tokenizer(cfg_.tokenizer);
    if (cfg_.mode != GatewayMode::live && cfg_.cache_dir.empty())
        throw GatewayError("cache_dir is required in record/replay mode");
}

std::string LlmGateway::cache_key(const LlmRequest& req) {
    std::string material = req.model;
    material.push_back('\x1f');
    material += format_temperature(req.temperature);
    material.push_back('\x1f');
    material += req.prompt;
    return sha256_hex(material);
}

std::string LlmGateway::cache_path(const std::string& key) const {
    return (fs::path(cfg_.cache_dir) / key.substr(0, 2) / (key + ".json")).string();
}

static LlmExchange exchange_from_json(const json& j) {
    LlmExchange ex;
    ex.request.purpose = purpose_from_string(j.at("purpose").get<std::string>());
    ex.request.model = j.at("model").get<std::string>();
    ex.request.temperature = j.at("temperature").get<double>();
    ex.request.prompt = j.at("prompt").get<std::string>();
    ex.response = j.at("response").get<std::string>();
    ex.prompt_tokens = j.at("prompt_tokens").get<size_t>();
    ex.completion_tokens = j.at("completion_tokens").get<size_t>();
    return ex;
}

static ordered_json exchange_to_json(const LlmExchange& ex) {
    return ordered_json{{"purpose", to_string(ex.request.purpose)},
                        {"model", ex.request.model},
                        {"temperature", ex.request.temperature},
                        {"prompt", ex.request.prompt},
                        {"response", ex.response},
                        {"prompt_tokens", ex.prompt_tokens},
                        {"completion_tokens", ex.completion_tokens}};
}

LlmExchange LlmGateway::call_network(const LlmRequest& req) {
    ordered_json body{{"model", req.model},
                      {"temperature", req.temperature},
                      {"messages", ordered_json::array({ordered_json{{"role", "user"}, {"content", req.prompt}}})}};
    TransportRequest treq;
    treq.url = cfg_.endpoint + "/chat/completions";
    treq.headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);
    treq.headers.emplace_back("x-purpose", to_string(req.purpose));
    treq.body = body.dump();

    std::string last_error;
    for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
        if (attempt > 1)
            std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.backoff_ms * (1 << (attempt - 2))));
        bool sent = false;
        TransportResponse res;
        try {
            stats_.network_calls.fetch_add(1);
            res = transport_->send(treq);
            sent = true;
        } catch (const GatewayError& e) {
            last_error = e.what();
        }
        if (!sent) continue;
        if (res.status == 429 || res.status >= 500) {
            last_error = "endpoint returned HTTP " + std::to_string(res.status);
            continue;
        }
        if (res.status != 200) // other 4xx will not improve with retries
            throw GatewayError("endpoint returned HTTP " + std::to_string(res.status) + ": " + res.body);
        try {
            json j = json::parse(res.body);
            LlmExchange ex;
            ex.request = req;
            ex.response = j.at("choices").at(0).at("message").at("content").get<std::string>();
            if (j.contains("usage")) {
                ex.prompt_tokens = j["usage"].value("prompt_tokens", size_t{0});
                ex.completion_tokens = j["usage"].value("completion_tokens", size_t{0});
            }
            if (ex.prompt_tokens == 0) ex.prompt_tokens = tokenizer_->count(req.prompt);
            if (ex.completion_tokens == 0 && !ex.response.empty())
                ex.completion_tokens = tokenizer_->count(ex.response);
            return ex;
        } catch (const json::exception& e) {
            last_error = std::string("bad response body: ") + e.what();
        }
    }
    throw GatewayError("giving up after " + std::to_string(cfg_.max_attempts) + " attempts: " + last_error);
}

LlmExchange LlmGateway::complete(const LlmRequest& req) {
    stats_.requests.fetch_add(1);
    if (cfg_.mode == GatewayMode::live) return call_network(req);

    const std::string key = cache_key(req);
    const fs::path path = cache_path(key);
    {
        std::ifstream in(path);
        if (in) {
            json j = json::parse(in);
            LlmExchange ex = exchange_from_json(j);
            ex.from_cache = true;
            stats_.cache_hits.fetch_add(1);
            return ex;
        }
    }
    if (cfg_.mode == GatewayMode::replay)
        throw GatewayError("replay miss for purpose " + std::string(to_string(req.purpose)) +
                               " (model " + req.model + "): no cache entry " + key,
                           key);

    LlmExchange ex = call_network(req);
    fs::create_directories(path.parent_path());
    // Write-then-rename keeps concurrent readers from seeing partial files.
    static std::atomic<uint64_t> seq{0};
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(seq.fetch_add(1));
    {
        std::ofstream out(tmp);
        if (!out) throw GatewayError("cannot write cache file " + tmp.string());
        out << exchange_to_json(ex).dump(2) << '\n';
    }
    fs::rename(tmp, path);
    return ex;
}

} // namespace hygraph
