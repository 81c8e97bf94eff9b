#include "hygraph/runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace hygraph {

void RunConfig::merge_json(const json& j) {
    auto s = [&](const char* key, std::string& field) {
        if (j.contains(key)) field = j.at(key).get<std::string>();
    };
    s("corpus_path", corpus_path);
    s("corpus_format", corpus_format);
    if (j.contains("sample_size")) sample_size = j.at("sample_size").get<int>();
    if (j.contains("seed")) seed = j.at("seed").get<uint64_t>();
    s("mode", mode);
    s("analysis_model", analysis_model);
    s("reader_model", reader_model);
    if (j.contains("temperature")) temperature = j.at("temperature").get<double>();
    if (j.contains("threshold")) threshold = j.at("threshold").get<double>();
    if (j.contains("max_hops")) max_hops = j.at("max_hops").get<int>();
    s("gateway_mode", gateway_mode);
    s("cache_dir", cache_dir);
    s("endpoint", endpoint);
    s("api_key", api_key);
    s("tokenizer", tokenizer);
    s("ner_provider", ner_provider);
    s("ner_endpoint", ner_endpoint);
    s("similarity", similarity);
    s("embed_endpoint", embed_endpoint);
    if (j.contains("parallelism")) parallelism = j.at("parallelism").get<int>();
    s("out_dir", out_dir);
    if (j.contains("usd_per_million_input"))
        usd_per_million_input = j.at("usd_per_million_input").get<double>();
}

void RunConfig::merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    merge_json(json::parse(in));
}

ordered_json RunConfig::to_json() const {
    return ordered_json{{"corpus_path", corpus_path},
                        {"corpus_format", corpus_format},
                        {"sample_size", sample_size},
                        {"seed", seed},
                        {"mode", mode},
                        {"analysis_model", analysis_model},
                        {"reader_model", reader_model},
                        {"temperature", temperature},
                        {"threshold", threshold},
                        {"max_hops", max_hops},
                        {"gateway_mode", gateway_mode},
                        {"cache_dir", cache_dir},
                        {"endpoint", endpoint},
                        {"tokenizer", tokenizer},
                        {"ner_provider", ner_provider},
                        {"ner_endpoint", ner_endpoint},
                        {"similarity", similarity},
                        {"embed_endpoint", embed_endpoint},
                        {"parallelism", parallelism},
                        {"out_dir", out_dir},
                        {"usd_per_million_input", usd_per_million_input}};
}

PipelineOptions RunConfig::pipeline_options() const {
    PipelineOptions opt;
    opt.mode = run_mode_from_string(mode);
    opt.analysis.model = analysis_model;
    opt.analysis.temperature = temperature;
    opt.reader.model = reader_model;
    opt.reader.temperature = temperature;
    opt.reader.max_hops = max_hops;
    opt.reader.tokenizer = make_tokenizer(tokenizer);
    opt.ner.provider = ner_provider_from_string(ner_provider);
    opt.ner.model = analysis_model;
    opt.ner.temperature = temperature;
    opt.ner.endpoint = ner_endpoint;
    opt.threshold = threshold;
    opt.similarity = make_similarity_provider(similarity, embed_endpoint);
    return opt;
}

GatewayConfig RunConfig::gateway_config() const {
    GatewayConfig cfg = GatewayConfig::from_env();
    cfg.mode = gateway_mode_from_string(gateway_mode);
    if (!endpoint.empty()) cfg.endpoint = endpoint;
    if (!api_key.empty()) cfg.api_key = api_key;
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    cfg.tokenizer = tokenizer;
    return cfg;
}

std::vector<size_t> sample_indices(size_t n, size_t k, uint64_t seed) {
    std::vector<size_t> indices(n);
    std::iota(indices.begin(), indices.end(), size_t{0});
    if (k >= n) return indices;
    std::mt19937_64 rng(seed);
    // Rejection sampling keeps the draw uniform and platform-independent
    // (std::uniform_int_distribution is implementation-defined).
    auto draw = [&rng](uint64_t bound) {
        const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                               std::numeric_limits<uint64_t>::max() % bound;
        uint64_t r;
        do {
            r = rng();
        } while (r >= limit);
        return r % bound;
    };
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + static_cast<size_t>(draw(n - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(k);
    std::sort(indices.begin(), indices.end());
    return indices;
}

RunOutput run_pipeline(const std::vector<TableTextInstance>& corpus, const RunConfig& cfg,
                       LlmGateway& gateway) {
    RunOutput out;
    size_t want = cfg.sample_size < 0 ? corpus.size() : static_cast<size_t>(cfg.sample_size);
    out.selected = sample_indices(corpus.size(), want, cfg.seed);
    out.results.resize(out.selected.size());

    const PipelineOptions popt = cfg.pipeline_options();
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= out.selected.size()) break;
            out.results[i] = run_instance(corpus[out.selected[i]], gateway, popt);
        }
    };
    int threads = std::max(1, cfg.parallelism);
    if (threads == 1 || out.selected.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (const auto& r : out.results) {
        if (!r.error.empty()) {
            ++out.error_count;
            if (!r.missing_cache_key.empty()) out.missing_cache_keys.push_back(r.missing_cache_key);
            continue;
        }
        out.rows.push_back(to_score_row(r));
    }
    std::sort(out.missing_cache_keys.begin(), out.missing_cache_keys.end());
    out.missing_cache_keys.erase(
        std::unique(out.missing_cache_keys.begin(), out.missing_cache_keys.end()),
        out.missing_cache_keys.end());
    if (!out.rows.empty()) out.report = make_report(out.rows, cfg.usd_per_million_input);
    out.exit_code = !out.missing_cache_keys.empty() ? 3 : (out.error_count ? 1 : 0);
    return out;
}

namespace {

ordered_json report_to_json(const RunReport& r) {
    ordered_json hopwise = ordered_json::array();
    for (const auto& pt : r.hopwise)
        hopwise.push_back(ordered_json{{"bucket", pt.bucket},
                                       {"answered", pt.answered},
                                       {"cumulative_em", pt.cumulative_em},
                                       {"se", pt.se}});
    return ordered_json{{"mode", r.mode},
                        {"n", r.n},
                        {"em", r.em},
                        {"f1", r.f1},
                        {"precision", r.precision},
                        {"recall", r.recall},
                        {"mean_reader_input_tokens", r.mean_reader_input_tokens},
                        {"mean_reader_output_tokens", r.mean_reader_output_tokens},
                        {"mean_total_input_tokens", r.mean_total_input_tokens},
                        {"est_cost_usd", r.est_cost_usd},
                        {"full_context_count", r.full_context_count},
                        {"hopwise", std::move(hopwise)}};
}

ordered_json record_json(const TableTextInstance& inst, const InstanceResult& r) {
    ordered_json rec;
    rec["question_id"] = r.question_id;
    rec["mode"] = to_string(r.mode);
    if (!r.error.empty()) {
        rec["error"] = r.error;
        if (!r.missing_cache_key.empty()) rec["missing_cache_key"] = r.missing_cache_key;
    }
    rec["answer"] = r.outcome.answer;
    rec["hop_answered"] = hop_label(r.outcome.hop_answered);
    rec["full_context_used"] = r.outcome.full_context_used;
    rec["gold"] = inst.gold_answers;
    if (r.scored) {
        rec["em"] = r.answer_score.em;
        rec["f1"] = r.answer_score.f1;
        rec["precision"] = r.answer_score.precision;
        rec["recall"] = r.answer_score.recall;
    }
    if (r.mode == RunMode::odyssey_hopwise || r.mode == RunMode::odyssey_flat) {
        rec["entities"] = r.analysis.entities;
        rec["relevant_headers"] = r.analysis.relevant_headers;
        ordered_json mapping = ordered_json::object();
        for (const auto& e : r.analysis.entities) {
            auto it = r.analysis.entity_header_map.find(e);
            mapping[e] = it != r.analysis.entity_header_map.end() ? it->second
                                                                  : std::vector<std::string>{};
        }
        rec["entity_header_map"] = std::move(mapping);
        ordered_json matches = ordered_json::array();
        for (const auto& m : r.matches) {
            ordered_json jm{{"entity", m.question_entity},
                            {"score", m.score},
                            {"space", to_string(m.search_space)}};
            if (m.matched_node) {
                jm["node_kind"] = to_string(m.matched_node->kind);
                jm["node_key"] = m.matched_node->key;
            }
            matches.push_back(std::move(jm));
        }
        rec["matches"] = std::move(matches);
        if (!r.hop_dict.is_null()) rec["hops"] = r.hop_dict;
    }
    ordered_json exchanges = ordered_json::array();
    for (const auto& ex : r.exchanges)
        exchanges.push_back(ordered_json{{"purpose", to_string(ex.request.purpose)},
                                         {"key", LlmGateway::cache_key(ex.request)},
                                         {"prompt_tokens", ex.prompt_tokens},
                                         {"completion_tokens", ex.completion_tokens},
                                         {"from_cache", ex.from_cache}});
    rec["exchanges"] = std::move(exchanges);
    return rec;
}

} // namespace

void write_run_artifacts(const std::vector<TableTextInstance>& corpus, const RunOutput& out,
                         const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);

    std::ofstream records(dir / "records.jsonl", std::ios::trunc);
    for (size_t i = 0; i < out.results.size(); ++i)
        records << record_json(corpus[out.selected[i]], out.results[i]).dump() << '\n';

    ordered_json top{{"config", cfg.to_json()}};
    if (!out.rows.empty()) top["report"] = report_to_json(out.report);
    top["errors"] = out.error_count;
    top["missing_cache_keys"] = out.missing_cache_keys;
    std::ofstream(dir / "report.json", std::ios::trunc) << top.dump(2) << '\n';

    if (!out.rows.empty()) {
        std::ofstream(dir / "report.md", std::ios::trunc) << report_markdown({out.report});
        std::ofstream(dir / "hopwise.csv", std::ios::trunc) << hopwise_csv(out.report);
    }
}

RunOutput execute_run(const RunConfig& cfg) {
    auto corpus = load_corpus(cfg.corpus_path, corpus_format_from_string(cfg.corpus_format));
    for (const auto& inst : corpus) validate_instance(inst);
    LlmGateway gateway(cfg.gateway_config());
    RunOutput out = run_pipeline(corpus, cfg, gateway);
    write_run_artifacts(corpus, out, cfg);
    if (!out.missing_cache_keys.empty()) {
        std::cerr << "replay misses (" << out.missing_cache_keys.size() << " cache keys):\n";
        for (const auto& k : out.missing_cache_keys) std::cerr << "  " << k << '\n';
    }
    return out;
}

} // namespace hygraph
