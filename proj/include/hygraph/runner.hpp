#pragma once
// Batch evaluation driver: sample a corpus, fan instances across workers,
// score, and write the run artifacts (records.jsonl, report.json,
// report.md, hopwise.csv). Artifacts carry no timestamps so a replayed run
// is byte-identical.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hygraph/corpus.hpp"
#include "hygraph/pipeline.hpp"

namespace hygraph {

struct RunConfig {
    std::string corpus_path;
    std::string corpus_format = "native";
    int sample_size = -1; // -1 = whole corpus
    uint64_t seed = 13;
    std::string mode = "odyssey_hopwise";
    std::string analysis_model = "gpt-3.5-turbo-1106";
    std::string reader_model = "gpt-4-1106-preview";
    double temperature = 0.0;
    double threshold = 0.8;
    int max_hops = 3;
    std::string gateway_mode = "replay";
    std::string cache_dir;
    std::string endpoint; // empty = env / built-in default
    std::string api_key;
    std::string tokenizer = "heuristic";
    std::string ner_provider = "rule_ner";
    std::string ner_endpoint;
    std::string similarity = "lexical_fallback";
    std::string embed_endpoint;
    int parallelism = 1;
    std::string out_dir = "results";
    double usd_per_million_input = 10.0;

    // Layering: defaults, then a config file, then CLI flags.
    void merge_json(const nlohmann::json& j);
    void merge_file(const std::string& path);
    nlohmann::ordered_json to_json() const;

    PipelineOptions pipeline_options() const;
    GatewayConfig gateway_config() const;
};

// Uniform k-of-n without replacement; portable partial Fisher-Yates on a
// fixed generator, so a seed means the same sample on every platform.
// Returned indices are ascending. k >= n selects everything.
std::vector<size_t> sample_indices(size_t n, size_t k, uint64_t seed);

struct RunOutput {
    std::vector<size_t> selected; // corpus indices, aligned with results
    std::vector<InstanceResult> results;
    std::vector<ScoreRow> rows;   // non-error instances only
    RunReport report;             // valid iff !rows.empty()
    std::vector<std::string> missing_cache_keys;
    size_t error_count = 0;
    int exit_code = 0; // 0 ok, 1 instance errors, 3 replay misses
};

RunOutput run_pipeline(const std::vector<TableTextInstance>& corpus, const RunConfig& cfg,
                       LlmGateway& gateway);

void write_run_artifacts(const std::vector<TableTextInstance>& corpus, const RunOutput& out,
                         const RunConfig& cfg);

// Load + validate corpus, build the gateway, run, write artifacts.
RunOutput execute_run(const RunConfig& cfg);

} // namespace hygraph
