// hygraph command line: ingest datasets, run evaluations, record replay
// fixtures against a scripted model, compare result directories.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hygraph/corpus.hpp"
#include "hygraph/hybrid_graph.hpp"
#include "hygraph/llm_gateway.hpp"
#include "hygraph/metrics.hpp"
#include "hygraph/ner.hpp"
#include "hygraph/runner.hpp"
#include "hygraph/scripted.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hygraph;

namespace {

// Every flag has a config-file twin; the file is merged into the defaults
// before CLI11 assigns flag values, so flags win over file over defaults.
void apply_config_file(int argc, char** argv, RunConfig& cfg) {
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) {
            cfg.merge_file(argv[i + 1]);
            return;
        }
        if (a.rfind("--config=", 0) == 0) {
            cfg.merge_file(a.substr(9));
            return;
        }
    }
}

void add_run_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--corpus", cfg.corpus_path, "corpus file or dataset directory");
    cmd->add_option("--format", cfg.corpus_format, "native | hybridqa | ottqa");
    cmd->add_option("--sample", cfg.sample_size, "instances to sample, -1 = all");
    cmd->add_option("--seed", cfg.seed, "sampling seed");
    cmd->add_option("--mode", cfg.mode,
                    "odyssey_hopwise | odyssey_flat | base | full_context | "
                    "summarized_text | summarized_both | complete_graph");
    cmd->add_option("--analysis-model", cfg.analysis_model, "model for question analysis");
    cmd->add_option("--reader-model", cfg.reader_model, "model for reading/summarizing");
    cmd->add_option("--temperature", cfg.temperature, "sampling temperature");
    cmd->add_option("--threshold", cfg.threshold, "semantic match threshold in (0,1]");
    cmd->add_option("--max-hops", cfg.max_hops, "hop budget before full-context fallback");
    cmd->add_option("--gateway-mode", cfg.gateway_mode, "live | record | replay");
    cmd->add_option("--cache-dir", cfg.cache_dir, "exchange cache (HYGRAPH_CACHE_DIR)");
    cmd->add_option("--endpoint", cfg.endpoint, "chat API base URL (HYGRAPH_LLM_ENDPOINT)");
    cmd->add_option("--api-key", cfg.api_key, "bearer token (HYGRAPH_LLM_API_KEY)");
    cmd->add_option("--tokenizer", cfg.tokenizer, "heuristic | whitespace");
    cmd->add_option("--ner", cfg.ner_provider, "rule_ner | llm_ner | external_ner");
    cmd->add_option("--ner-endpoint", cfg.ner_endpoint, "external_ner service URL");
    cmd->add_option("--similarity", cfg.similarity, "lexical_fallback | external_embed");
    cmd->add_option("--embed-endpoint", cfg.embed_endpoint, "external_embed service URL");
    cmd->add_option("--parallelism", cfg.parallelism, "worker threads");
    cmd->add_option("--out", cfg.out_dir, "results directory");
    cmd->add_option("--rate", cfg.usd_per_million_input, "USD per 1M reader input tokens");
}

RunReport load_report(const std::string& dir) {
    fs::path p = fs::path(dir) / "report.json";
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    json j = json::parse(in);
    if (!j.contains("report"))
        throw std::runtime_error(p.string() + ": run has no scored instances");
    const json& r = j["report"];
    RunReport out;
    out.mode = r.value("mode", std::string{});
    out.n = r.value("n", size_t{0});
    out.em = r.value("em", 0.0);
    out.f1 = r.value("f1", 0.0);
    out.precision = r.value("precision", 0.0);
    out.recall = r.value("recall", 0.0);
    out.mean_reader_input_tokens = r.value("mean_reader_input_tokens", 0.0);
    out.mean_reader_output_tokens = r.value("mean_reader_output_tokens", 0.0);
    out.mean_total_input_tokens = r.value("mean_total_input_tokens", 0.0);
    out.est_cost_usd = r.value("est_cost_usd", 0.0);
    out.full_context_count = r.value("full_context_count", size_t{0});
    for (const auto& h : r.value("hopwise", json::array())) {
        HopwisePoint pt;
        pt.bucket = h.value("bucket", std::string{});
        pt.answered = h.value("answered", size_t{0});
        pt.cumulative_em = h.value("cumulative_em", 0.0);
        pt.se = h.value("se", 0.0);
        out.hopwise.push_back(std::move(pt));
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& item : out) {
        size_t b = item.find_first_not_of(" \t");
        size_t e = item.find_last_not_of(" \t");
        item = b == std::string::npos ? std::string{} : item.substr(b, e - b + 1);
    }
    std::erase(out, std::string{});
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid table-text question answering over pruned graphs"};
    app.require_subcommand(1);
    int rc = 0;

    // --- ingest ---
    std::string in_path, in_format = "hybridqa", out_path = "corpus.jsonl";
    auto* ingest = app.add_subcommand("ingest", "convert a dataset into the native JSONL corpus");
    ingest->add_option("--input", in_path, "dataset path")->required();
    ingest->add_option("--format", in_format, "hybridqa | ottqa | native");
    ingest->add_option("--output", out_path, "native JSONL destination");
    ingest->callback([&] {
        try {
            auto corpus = load_corpus(in_path, corpus_format_from_string(in_format));
            for (const auto& inst : corpus) validate_instance(inst);
            save_corpus_native(corpus, out_path);
            std::cout << "wrote " << corpus.size() << " instances to " << out_path << '\n';
        } catch (const std::exception& e) {
            std::cerr << "ingest failed: " << e.what() << '\n';
            rc = 2;
        }
    });

    // --- run ---
    RunConfig run_cfg;
    std::string run_config_path;
    auto* run = app.add_subcommand("run", "evaluate a corpus in one mode");
    run->add_option("--config", run_config_path, "JSON config file; flags override its fields");
    add_run_options(run, run_cfg);
    run->callback([&] {
        try {
            RunOutput out = execute_run(run_cfg);
            if (!out.rows.empty()) {
                const RunReport& r = out.report;
                std::cout << r.mode << ": n=" << r.n << " EM=" << r.em << " F1=" << r.f1
                          << " reader_in=" << r.mean_reader_input_tokens
                          << " -> " << run_cfg.out_dir << '\n';
            }
            if (out.error_count)
                std::cerr << out.error_count << " instance(s) failed; see records.jsonl\n";
            rc = out.exit_code;
        } catch (const std::exception& e) {
            std::cerr << "run failed: " << e.what() << '\n';
            rc = 1;
        }
    });

    // --- report ---
    std::vector<std::string> report_dirs;
    std::string report_out;
    auto* rep = app.add_subcommand("report", "side-by-side comparison of result directories");
    rep->add_option("dirs", report_dirs, "results directories")->required()->expected(-1);
    rep->add_option("--out", report_out, "write markdown here instead of stdout");
    rep->callback([&] {
        try {
            std::vector<RunReport> reports;
            reports.reserve(report_dirs.size());
            for (const auto& d : report_dirs) reports.push_back(load_report(d));
            std::string md = report_markdown(reports);
            if (report_out.empty())
                std::cout << md;
            else
                std::ofstream(report_out, std::ios::trunc) << md;
        } catch (const std::exception& e) {
            std::cerr << "report failed: " << e.what() << '\n';
            rc = 1;
        }
    });

    // --- record-fixtures ---
    RunConfig rec_cfg;
    std::string rec_config_path, script_path;
    std::vector<std::string> rec_modes;
    auto* rec = app.add_subcommand("record-fixtures",
                                   "run against a scripted model, recording the exchange cache");
    rec->add_option("--config", rec_config_path, "JSON config file; flags override its fields");
    add_run_options(rec, rec_cfg);
    rec->add_option("--script", script_path, "scripted transport rules file")->required();
    rec->add_option("--modes", rec_modes, "record several modes in one invocation");
    rec->callback([&] {
        try {
            auto corpus = load_corpus(rec_cfg.corpus_path,
                                      corpus_format_from_string(rec_cfg.corpus_format));
            for (const auto& inst : corpus) validate_instance(inst);
            auto script = ScriptedTransport::from_file(script_path);
            std::vector<std::string> modes =
                rec_modes.empty() ? std::vector<std::string>{rec_cfg.mode} : rec_modes;
            const std::string out_base = rec_cfg.out_dir;
            for (const auto& m : modes) {
                RunConfig cfg = rec_cfg;
                cfg.mode = m;
                cfg.gateway_mode = "record";
                if (!out_base.empty()) cfg.out_dir = (fs::path(out_base) / m).string();
                LlmGateway gateway(cfg.gateway_config(), script);
                RunOutput out = run_pipeline(corpus, cfg, gateway);
                if (!out_base.empty()) write_run_artifacts(corpus, out, cfg);
                std::cout << m << ": " << out.results.size() << " instances, "
                          << gateway.stats().network_calls.load() << " scripted calls, "
                          << gateway.stats().cache_hits.load() << " cache hits";
                if (out.error_count) std::cout << ", " << out.error_count << " errors";
                std::cout << '\n';
                if (out.error_count) {
                    for (const auto& r : out.results)
                        if (!r.error.empty())
                            std::cerr << "  " << r.question_id << ": " << r.error << '\n';
                    rc = 1;
                }
            }
        } catch (const std::exception& e) {
            std::cerr << "record-fixtures failed: " << e.what() << '\n';
            rc = 1;
        }
    });

    // --- dump-graph ---
    std::string dg_corpus, dg_format = "native", dg_qid, dg_headers;
    size_t dg_index = 0;
    auto* dg = app.add_subcommand("dump-graph", "print one instance's hybrid graph as JSON");
    dg->add_option("--corpus", dg_corpus, "corpus path")->required();
    dg->add_option("--format", dg_format, "native | hybridqa | ottqa");
    dg->add_option("--index", dg_index, "instance index");
    dg->add_option("--question-id", dg_qid, "select by question id instead of index");
    dg->add_option("--headers", dg_headers, "comma-separated relevant headers; default all");
    dg->callback([&] {
        try {
            auto corpus = load_corpus(dg_corpus, corpus_format_from_string(dg_format));
            const TableTextInstance* inst = nullptr;
            if (!dg_qid.empty()) {
                for (const auto& c : corpus)
                    if (c.question_id == dg_qid) {
                        inst = &c;
                        break;
                    }
                if (!inst) throw std::runtime_error("no instance with question_id " + dg_qid);
            } else {
                if (dg_index >= corpus.size())
                    throw std::runtime_error("index out of range: corpus has " +
                                             std::to_string(corpus.size()) + " instances");
                inst = &corpus[dg_index];
            }
            validate_instance(*inst);
            std::vector<std::string> headers =
                dg_headers.empty() ? inst->table.headers : split_csv(dg_headers);
            SubTable sub = retrieve_sub_table(inst->table, headers);
            NerOptions nopt; // rule provider; offline by construction
            auto fragment = build_entity_document_graph(
                inst->documents, [&](const Document& d) { return extract_doc_entities(d, nopt); });
            HybridGraph g = assemble_hybrid_graph(sub, fragment, *inst);
            std::cout << graph_to_json(g).dump(2) << '\n';
        } catch (const std::exception& e) {
            std::cerr << "dump-graph failed: " << e.what() << '\n';
            rc = 1;
        }
    });

    try {
        apply_config_file(argc, argv, run_cfg);
        apply_config_file(argc, argv, rec_cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }

    CLI11_PARSE(app, argc, argv);
    return rc;
}
