#include "hygraph/pipeline.hpp"

#include <algorithm>
#include <set>

namespace hygraph {

namespace {

std::function<std::vector<DocEntity>(const Document&)> make_ner_fn(const NerOptions& opt,
                                                                   CompletionService* gw) {
    return [opt, gw](const Document& doc) { return extract_doc_entities(doc, opt, gw); };
}

HybridGraph build_graph(const TableTextInstance& inst, const std::vector<std::string>& headers,
                        const EntityDocFragment& fragment) {
    SubTable sub = retrieve_sub_table(inst.table, headers);
    return assemble_hybrid_graph(sub, fragment, inst);
}

void run_odyssey(const TableTextInstance& inst, CompletionService& gw, const PipelineOptions& opt,
                 InstanceResult& result) {
    result.analysis = analyze(inst, gw, opt.analysis);

    EntityDocFragment fragment = build_entity_document_graph(inst.documents,
                                                            make_ner_fn(opt.ner, &gw));
    HybridGraph g = build_graph(inst, result.analysis.relevant_headers, fragment);

    auto similarity = opt.similarity ? opt.similarity : std::make_shared<LexicalFallback>();
    result.matches = semantic_match(result.analysis, g, inst.table, *similarity, opt.threshold);

    // Expanded matching can land on columns outside the sub-table; widen the
    // header selection once and rebuild so those cells become graph nodes.
    std::set<int> selected(g.sub_table_columns.begin(), g.sub_table_columns.end());
    std::vector<std::string> widened = result.analysis.relevant_headers;
    bool rebuild = false;
    for (const auto& m : result.matches) {
        if (!m.matched_node || m.matched_node->kind != NodeKind::cell) continue;
        if (m.search_space != SearchSpace::expanded_all_columns) continue;
        // cell key is "r{row}:h{col}"
        int col = std::stoi(m.matched_node->key.substr(m.matched_node->key.find(":h") + 2));
        if (!selected.count(col)) {
            widened.push_back(inst.table.headers.at(static_cast<size_t>(col)));
            selected.insert(col);
            rebuild = true;
        }
    }
    if (rebuild) {
        g = build_graph(inst, widened, fragment);
        result.matches = semantic_match(result.analysis, g, inst.table, *similarity, opt.threshold);
    }

    std::vector<NodeId> seeds;
    for (const auto& m : result.matches)
        if (m.matched_node && g.nodes.count(*m.matched_node)) seeds.push_back(*m.matched_node);
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

    if (seeds.empty()) {
        // Nothing matched anywhere: whole instance as context.
        result.outcome = answer_full_fallback(inst, gw, opt.reader);
        return;
    }

    HopDictionary hd = bfs_prune(g, seeds, opt.reader.max_hops);
    result.hop_dict = hop_dictionary_to_json(hd);
    result.outcome = opt.mode == RunMode::odyssey_hopwise
                         ? answer_hopwise(inst, g, hd, gw, opt.reader)
                         : answer_no_hopwise(inst, g, hd, gw, opt.reader);
}

} // namespace

InstanceResult run_instance(const TableTextInstance& inst, CompletionService& gw,
                            const PipelineOptions& opt) {
    InstanceResult result;
    result.question_id = inst.question_id;
    result.mode = opt.mode;
    CollectingSession session(gw);
    try {
        switch (opt.mode) {
            case RunMode::odyssey_hopwise:
            case RunMode::odyssey_flat:
                run_odyssey(inst, session, opt, result);
                break;
            case RunMode::complete_graph: {
                EntityDocFragment fragment =
                    build_entity_document_graph(inst.documents, make_ner_fn(opt.ner, &session));
                HybridGraph g = build_graph(inst, inst.table.headers, fragment);
                result.outcome = answer_baseline(inst, opt.mode, session, opt.reader, &g);
                break;
            }
            default:
                result.outcome = answer_baseline(inst, opt.mode, session, opt.reader);
                break;
        }
        if (!inst.gold_answers.empty()) {
            result.answer_score = score(result.outcome.answer, inst.gold_answers);
            result.scored = true;
        }
    } catch (const GatewayError& e) {
        result.error = e.what();
        result.missing_cache_key = e.cache_key;
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    result.exchanges = std::move(session.exchanges);
    return result;
}

ScoreRow to_score_row(const InstanceResult& result) {
    ScoreRow row;
    row.question_id = result.question_id;
    row.mode = to_string(result.mode);
    row.em = result.answer_score.em;
    row.f1 = result.answer_score.f1;
    row.precision = result.answer_score.precision;
    row.recall = result.answer_score.recall;
    row.hop_answered = hop_label(result.outcome.hop_answered);
    row.full_context_used = result.outcome.full_context_used;
    for (const auto& ex : result.exchanges) {
        row.total_input_tokens += ex.prompt_tokens;
        row.total_output_tokens += ex.completion_tokens;
        if (ex.request.purpose == Purpose::reader || ex.request.purpose == Purpose::baseline) {
            row.reader_input_tokens += ex.prompt_tokens;
            row.reader_output_tokens += ex.completion_tokens;
        }
    }
    return row;
}

} // namespace hygraph
