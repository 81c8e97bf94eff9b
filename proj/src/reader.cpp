#include "hygraph/reader.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <set>

#include "hygraph/prompts.hpp"
#include "hygraph/question_analysis.hpp"
#include "hygraph/text.hpp"

namespace hygraph {

RunMode run_mode_from_string(std::string_view s) {
    if (s == "odyssey_hopwise") return RunMode::odyssey_hopwise;
    if (s == "odyssey_flat") return RunMode::odyssey_flat;
    if (s == "base") return RunMode::base;
    if (s == "full_context") return RunMode::full_context;
    if (s == "summarized_text") return RunMode::summarized_text;
    if (s == "summarized_both") return RunMode::summarized_both;
    if (s == "complete_graph") return RunMode::complete_graph;
    throw std::invalid_argument("unknown run mode: " + std::string(s));
}

const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::odyssey_hopwise: return "odyssey_hopwise";
        case RunMode::odyssey_flat: return "odyssey_flat";
        case RunMode::base: return "base";
        case RunMode::full_context: return "full_context";
        case RunMode::summarized_text: return "summarized_text";
        case RunMode::summarized_both: return "summarized_both";
        case RunMode::complete_graph: return "complete_graph";
    }
    return "?";
}

std::string hop_label(int hop) {
    if (hop == 0) return "none";
    if (hop == kHopFull) return "full";
    if (hop == kHopSingle) return "single";
    return std::to_string(hop);
}

std::string linearize_table(const std::vector<std::string>& headers,
                            const std::vector<std::vector<std::string>>& rows) {
    auto join_row = [](const std::vector<std::string>& cells) {
        std::string line = "|";
        for (const auto& c : cells) {
            line += ' ';
            line += c;
            line += " |";
        }
        return line;
    };
    std::string out = join_row(headers);
    out += '\n';
    out += "|";
    for (size_t i = 0; i < headers.size(); ++i) out += " --- |";
    for (const auto& row : rows) {
        out += '\n';
        out += join_row(row);
    }
    return out;
}

std::string render_passages(const std::vector<std::pair<std::string, std::string>>& passages) {
    if (passages.empty()) return "None.";
    std::string out;
    for (const auto& [title, text] : passages) {
        if (!out.empty()) out += "\n\n";
        out += "Passage '" + title + "':\n" + text;
    }
    return out;
}

namespace {

size_t ifind_last(const std::string& hay, const std::string& needle) {
    size_t found = std::string::npos;
    for (size_t pos = 0;;) {
        auto it = std::search(hay.begin() + pos, hay.end(), needle.begin(), needle.end(),
                              [](char a, char b) {
                                  return std::tolower(static_cast<unsigned char>(a)) ==
                                         std::tolower(static_cast<unsigned char>(b));
                              });
        if (it == hay.end()) break;
        found = static_cast<size_t>(it - hay.begin());
        pos = found + 1;
    }
    return found;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool payload_is_none(const std::string& payload) {
    std::string bare;
    for (unsigned char c : payload)
        if (std::isalnum(c)) bare.push_back(static_cast<char>(std::tolower(c)));
    return bare == "none";
}

} // namespace

ParsedReply parse_reader_reply(const std::string& text) {
    ParsedReply out;
    const std::string marker = "Final Answer:";
    size_t pos = ifind_last(text, marker);
    if (pos == std::string::npos) return out; // unanswerable reply -> None
    size_t start = pos + marker.size();
    size_t eol = text.find('\n', start);
    std::string payload = trim(text.substr(start, eol == std::string::npos ? std::string::npos
                                                                           : eol - start));
    if (payload.empty() || payload_is_none(payload)) {
        out.is_none = true;
        try {
            out.relevant_passages = parse_labeled_list(text, "Relevant Passages:");
        } catch (const AnalysisParseError&) {
            // no list given; carry nothing
        }
        return out;
    }
    out.answer = payload;
    out.is_none = false;
    return out;
}

namespace {

// True when `name` from the model matches a document title: normalized
// equality first, then containment either way.
bool passage_name_matches(const std::string& name, const Document& doc) {
    std::string n = normalize_text(name);
    if (n.empty()) return false;
    std::string title = normalize_text(doc.title.empty() ? doc.doc_id : doc.title);
    if (n == title) return true;
    if (title.find(n) != std::string::npos || n.find(title) != std::string::npos) return true;
    std::string id = normalize_text(doc.doc_id);
    return n == id;
}

void finish_context(ReaderContext& ctx, const Tokenizer& tokenizer) {
    ctx.table_data = linearize_table(ctx.headers, ctx.rows);
    ctx.passages_text = render_passages(ctx.passages);
    ctx.token_estimate = tokenizer.count(ctx.table_data) + tokenizer.count(ctx.passages_text);
}

// Shared shape of hop-k and union contexts: rows touched by visited cells,
// passages linked from visited cells.
ReaderContext pruned_context(const TableTextInstance& inst, const HybridGraph& g,
                             const HopDictionary& hd, int k,
                             const std::vector<std::string>& carried_passages,
                             const Tokenizer& tokenizer) {
    ReaderContext ctx;
    ctx.hop_level = k;
    ctx.headers = g.sub_table_headers;

    std::set<int> visited_rows;
    std::set<std::string> visited_doc_ids;
    for (const auto& [node, dist] : hd.distance) {
        if (dist > k || node.kind != NodeKind::cell) continue;
        const NodePayload& p = g.nodes.at(node);
        visited_rows.insert(p.row);
        const Cell& cell = inst.table.at(p.row, p.col);
        for (const auto& id : cell.linked_doc_ids) visited_doc_ids.insert(id);
    }
    for (int r : visited_rows) {
        std::vector<std::string> row;
        for (int c : g.sub_table_columns) row.push_back(inst.table.at(r, c).text);
        ctx.rows.push_back(std::move(row));
    }
    for (const auto& id : visited_doc_ids) {
        const Document& doc = inst.documents.at(id);
        if (!carried_passages.empty()) {
            bool kept = std::any_of(carried_passages.begin(), carried_passages.end(),
                                    [&](const std::string& name) { return passage_name_matches(name, doc); });
            if (!kept) continue;
        }
        ctx.passages.emplace_back(doc.title.empty() ? doc.doc_id : doc.title, doc.text);
    }
    finish_context(ctx, tokenizer);
    return ctx;
}

LlmExchange reader_call(const ReaderContext& ctx, const TableTextInstance& inst, CompletionService& gw,
                        const ReaderOptions& opt, std::string_view tmpl,
                        Purpose purpose = Purpose::reader) {
    LlmRequest req;
    req.purpose = purpose;
    req.model = opt.model;
    req.temperature = opt.temperature;
    req.prompt = prompts::render(tmpl, {{"table_data", ctx.table_data},
                                        {"passages", ctx.passages_text},
                                        {"question", inst.question}});
    return gw.complete(req);
}

std::shared_ptr<Tokenizer> tokenizer_or_default(const ReaderOptions& opt) {
    return opt.tokenizer ? opt.tokenizer : make_tokenizer("heuristic");
}

} // namespace

ReaderContext build_hop_context(const TableTextInstance& inst, const HybridGraph& g,
                                const HopDictionary& hd, int k,
                                const std::vector<std::string>& carried_passages,
                                const Tokenizer& tokenizer) {
    if (k < 1) throw std::invalid_argument("hop level must be >= 1");
    return pruned_context(inst, g, hd, k, carried_passages, tokenizer);
}

ReaderContext build_full_context(const TableTextInstance& inst, const Tokenizer& tokenizer) {
    ReaderContext ctx;
    ctx.hop_level = kHopFull;
    ctx.headers = inst.table.headers;
    for (const auto& row : inst.table.rows) {
        std::vector<std::string> cells;
        for (const auto& cell : row.cells) cells.push_back(cell.text);
        ctx.rows.push_back(std::move(cells));
    }
    for (const auto& [id, doc] : inst.documents)
        ctx.passages.emplace_back(doc.title.empty() ? id : doc.title, doc.text);
    finish_context(ctx, tokenizer);
    return ctx;
}

ReaderContext build_union_context(const TableTextInstance& inst, const HybridGraph& g,
                                  const HopDictionary& hd, int max_hops, const Tokenizer& tokenizer) {
    ReaderContext ctx = pruned_context(inst, g, hd, max_hops, {}, tokenizer);
    ctx.hop_level = kHopSingle;
    return ctx;
}

ReaderOutcome answer_hopwise(const TableTextInstance& inst, const HybridGraph& g,
                             const HopDictionary& hd, CompletionService& gw, const ReaderOptions& opt) {
    auto tokenizer = tokenizer_or_default(opt);
    ReaderOutcome out;
    std::vector<std::string> carried;
    for (int k = 1; k <= opt.max_hops; ++k) {
        ReaderContext ctx = build_hop_context(inst, g, hd, k, carried, *tokenizer);
        LlmExchange ex = reader_call(ctx, inst, gw, opt, prompts::reader_main());
        ParsedReply reply = parse_reader_reply(ex.response);
        out.exchanges.push_back(std::move(ex));
        if (!reply.is_none) {
            out.answer = reply.answer;
            out.is_none = false;
            out.hop_answered = k;
            return out;
        }
        out.relevant_passages = reply.relevant_passages;
        carried = reply.relevant_passages; // empty list = carry everything
    }
    ReaderContext full = build_full_context(inst, *tokenizer);
    LlmExchange ex = reader_call(full, inst, gw, opt, prompts::reader_main());
    ParsedReply reply = parse_reader_reply(ex.response);
    out.exchanges.push_back(std::move(ex));
    out.full_context_used = true;
    if (!reply.is_none) {
        out.answer = reply.answer;
        out.is_none = false;
        out.hop_answered = kHopFull;
    } else {
        out.relevant_passages = reply.relevant_passages;
    }
    return out;
}

ReaderOutcome answer_full_fallback(const TableTextInstance& inst, CompletionService& gw,
                                   const ReaderOptions& opt) {
    auto tokenizer = tokenizer_or_default(opt);
    ReaderOutcome out;
    ReaderContext full = build_full_context(inst, *tokenizer);
    LlmExchange ex = reader_call(full, inst, gw, opt, prompts::reader_main());
    ParsedReply reply = parse_reader_reply(ex.response);
    out.exchanges.push_back(std::move(ex));
    out.full_context_used = true;
    if (!reply.is_none) {
        out.answer = reply.answer;
        out.is_none = false;
        out.hop_answered = kHopFull;
    }
    return out;
}

ReaderOutcome answer_no_hopwise(const TableTextInstance& inst, const HybridGraph& g,
                                const HopDictionary& hd, CompletionService& gw, const ReaderOptions& opt) {
    auto tokenizer = tokenizer_or_default(opt);
    if (hd.seeds.empty()) return answer_full_fallback(inst, gw, opt);
    ReaderOutcome out;
    ReaderContext ctx = build_union_context(inst, g, hd, opt.max_hops, *tokenizer);
    LlmExchange ex = reader_call(ctx, inst, gw, opt, prompts::reader_main());
    ParsedReply reply = parse_reader_reply(ex.response);
    out.exchanges.push_back(std::move(ex));
    if (!reply.is_none) {
        out.answer = reply.answer;
        out.is_none = false;
        out.hop_answered = kHopSingle;
    } else {
        out.relevant_passages = reply.relevant_passages;
    }
    return out;
}

namespace {

LlmExchange summarize_call(Purpose purpose, const std::string& prompt, CompletionService& gw,
                           const ReaderOptions& opt) {
    LlmRequest req;
    req.purpose = purpose;
    req.model = opt.model;
    req.temperature = opt.temperature;
    req.prompt = prompt;
    return gw.complete(req);
}

} // namespace

ReaderOutcome answer_baseline(const TableTextInstance& inst, RunMode mode, CompletionService& gw,
                              const ReaderOptions& opt, const HybridGraph* full_graph) {
    auto tokenizer = tokenizer_or_default(opt);
    ReaderOutcome out;

    if (mode == RunMode::base) {
        LlmRequest req;
        req.purpose = Purpose::baseline;
        req.model = opt.model;
        req.temperature = opt.temperature;
        req.prompt = prompts::render(prompts::reader_question_only(), {{"question", inst.question}});
        LlmExchange ex = gw.complete(req);
        ParsedReply reply = parse_reader_reply(ex.response);
        out.exchanges.push_back(std::move(ex));
        if (!reply.is_none) {
            out.answer = reply.answer;
            out.is_none = false;
            out.hop_answered = kHopSingle;
        }
        return out;
    }

    ReaderContext ctx = build_full_context(inst, *tokenizer);

    if (mode == RunMode::summarized_text || mode == RunMode::summarized_both) {
        std::vector<std::pair<std::string, std::string>> summarized;
        for (const auto& [title, text] : ctx.passages) {
            auto prompt = prompts::render(prompts::summarize_passage(), {{"text", text}});
            LlmExchange ex = summarize_call(Purpose::summarize_text, prompt, gw, opt);
            summarized.emplace_back(title, trim(ex.response));
            out.exchanges.push_back(std::move(ex));
        }
        ctx.passages = std::move(summarized);
        if (mode == RunMode::summarized_both) {
            auto prompt = prompts::render(prompts::summarize_table(), {{"table", ctx.table_data}});
            LlmExchange ex = summarize_call(Purpose::summarize_table, prompt, gw, opt);
            ctx.table_data = trim(ex.response);
            out.exchanges.push_back(std::move(ex));
            ctx.passages_text = render_passages(ctx.passages);
            ctx.token_estimate = tokenizer->count(ctx.table_data) + tokenizer->count(ctx.passages_text);
        } else {
            finish_context(ctx, *tokenizer);
        }
    } else if (mode == RunMode::complete_graph) {
        // The whole unpruned graph, serialized; no separate passage block.
        if (!full_graph)
            throw std::invalid_argument("complete_graph mode needs the assembled graph");
        ctx.table_data = graph_to_json(*full_graph).dump(2);
        ctx.passages.clear();
        ctx.passages_text = "Included in the graph above.";
        ctx.token_estimate = tokenizer->count(ctx.table_data) + tokenizer->count(ctx.passages_text);
    } else if (mode != RunMode::full_context) {
        throw std::invalid_argument(std::string("not a baseline mode: ") + to_string(mode));
    }

    LlmExchange ex = reader_call(ctx, inst, gw, opt, prompts::reader_baseline(), Purpose::baseline);
    ParsedReply reply = parse_reader_reply(ex.response);
    out.exchanges.push_back(std::move(ex));
    if (!reply.is_none) {
        out.answer = reply.answer;
        out.is_none = false;
        out.hop_answered = kHopSingle;
    }
    return out;
}

} // namespace hygraph
