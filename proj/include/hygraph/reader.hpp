#pragma once
// The answering layer. Hop-wise mode feeds the reader model growing slices
// of the pruned graph, escalating while it returns "None"; after the last
// hop the whole instance is sent. Flat mode sends the union of all hops at
// once. Baseline modes bypass the graph entirely.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hygraph/corpus.hpp"
#include "hygraph/llm_gateway.hpp"
#include "hygraph/tokenizer.hpp"
#include "hygraph/traversal.hpp"

namespace hygraph {

enum class RunMode {
    odyssey_hopwise,
    odyssey_flat,
    base,
    full_context,
    summarized_text,
    summarized_both,
    complete_graph,
};

RunMode run_mode_from_string(std::string_view s);
const char* to_string(RunMode m);

// hop_level / hop_answered encoding: 1..3 are hops, then:
inline constexpr int kHopFull = 4;   // full-instance fallback context
inline constexpr int kHopSingle = 5; // flat (single-shot) pruned context
std::string hop_label(int hop);      // 0->"none", 1..3, "full", "single"

struct ReaderContext {
    int hop_level = 1;
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> passages; // (title, text)
    std::string table_data;    // rendered for the prompt
    std::string passages_text;
    size_t token_estimate = 0;
};

struct ReaderOptions {
    std::string model = "gpt-4-1106-preview";
    double temperature = 0.0;
    int max_hops = 3;
    std::shared_ptr<Tokenizer> tokenizer; // filled with heuristic when null
};

struct ReaderOutcome {
    std::string answer = "None";
    bool is_none = true;
    std::vector<std::string> relevant_passages; // from the last "None" reply
    int hop_answered = 0;                       // 0 = never answered
    bool full_context_used = false;
    std::vector<LlmExchange> exchanges;
};

struct ParsedReply {
    std::string answer;
    bool is_none = true;
    std::vector<std::string> relevant_passages;
};

// Markdown-style pipe table; one header row, one separator, one line per row.
std::string linearize_table(const std::vector<std::string>& headers,
                            const std::vector<std::vector<std::string>>& rows);
std::string render_passages(const std::vector<std::pair<std::string, std::string>>& passages);

// Takes the last "Final Answer:" line; "None" (any case/punctuation) means
// unanswered, in which case the "Relevant Passages:" list is read too.
// A reply with no parseable answer line counts as None.
ParsedReply parse_reader_reply(const std::string& text);

// Context from everything reached within k hops: rows of visited cells over
// the sub-table columns, plus passages linked to visited cells. A non-empty
// carried_passages list keeps only passages whose titles it names.
ReaderContext build_hop_context(const TableTextInstance& inst, const HybridGraph& g,
                                const HopDictionary& hd, int k,
                                const std::vector<std::string>& carried_passages,
                                const Tokenizer& tokenizer);

ReaderContext build_full_context(const TableTextInstance& inst, const Tokenizer& tokenizer);

// Union of hops 1..max_hops, no passage filtering (flat mode).
ReaderContext build_union_context(const TableTextInstance& inst, const HybridGraph& g,
                                  const HopDictionary& hd, int max_hops, const Tokenizer& tokenizer);

ReaderOutcome answer_hopwise(const TableTextInstance& inst, const HybridGraph& g,
                             const HopDictionary& hd, CompletionService& gw, const ReaderOptions& opt);

// Straight to the full-instance prompt. Used when nothing matched.
ReaderOutcome answer_full_fallback(const TableTextInstance& inst, CompletionService& gw,
                                   const ReaderOptions& opt);

ReaderOutcome answer_no_hopwise(const TableTextInstance& inst, const HybridGraph& g,
                                const HopDictionary& hd, CompletionService& gw, const ReaderOptions& opt);

// mode must be one of the five baseline modes. complete_graph needs the
// caller to supply the assembled full graph (all headers, all documents).
ReaderOutcome answer_baseline(const TableTextInstance& inst, RunMode mode, CompletionService& gw,
                              const ReaderOptions& opt, const HybridGraph* full_graph = nullptr);

} // namespace hygraph
