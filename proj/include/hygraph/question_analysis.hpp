#pragma once
// Three-stage question analysis: entity extraction, relevant header
// selection, entity-to-header mapping. Parsing is deliberately tolerant:
// models approximate the requested output format, so every stage coerces
// bad output into something usable rather than failing the instance.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hygraph/corpus.hpp"
#include "hygraph/llm_gateway.hpp"

namespace hygraph {

struct QuestionAnalysis {
    std::vector<std::string> entities;
    std::vector<std::string> relevant_headers;          // subset of table headers
    std::map<std::string, std::vector<std::string>> entity_header_map; // values: header or "Others"
};

struct AnalysisOptions {
    std::string model = "gpt-3.5-turbo-1106";
    double temperature = 0.0;
};

class AnalysisParseError : public std::runtime_error {
public:
    AnalysisParseError(const std::string& what, std::string raw_text)
        : std::runtime_error(what), raw(std::move(raw_text)) {}
    std::string raw; // the model output that failed to parse
};

// Finds the `label` line (case-insensitive) and parses the list after it.
// Accepts single or double quotes, trailing commas, bare items, items
// containing apostrophes. Returns surface forms, deduplicated keeping the
// first occurrence. Throws AnalysisParseError when the label is absent;
// an explicitly empty list is returned as empty, not an error.
std::vector<std::string> parse_labeled_list(const std::string& text, const std::string& label);

// Parses `"entity": ["Header", ...]` lines (JSON object or the loose
// line-per-entry form the prompt shows). Throws when no entry parses.
std::map<std::string, std::vector<std::string>> parse_mapping_block(const std::string& text);

// JSON-style rendering used to splice lists into prompts.
std::string format_string_list(const std::vector<std::string>& items);

std::vector<std::string> extract_entities(const std::string& question, const std::string& table_name,
                                          const std::vector<std::string>& headers, CompletionService& gw,
                                          const AnalysisOptions& opt);

// Result filtered against the real header set; empty/filtered-out result is
// replaced by all table headers.
std::vector<std::string> select_headers(const std::string& question, const std::string& table_name,
                                        const std::vector<std::string>& headers,
                                        const std::vector<std::string>& entities, CompletionService& gw,
                                        const AnalysisOptions& opt);

// Total map: every entity gets at least ["Others"]; mapped values are
// canonicalized against relevant_headers, everything else becomes "Others".
std::map<std::string, std::vector<std::string>> map_entities(
    const std::string& question, const std::string& table_name, const std::vector<std::string>& entities,
    const std::vector<std::string>& relevant_headers, CompletionService& gw, const AnalysisOptions& opt);

// Runs all three stages with coercions so any model output yields a valid
// analysis. Gateway failures (network, replay miss) still propagate.
QuestionAnalysis analyze(const TableTextInstance& inst, CompletionService& gw, const AnalysisOptions& opt);

} // namespace hygraph
