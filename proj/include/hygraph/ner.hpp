#pragma once
// Named-entity extraction over linked documents. Three interchangeable
// providers: a deterministic rule-based tagger (default, no dependencies),
// an LLM prompt via the gateway, and an external HTTP tagging service.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hygraph/corpus.hpp"
#include "hygraph/llm_gateway.hpp"

namespace hygraph {

struct DocEntity {
    std::string surface;
    std::string normalized; // normalize_text(surface)
    std::string source_doc_id;
    std::optional<std::pair<size_t, size_t>> span; // [start, end) byte offsets
};

enum class NerProvider { rule, llm, external };

NerProvider ner_provider_from_string(std::string_view s);
const char* to_string(NerProvider p);

class NerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NerOptions {
    NerProvider provider = NerProvider::rule;
    std::string model = "gpt-3.5-turbo-1106"; // llm provider
    double temperature = 0.0;
    std::string endpoint; // external provider URL
};

// Capitalized spans, dates ("19 January 1980") and standalone numbers.
// Stopwords never join a span; a lone capitalized sentence-opener is kept
// only if it is an acronym or recurs capitalized mid-sentence. Output is
// deduplicated on normalized form, first occurrence wins.
std::vector<DocEntity> rule_ner(const Document& doc);

// Entity list via a gateway prompt. Unparseable output -> empty list.
std::vector<DocEntity> llm_ner(const Document& doc, CompletionService& gw, const NerOptions& opt);

// POST {"text": ...} -> {"entities": [{"text", "start", "end"}, ...]}.
std::vector<DocEntity> external_ner(const Document& doc, const NerOptions& opt,
                                    Transport* transport = nullptr);

// Dispatch on opt.provider. `gw` is required for the llm provider.
std::vector<DocEntity> extract_doc_entities(const Document& doc, const NerOptions& opt,
                                            CompletionService* gw = nullptr,
                                            Transport* transport = nullptr);

} // namespace hygraph
