#include "hygraph/ner.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "hygraph/prompts.hpp"
#include "hygraph/question_analysis.hpp"
#include "hygraph/text.hpp"

using nlohmann::json;

namespace hygraph {

NerProvider ner_provider_from_string(std::string_view s) {
    if (s == "rule" || s == "rule_ner") return NerProvider::rule;
    if (s == "llm" || s == "llm_ner") return NerProvider::llm;
    if (s == "external" || s == "external_ner") return NerProvider::external;
    throw NerError("unknown ner provider: " + std::string(s));
}

const char* to_string(NerProvider p) {
    switch (p) {
        case NerProvider::rule: return "rule_ner";
        case NerProvider::llm: return "llm_ner";
        case NerProvider::external: return "external_ner";
    }
    return "?";
}

namespace {

struct Token {
    std::string text;
    size_t start = 0; // byte offset in the document
    size_t end = 0;
    bool sentence_start = false;
    bool consumed = false; // claimed by the date pass
};

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

// Words keep internal hyphens/apostrophes ("NSX-GT", "O'Brien"); every
// other non-space byte is its own token.
std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    bool at_sentence_start = true;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        Token tok;
        tok.start = i;
        tok.sentence_start = at_sentence_start;
        if (is_word_char(c)) {
            size_t j = i;
            while (j < n) {
                unsigned char cj = static_cast<unsigned char>(text[j]);
                if (is_word_char(cj)) {
                    ++j;
                } else if ((cj == '-' || cj == '\'') && j + 1 < n &&
                           is_word_char(static_cast<unsigned char>(text[j + 1])) && j > i) {
                    ++j;
                } else {
                    break;
                }
            }
            tok.end = j;
            tok.text = text.substr(i, j - i);
            at_sentence_start = false;
            i = j;
        } else {
            tok.end = i + 1;
            tok.text = std::string(1, text[i]);
            if (c == '.' || c == '!' || c == '?') at_sentence_start = true;
            ++i;
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

bool is_capitalized(const std::string& t) {
    if (t.empty()) return false;
    unsigned char c = static_cast<unsigned char>(t[0]);
    if (!std::isupper(c)) return false;
    return std::any_of(t.begin(), t.end(),
                       [](unsigned char ch) { return std::isalpha(ch) != 0; });
}

bool is_all_caps(const std::string& t) {
    if (t.size() < 2) return false;
    return std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isupper(c) != 0; });
}

bool is_number_token(const std::string& t) {
    if (t.empty()) return false;
    bool digit_seen = false;
    for (unsigned char c : t) {
        if (std::isdigit(c)) digit_seen = true;
        else if (c != ',' && c != '.') return false;
    }
    return digit_seen;
}

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = {
        "he", "she", "it", "they", "we", "you", "i", "his", "her", "its", "their",
        "our", "your", "my", "this", "that", "these", "those", "the", "a", "an",
        "and", "or", "but", "if", "then", "than", "as", "at", "by", "for", "from",
        "in", "into", "of", "off", "on", "onto", "over", "to", "under", "up",
        "with", "without", "within", "is", "are", "was", "were", "be", "been",
        "being", "has", "have", "had", "do", "does", "did", "not", "no", "will",
        "would", "can", "could", "shall", "should", "may", "might", "must",
        "there", "here", "when", "where", "which", "who", "whom", "whose",
        "what", "why", "how", "also", "after", "before", "during", "while",
        "since", "until", "again", "once", "both", "each", "such", "some",
        "any", "all", "about", "above", "below", "between", "so", "too",
        "very", "just", "only", "own", "same", "other", "more", "most", "now",
    };
    return words;
}

int month_number(const std::string& t) {
    static const std::array<const char*, 12> months = {"january", "february", "march",     "april",
                                                      "may",     "june",     "july",      "august",
                                                      "september", "october", "november", "december"};
    std::string lower = to_lower_ascii(t);
    for (size_t i = 0; i < months.size(); ++i)
        if (lower == months[i]) return static_cast<int>(i) + 1;
    return 0;
}

bool is_day(const std::string& t) {
    if (t.empty() || t.size() > 2 || !is_number_token(t)) return false;
    int v = std::stoi(t);
    return v >= 1 && v <= 31;
}

bool is_year(const std::string& t) {
    return t.size() == 4 && is_number_token(t);
}

} // namespace

std::vector<DocEntity> rule_ner(const Document& doc) {
    std::vector<Token> tokens = tokenize(doc.text);
    std::vector<DocEntity> out;
    std::set<std::string> seen;
    auto emit = [&](size_t from, size_t to) { // token index range, inclusive
        DocEntity e;
        e.surface = doc.text.substr(tokens[from].start, tokens[to].end - tokens[from].start);
        e.normalized = normalize_text(e.surface);
        e.source_doc_id = doc.doc_id;
        e.span = {tokens[from].start, tokens[to].end};
        if (!e.normalized.empty() && seen.insert(e.normalized).second) out.push_back(std::move(e));
    };

    // Date pass: "19 January 1980" and "January 19, 1980".
    for (size_t i = 0; i + 2 < tokens.size(); ++i) {
        if (tokens[i].consumed) continue;
        if (is_day(tokens[i].text) && month_number(tokens[i + 1].text) && is_year(tokens[i + 2].text)) {
            emit(i, i + 2);
            tokens[i].consumed = tokens[i + 1].consumed = tokens[i + 2].consumed = true;
        } else if (month_number(tokens[i].text) && is_day(tokens[i + 1].text)) {
            size_t y = i + 2;
            if (y < tokens.size() && tokens[y].text == "," && y + 1 < tokens.size()) ++y;
            if (y < tokens.size() && is_year(tokens[y].text)) {
                emit(i, y);
                for (size_t k = i; k <= y; ++k) tokens[k].consumed = true;
            }
        }
    }

    // Lowercase forms seen capitalized mid-sentence; rescues sentence
    // openers like "Button began ..." when the name recurs elsewhere.
    std::unordered_set<std::string> mid_sentence;
    for (const auto& t : tokens)
        if (!t.sentence_start && is_capitalized(t.text)) mid_sentence.insert(to_lower_ascii(t.text));

    auto span_member = [&](const Token& t) {
        return !t.consumed && is_capitalized(t.text) && !stopwords().count(to_lower_ascii(t.text));
    };

    for (size_t i = 0; i < tokens.size();) {
        if (!span_member(tokens[i])) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j + 1 < tokens.size() && span_member(tokens[j + 1])) ++j;
        bool keep = true;
        if (j == i && tokens[i].sentence_start)
            keep = is_all_caps(tokens[i].text) || mid_sentence.count(to_lower_ascii(tokens[i].text)) > 0;
        if (keep) emit(i, j);
        i = j + 1;
    }

    // Number pass: standalone figures not already part of a date.
    for (const auto& t : tokens)
        if (!t.consumed && is_number_token(t.text)) {
            size_t idx = static_cast<size_t>(&t - tokens.data());
            emit(idx, idx);
        }

    return out;
}

std::vector<DocEntity> llm_ner(const Document& doc, CompletionService& gw, const NerOptions& opt) {
    LlmRequest req;
    req.purpose = Purpose::ner;
    req.model = opt.model;
    req.temperature = opt.temperature;
    req.prompt = prompts::render(prompts::ner(), {{"text", doc.text}});
    LlmExchange ex = gw.complete(req);
    std::vector<std::string> items;
    try {
        items = parse_labeled_list(ex.response, "Entities:");
    } catch (const AnalysisParseError&) {
        return {}; // a doc may legitimately yield nothing
    }
    std::vector<DocEntity> out;
    std::set<std::string> seen;
    for (const auto& s : items) {
        DocEntity e;
        e.surface = s;
        e.normalized = normalize_text(s);
        e.source_doc_id = doc.doc_id;
        if (!e.normalized.empty() && seen.insert(e.normalized).second) out.push_back(std::move(e));
    }
    return out;
}

std::vector<DocEntity> external_ner(const Document& doc, const NerOptions& opt, Transport* transport) {
    if (opt.endpoint.empty()) throw NerError("external_ner: no endpoint configured");
    HttpTransport http;
    Transport* t = transport ? transport : &http;
    TransportRequest req;
    req.url = opt.endpoint;
    req.body = json{{"text", doc.text}}.dump();
    TransportResponse res;
    try {
        res = t->send(req);
    } catch (const std::exception& e) {
        throw NerError(std::string("external_ner: ") + e.what());
    }
    if (res.status != 200)
        throw NerError("external_ner: HTTP " + std::to_string(res.status));
    std::vector<DocEntity> out;
    std::set<std::string> seen;
    try {
        json j = json::parse(res.body);
        for (const json& je : j.at("entities")) {
            DocEntity e;
            e.surface = je.at("text").get<std::string>();
            e.normalized = normalize_text(e.surface);
            e.source_doc_id = doc.doc_id;
            if (je.contains("start") && je.contains("end"))
                e.span = {je.at("start").get<size_t>(), je.at("end").get<size_t>()};
            if (!e.normalized.empty() && seen.insert(e.normalized).second) out.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw NerError(std::string("external_ner: bad response: ") + e.what());
    }
    return out;
}

std::vector<DocEntity> extract_doc_entities(const Document& doc, const NerOptions& opt, CompletionService* gw,
                                            Transport* transport) {
    if (doc.text.empty()) throw NerError("document '" + doc.doc_id + "' has empty text");
    switch (opt.provider) {
        case NerProvider::rule: return rule_ner(doc);
        case NerProvider::llm:
            if (!gw) throw NerError("llm_ner requires a gateway");
            return llm_ner(doc, *gw, opt);
        case NerProvider::external: return external_ner(doc, opt, transport);
    }
    throw NerError("unhandled ner provider");
}

} // namespace hygraph
