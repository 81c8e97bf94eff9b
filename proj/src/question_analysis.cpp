#include "hygraph/question_analysis.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hygraph/prompts.hpp"
#include "hygraph/text.hpp"

using nlohmann::json;

namespace hygraph {

namespace {

size_t ifind(std::string_view hay, std::string_view needle) {
    auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end(), [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
    });
    return it == hay.end() ? std::string_view::npos : static_cast<size_t>(it - hay.begin());
}

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string strip_quotes(std::string s) {
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"' || s.front() == '`') &&
        (s.back() == '\'' || s.back() == '"'))
        return s.substr(1, s.size() - 2);
    return s;
}

// Parses list items from s starting inside the brackets (or a bare comma
// list bounded by `stop_at_newline`). Quoted items may contain commas and
// apostrophes: a quote only closes when followed by , ] or end of line.
std::vector<std::string> scan_items(std::string_view s, size_t i, bool stop_at_newline) {
    std::vector<std::string> items;
    const size_t n = s.size();
    auto push = [&](std::string item) {
        item = trim(item);
        if (!item.empty()) items.push_back(std::move(item));
    };
    while (i < n) {
        while (i < n && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
        if (i >= n || s[i] == ']') break;
        if (s[i] == '\n' || s[i] == '\r') {
            if (stop_at_newline) break;
            ++i;
            continue;
        }
        if (s[i] == '\'' || s[i] == '"' || s[i] == '`') {
            const char open = s[i];
            size_t j = i + 1;
            size_t close = std::string_view::npos;
            while (j < n) {
                char c = s[j];
                bool is_closer = (open == '`') ? (c == '\'' || c == '`') : (c == open);
                if (is_closer) {
                    size_t k = j + 1;
                    while (k < n && (s[k] == ' ' || s[k] == '\t')) ++k;
                    if (k >= n || s[k] == ',' || s[k] == ']' || s[k] == '\n' || s[k] == '\r') {
                        close = j;
                        break;
                    }
                }
                ++j;
            }
            if (close == std::string_view::npos) {
                size_t stop = s.find_first_of("]\n", i);
                if (stop == std::string_view::npos) stop = n;
                push(std::string(s.substr(i + 1, stop - i - 1)));
                i = stop;
            } else {
                push(std::string(s.substr(i + 1, close - i - 1)));
                i = close + 1;
            }
        } else {
            size_t stop = i;
            while (stop < n && s[stop] != ',' && s[stop] != ']' && s[stop] != '\n' && s[stop] != '\r') ++stop;
            push(std::string(s.substr(i, stop - i)));
            i = stop;
        }
    }
    return items;
}

std::vector<std::string> dedup_keep_first(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& item : items)
        if (seen.insert(normalize_text(item)).second) out.push_back(item);
    return out;
}

} // namespace

std::vector<std::string> parse_labeled_list(const std::string& text, const std::string& label) {
    size_t pos = ifind(text, label);
    if (pos == std::string::npos)
        throw AnalysisParseError("no '" + label + "' line in model output", text);
    size_t after = pos + label.size();
    size_t bracket = text.find('[', after);
    std::vector<std::string> items;
    if (bracket != std::string::npos) {
        items = scan_items(text, bracket + 1, false);
    } else {
        items = scan_items(text, after, true); // bare comma list on the label line
    }
    return dedup_keep_first(items);
}

std::map<std::string, std::vector<std::string>> parse_mapping_block(const std::string& text) {
    std::map<std::string, std::vector<std::string>> out;
    std::vector<std::string> order; // diagnostics only; out is the result

    // Easy path: the model produced an actual JSON object.
    size_t brace = text.find('{');
    if (brace != std::string::npos) {
        size_t close = text.rfind('}');
        if (close != std::string::npos && close > brace) {
            try {
                json j = json::parse(text.substr(brace, close - brace + 1));
                if (j.is_object()) {
                    for (auto it = j.begin(); it != j.end(); ++it) {
                        std::vector<std::string> vals;
                        if (it.value().is_array())
                            for (const json& v : it.value()) vals.push_back(v.get<std::string>());
                        else if (it.value().is_string())
                            vals.push_back(it.value().get<std::string>());
                        if (!vals.empty()) out.emplace(it.key(), std::move(vals));
                    }
                    if (!out.empty()) return out;
                }
            } catch (const json::exception&) {
                // fall through to the loose line parser
            }
        }
    }

    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = trim(line.substr(0, colon));
        // A python-style dict puts the opening brace on the first entry's line.
        while (!key.empty() && key.front() == '{') key.erase(key.begin());
        key = trim(std::move(key));
        bool quoted = key.size() >= 2 && (key.front() == '\'' || key.front() == '"');
        key = strip_quotes(std::move(key));
        if (key.empty()) continue;
        std::string_view value(line);
        value.remove_prefix(colon + 1);
        size_t bracket = value.find('[');
        std::vector<std::string> vals;
        if (bracket != std::string_view::npos) {
            vals = scan_items(value, bracket + 1, false);
        } else if (quoted) {
            std::string single = strip_quotes(trim(value));
            while (!single.empty() && single.back() == ',') single.pop_back();
            single = strip_quotes(trim(single));
            if (!single.empty()) vals.push_back(single);
        }
        // Unquoted key with no bracketed value is almost certainly prose.
        if (vals.empty()) continue;
        if (!out.count(key)) out.emplace(key, std::move(vals));
    }
    if (out.empty()) throw AnalysisParseError("no entity mapping entries in model output", text);
    return out;
}

std::string format_string_list(const std::vector<std::string>& items) {
    return json(items).dump();
}

static LlmRequest analysis_request(Purpose purpose, const AnalysisOptions& opt, std::string prompt) {
    LlmRequest req;
    req.purpose = purpose;
    req.model = opt.model;
    req.temperature = opt.temperature;
    req.prompt = std::move(prompt);
    return req;
}

std::vector<std::string> extract_entities(const std::string& question, const std::string& table_name,
                                          const std::vector<std::string>& headers, CompletionService& gw,
                                          const AnalysisOptions& opt) {
    auto prompt = prompts::render(prompts::entity_extraction(),
                                  {{"question", question},
                                   {"table_id", table_name},
                                   {"table_headers", format_string_list(headers)}});
    auto ex = gw.complete(analysis_request(Purpose::entity_extract, opt, std::move(prompt)));
    return parse_labeled_list(ex.response, "Entities:");
}

std::vector<std::string> select_headers(const std::string& question, const std::string& table_name,
                                        const std::vector<std::string>& headers,
                                        const std::vector<std::string>& entities, CompletionService& gw,
                                        const AnalysisOptions& opt) {
    auto prompt = prompts::render(prompts::header_selection(),
                                  {{"question", question},
                                   {"table_id", table_name},
                                   {"table_headers", format_string_list(headers)},
                                   {"entities", format_string_list(entities)}});
    auto ex = gw.complete(analysis_request(Purpose::header_select, opt, std::move(prompt)));
    auto raw = parse_labeled_list(ex.response, "Relevant headers:");

    // Keep only real headers, in the model's order, canonical surface form.
    std::vector<std::string> filtered;
    std::set<std::string> seen;
    for (const auto& item : raw)
        for (const auto& h : headers)
            if (iequals_ascii(h, item) && seen.insert(normalize_text(h)).second) {
                filtered.push_back(h);
                break;
            }
    if (filtered.empty()) return headers; // none identified: use everything
    return filtered;
}

std::map<std::string, std::vector<std::string>> map_entities(
    const std::string& question, const std::string& table_name, const std::vector<std::string>& entities,
    const std::vector<std::string>& relevant_headers, CompletionService& gw, const AnalysisOptions& opt) {
    auto prompt = prompts::render(prompts::entity_mapping(),
                                  {{"question", question},
                                   {"table_id", table_name},
                                   {"entities", format_string_list(entities)},
                                   {"relevant_headers", format_string_list(relevant_headers)}});
    auto ex = gw.complete(analysis_request(Purpose::entity_map, opt, std::move(prompt)));
    auto raw = parse_mapping_block(ex.response);

    std::map<std::string, std::vector<std::string>> out;
    for (const auto& entity : entities) {
        const std::vector<std::string>* vals = nullptr;
        for (const auto& [k, v] : raw)
            if (normalize_text(k) == normalize_text(entity)) {
                vals = &v;
                break;
            }
        std::vector<std::string> mapped;
        std::set<std::string> seen;
        if (vals)
            for (const auto& item : *vals) {
                if (iequals_ascii(item, "others")) {
                    if (seen.insert("Others").second) mapped.push_back("Others");
                    continue;
                }
                for (const auto& h : relevant_headers)
                    if (iequals_ascii(h, item) && seen.insert(normalize_text(h)).second) {
                        mapped.push_back(h);
                        break;
                    }
            }
        if (mapped.empty()) mapped.push_back("Others"); // totality
        out.emplace(entity, std::move(mapped));
    }
    return out;
}

QuestionAnalysis analyze(const TableTextInstance& inst, CompletionService& gw, const AnalysisOptions& opt) {
    QuestionAnalysis qa;
    const std::string& tname = inst.table.name.empty() ? inst.table.table_id : inst.table.name;
    try {
        qa.entities = extract_entities(inst.question, tname, inst.table.headers, gw, opt);
    } catch (const AnalysisParseError&) {
        qa.entities.clear();
    }
    if (qa.entities.empty()) {
        // Degenerate analysis: no seeds will match, forcing full-context
        // fallback downstream; headers all kept so the sub-table is total.
        qa.relevant_headers = inst.table.headers;
        return qa;
    }
    try {
        qa.relevant_headers = select_headers(inst.question, tname, inst.table.headers, qa.entities, gw, opt);
    } catch (const AnalysisParseError&) {
        qa.relevant_headers = inst.table.headers;
    }
    if (qa.relevant_headers.empty()) qa.relevant_headers = inst.table.headers;
    try {
        qa.entity_header_map = map_entities(inst.question, tname, qa.entities, qa.relevant_headers, gw, opt);
    } catch (const AnalysisParseError&) {
        qa.entity_header_map.clear();
    }
    for (const auto& e : qa.entities)
        if (!qa.entity_header_map.count(e)) qa.entity_header_map[e] = {"Others"};
    // Drop any stray keys the model invented.
    for (auto it = qa.entity_header_map.begin(); it != qa.entity_header_map.end();) {
        bool known = std::any_of(qa.entities.begin(), qa.entities.end(), [&](const std::string& e) {
            return e == it->first;
        });
        it = known ? std::next(it) : qa.entity_header_map.erase(it);
    }
    return qa;
}

} // namespace hygraph
