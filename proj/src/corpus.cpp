#include "hygraph/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hygraph/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace hygraph {

std::optional<int> Table::header_index(std::string_view header) const {
    for (size_t i = 0; i < headers.size(); ++i)
        if (iequals_ascii(headers[i], header)) return static_cast<int>(i);
    return std::nullopt;
}

const Cell& Table::at(int row, int col) const {
    return rows.at(static_cast<size_t>(row)).cells.at(static_cast<size_t>(col));
}

CorpusFormat corpus_format_from_string(std::string_view s) {
    if (s == "native") return CorpusFormat::native;
    if (s == "hybridqa") return CorpusFormat::hybridqa;
    if (s == "ottqa") return CorpusFormat::ottqa;
    throw CorpusError("unknown corpus format: " + std::string(s));
}

const char* to_string(CorpusFormat f) {
    switch (f) {
        case CorpusFormat::native: return "native";
        case CorpusFormat::hybridqa: return "hybridqa";
        case CorpusFormat::ottqa: return "ottqa";
    }
    return "?";
}

void validate_instance(const TableTextInstance& inst) {
    auto fail = [&](const std::string& what) {
        throw CorpusError("instance " + inst.question_id + ": " + what);
    };
    if (inst.question_id.empty()) throw CorpusError("instance with empty question_id");
    if (inst.question.empty()) fail("empty question");
    const Table& t = inst.table;
    if (t.table_id.empty()) fail("empty table_id");
    if (t.headers.empty()) fail("table has no headers");
    {
        std::set<std::string> seen;
        for (const auto& h : t.headers)
            if (!seen.insert(to_lower_ascii(h)).second)
                fail("duplicate header '" + h + "'");
    }
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const Row& row = t.rows[r];
        if (row.cells.size() != t.headers.size())
            fail("row arity mismatch at row " + std::to_string(r) + ": " +
                 std::to_string(row.cells.size()) + " cells vs " +
                 std::to_string(t.headers.size()) + " headers");
        for (size_t c = 0; c < row.cells.size(); ++c) {
            const Cell& cell = row.cells[c];
            if (cell.row_index != static_cast<int>(r) || cell.header_index != static_cast<int>(c))
                fail("cell index mismatch at row " + std::to_string(r) + " col " + std::to_string(c));
            for (const auto& d : cell.linked_doc_ids)
                if (!inst.documents.count(d))
                    fail("cell (" + std::to_string(r) + "," + std::to_string(c) +
                         ") links unresolved doc_id '" + d + "'");
        }
    }
    for (const auto& [id, doc] : inst.documents) {
        if (id.empty()) fail("document with empty doc_id");
        if (doc.doc_id != id) fail("document key/id mismatch for '" + id + "'");
        if (doc.text.empty()) fail("document '" + id + "' has empty text");
    }
}

ordered_json instance_to_json(const TableTextInstance& inst) {
    ordered_json jt;
    jt["table_id"] = inst.table.table_id;
    jt["name"] = inst.table.name;
    jt["headers"] = inst.table.headers;
    ordered_json rows = ordered_json::array();
    for (const auto& row : inst.table.rows) {
        ordered_json jr = ordered_json::array();
        for (const auto& cell : row.cells)
            jr.push_back(ordered_json{{"text", cell.text}, {"links", cell.linked_doc_ids}});
        rows.push_back(std::move(jr));
    }
    jt["rows"] = std::move(rows);

    ordered_json docs = ordered_json::object();
    for (const auto& [id, doc] : inst.documents)
        docs[id] = ordered_json{{"title", doc.title}, {"text", doc.text}};

    return ordered_json{{"question_id", inst.question_id},
                        {"question", inst.question},
                        {"table", std::move(jt)},
                        {"documents", std::move(docs)},
                        {"gold_answers", inst.gold_answers}};
}

TableTextInstance instance_from_json(const json& j) {
    TableTextInstance inst;
    inst.question_id = j.at("question_id").get<std::string>();
    inst.question = j.at("question").get<std::string>();
    const json& jt = j.at("table");
    inst.table.table_id = jt.at("table_id").get<std::string>();
    inst.table.name = jt.value("name", std::string{});
    inst.table.headers = jt.at("headers").get<std::vector<std::string>>();
    int r = 0;
    for (const json& jr : jt.at("rows")) {
        Row row;
        int c = 0;
        for (const json& jc : jr) {
            Cell cell;
            cell.row_index = r;
            cell.header_index = c;
            cell.text = jc.at("text").get<std::string>();
            if (jc.contains("links")) cell.linked_doc_ids = jc.at("links").get<std::vector<std::string>>();
            row.cells.push_back(std::move(cell));
            ++c;
        }
        inst.table.rows.push_back(std::move(row));
        ++r;
    }
    if (j.contains("documents"))
        for (auto it = j.at("documents").begin(); it != j.at("documents").end(); ++it) {
            Document d;
            d.doc_id = it.key();
            d.title = it.value().value("title", std::string{});
            d.text = it.value().at("text").get<std::string>();
            inst.documents.emplace(it.key(), std::move(d));
        }
    if (j.contains("gold_answers")) inst.gold_answers = j.at("gold_answers").get<std::vector<std::string>>();
    return inst;
}

static std::vector<TableTextInstance> load_native_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open corpus file: " + path);
    std::vector<TableTextInstance> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw CorpusError(path + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
        }
        try {
            out.push_back(instance_from_json(j));
        } catch (const json::exception& e) {
            throw CorpusError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void save_corpus_native(const std::vector<TableTextInstance>& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw CorpusError("cannot write corpus file: " + path);
    for (const auto& inst : corpus) out << instance_to_json(inst).dump() << '\n';
}

// ---- hybridqa ----------------------------------------------------------
//
// Directory layout: <dir>/<split>.json with question records, plus
// tables_tok/<table_id>.json and request_tok/<table_id>.json holding the
// table and the per-table passage pool keyed by wiki url.

static std::string wiki_url_to_doc_id(std::string url) {
    // "/wiki/Jenson_Button" -> "Jenson_Button"
    const std::string prefix = "/wiki/";
    if (url.rfind(prefix, 0) == 0) url = url.substr(prefix.size());
    return url;
}

static void parse_hybridqa_table(const json& jt, Table& table,
                                 std::vector<std::vector<std::vector<std::string>>>& cell_links) {
    if (jt.contains("title")) table.name = jt.at("title").get<std::string>();
    for (const json& h : jt.at("header")) {
        // header entries are either plain strings or [text, links] pairs
        if (h.is_array()) table.headers.push_back(h.at(0).get<std::string>());
        else table.headers.push_back(h.get<std::string>());
    }
    int r = 0;
    for (const json& jrow : jt.at("data")) {
        Row row;
        std::vector<std::vector<std::string>> row_links;
        int c = 0;
        for (const json& jcell : jrow) {
            Cell cell;
            cell.row_index = r;
            cell.header_index = c;
            std::vector<std::string> links;
            if (jcell.is_array()) {
                cell.text = jcell.at(0).get<std::string>();
                if (jcell.size() > 1 && jcell.at(1).is_array())
                    for (const json& u : jcell.at(1)) links.push_back(wiki_url_to_doc_id(u.get<std::string>()));
            } else {
                cell.text = jcell.get<std::string>();
            }
            row.cells.push_back(std::move(cell));
            row_links.push_back(std::move(links));
            ++c;
        }
        table.rows.push_back(std::move(row));
        cell_links.push_back(std::move(row_links));
        ++r;
    }
}

std::vector<TableTextInstance> load_hybridqa_dir(const std::string& dir, const std::string& split) {
    fs::path base(dir);
    fs::path qfile = base / (split + ".json");
    std::ifstream qin(qfile);
    if (!qin) throw CorpusError("cannot open " + qfile.string());
    json questions = json::parse(qin);

    // Tables and passages are shared across questions; cache per table_id.
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<std::vector<std::vector<std::string>>>> links;
    std::map<std::string, std::map<std::string, Document>> passages;

    auto load_table = [&](const std::string& table_id) {
        if (tables.count(table_id)) return;
        fs::path tfile = base / "tables_tok" / (table_id + ".json");
        std::ifstream tin(tfile);
        if (!tin) throw CorpusError("cannot open " + tfile.string());
        json jt = json::parse(tin);
        Table table;
        table.table_id = table_id;
        std::vector<std::vector<std::vector<std::string>>> cl;
        parse_hybridqa_table(jt, table, cl);
        tables.emplace(table_id, std::move(table));
        links.emplace(table_id, std::move(cl));

        fs::path pfile = base / "request_tok" / (table_id + ".json");
        std::ifstream pin(pfile);
        std::map<std::string, Document> docs;
        if (pin) {
            json jp = json::parse(pin);
            for (auto it = jp.begin(); it != jp.end(); ++it) {
                Document d;
                d.doc_id = wiki_url_to_doc_id(it.key());
                d.title = d.doc_id;
                for (auto& ch : d.title)
                    if (ch == '_') ch = ' ';
                d.text = it.value().get<std::string>();
                docs.emplace(d.doc_id, std::move(d));
            }
        }
        passages.emplace(table_id, std::move(docs));
    };

    std::vector<TableTextInstance> out;
    for (const json& q : questions) {
        TableTextInstance inst;
        inst.question_id = q.at("question_id").get<std::string>();
        inst.question = q.at("question").get<std::string>();
        std::string table_id = q.at("table_id").get<std::string>();
        load_table(table_id);
        inst.table = tables.at(table_id);
        const auto& cl = links.at(table_id);
        const auto& pool = passages.at(table_id);

        // Attach only the link targets that actually resolved to a passage.
        std::set<std::string> used;
        for (size_t r = 0; r < inst.table.rows.size(); ++r)
            for (size_t c = 0; c < inst.table.rows[r].cells.size(); ++c)
                for (const auto& id : cl[r][c])
                    if (pool.count(id)) {
                        inst.table.rows[r].cells[c].linked_doc_ids.push_back(id);
                        used.insert(id);
                    }
        for (const auto& id : used) inst.documents.emplace(id, pool.at(id));

        if (q.contains("answer-text")) inst.gold_answers.push_back(q.at("answer-text").get<std::string>());
        else if (q.contains("answer_text")) inst.gold_answers.push_back(q.at("answer_text").get<std::string>());
        out.push_back(std::move(inst));
    }
    return out;
}

// ---- ottqa -------------------------------------------------------------
//
// Single json/jsonl file; each record embeds the table and its passages.
// Cells link to passages whose normalized title matches the cell text.

static TableTextInstance ottqa_record(const json& q) {
    TableTextInstance inst;
    inst.question_id = q.at("question_id").get<std::string>();
    inst.question = q.at("question").get<std::string>();
    const json& jt = q.at("table");
    inst.table.table_id = q.value("table_id", jt.value("uid", std::string("table")));
    inst.table.name = jt.value("title", std::string{});
    for (const json& h : jt.at("header"))
        inst.table.headers.push_back(h.is_array() ? h.at(0).get<std::string>() : h.get<std::string>());
    int r = 0;
    for (const json& jrow : jt.at("data")) {
        Row row;
        int c = 0;
        for (const json& jcell : jrow) {
            Cell cell;
            cell.row_index = r;
            cell.header_index = c;
            cell.text = jcell.is_array() ? jcell.at(0).get<std::string>() : jcell.get<std::string>();
            row.cells.push_back(std::move(cell));
            ++c;
        }
        inst.table.rows.push_back(std::move(row));
        ++r;
    }
    std::map<std::string, std::string> title_to_id; // normalized title -> doc_id
    if (q.contains("passages"))
        for (auto it = q.at("passages").begin(); it != q.at("passages").end(); ++it) {
            Document d;
            d.doc_id = it.key();
            if (it.value().is_string()) {
                d.title = it.key();
                d.text = it.value().get<std::string>();
            } else {
                d.title = it.value().value("title", it.key());
                d.text = it.value().at("text").get<std::string>();
            }
            title_to_id[normalize_text(d.title)] = d.doc_id;
            std::string underscored = d.title;
            for (auto& ch : underscored)
                if (ch == '_') ch = ' ';
            title_to_id[normalize_text(underscored)] = d.doc_id;
            inst.documents.emplace(d.doc_id, std::move(d));
        }
    for (auto& row : inst.table.rows)
        for (auto& cell : row.cells) {
            auto it = title_to_id.find(normalize_text(cell.text));
            if (it != title_to_id.end()) cell.linked_doc_ids.push_back(it->second);
        }
    if (q.contains("answer-text")) inst.gold_answers.push_back(q.at("answer-text").get<std::string>());
    if (q.contains("gold_answers"))
        for (const json& a : q.at("gold_answers")) inst.gold_answers.push_back(a.get<std::string>());
    return inst;
}

std::vector<TableTextInstance> load_ottqa_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open " + path);
    std::vector<TableTextInstance> out;
    // Accept either a json array or jsonl.
    char first = 0;
    in >> std::ws;
    first = static_cast<char>(in.peek());
    if (first == '[') {
        json arr = json::parse(in);
        for (const json& q : arr) out.push_back(ottqa_record(q));
    } else {
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                out.push_back(ottqa_record(json::parse(line)));
            } catch (const json::exception& e) {
                throw CorpusError(path + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    return out;
}

std::vector<TableTextInstance> load_corpus(const std::string& path, CorpusFormat format) {
    switch (format) {
        case CorpusFormat::native: return load_native_jsonl(path);
        case CorpusFormat::hybridqa: return load_hybridqa_dir(path);
        case CorpusFormat::ottqa: return load_ottqa_file(path);
    }
    throw CorpusError("unhandled corpus format");
}

} // namespace hygraph
