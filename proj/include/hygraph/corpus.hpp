#pragma once
// Data model for tables, cell-linked documents and questions, plus ingestion
// from dataset files. Instances are immutable after loading and safe to share
// across threads.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hygraph {

struct Cell {
    int row_index = 0;
    int header_index = 0;
    std::string text;
    std::vector<std::string> linked_doc_ids;
};

struct Row {
    std::vector<Cell> cells;
};

struct Table {
    std::string table_id;
    std::string name; // page/table title
    std::vector<std::string> headers;
    std::vector<Row> rows;

    // Case-insensitive header lookup.
    std::optional<int> header_index(std::string_view header) const;
    const Cell& at(int row, int col) const;
};

struct Document {
    std::string doc_id;
    std::string title;
    std::string text;
};

struct TableTextInstance {
    std::string question_id;
    std::string question;
    Table table;
    std::map<std::string, Document> documents; // doc_id -> Document
    std::vector<std::string> gold_answers;     // may be empty for inference-only runs
};

enum class CorpusFormat { native, hybridqa, ottqa };

CorpusFormat corpus_format_from_string(std::string_view s);
const char* to_string(CorpusFormat f);

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Checks the type invariants: row arity, header uniqueness, resolvable links,
// non-empty documents. Throws CorpusError naming the question_id and field.
void validate_instance(const TableTextInstance& inst);

std::vector<TableTextInstance> load_corpus(const std::string& path, CorpusFormat format);

// Native corpus format: UTF-8 JSON Lines, one instance per line.
nlohmann::ordered_json instance_to_json(const TableTextInstance& inst);
TableTextInstance instance_from_json(const nlohmann::json& j);
void save_corpus_native(const std::vector<TableTextInstance>& corpus, const std::string& path);

// Adapters for the public dataset layouts. `path` is a directory for
// hybridqa (dataset json + tables_tok/ + request_tok/) and a file for ottqa.
std::vector<TableTextInstance> load_hybridqa_dir(const std::string& dir, const std::string& split = "dev");
std::vector<TableTextInstance> load_ottqa_file(const std::string& path);

} // namespace hygraph
