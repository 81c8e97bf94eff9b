#pragma once
// The joint table/passage graph. Cells of the retrieved sub-table form row
// cliques; documents and their extracted entities form a bipartite
// fragment; link edges tie entities to the cells whose linked documents
// mention them. Those link edges are the only connection between the two
// components.

#include <compare>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hygraph/corpus.hpp"
#include "hygraph/ner.hpp"

namespace hygraph {

enum class NodeKind { cell, entity, document };
enum class EdgeKind { row, mention, link };

const char* to_string(NodeKind k);
const char* to_string(EdgeKind k);

struct NodeId {
    NodeKind kind = NodeKind::cell;
    std::string key; // cell: "r{row}:h{col}"; entity: normalized surface; document: doc_id
    auto operator<=>(const NodeId&) const = default;
};

NodeId cell_node(int row, int col);
NodeId entity_node(const std::string& normalized);
NodeId document_node(const std::string& doc_id);

struct NodePayload {
    std::string label; // cell text / entity surface / document title
    int row = -1;      // cells only
    int col = -1;      // header index in the full table
    std::string header;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HybridGraph {
    std::map<NodeId, NodePayload> nodes;
    std::set<std::tuple<NodeId, NodeId, EdgeKind>> edges; // canonical: first < second
    std::vector<std::string> sub_table_headers;
    std::vector<int> sub_table_columns; // indices into the full table header list

    void add_node(const NodeId& id, NodePayload payload);
    // Undirected; validates the edge-kind endpoint rules and rejects loops.
    void add_edge(const NodeId& a, const NodeId& b, EdgeKind kind);
    // Sorted, deduplicated adjacency. Valid after finalize().
    const std::vector<std::pair<NodeId, EdgeKind>>& neighbors(const NodeId& id) const;
    void finalize();

private:
    std::map<NodeId, std::vector<std::pair<NodeId, EdgeKind>>> adjacency_;
    static const std::vector<std::pair<NodeId, EdgeKind>> kNoNeighbors;
};

// All rows, the selected columns only; column order follows the table.
struct SubTable {
    const Table* table = nullptr;
    std::vector<int> column_indices;
    std::vector<std::string> headers;
};

SubTable retrieve_sub_table(const Table& table, const std::vector<std::string>& relevant_headers);

// Entity/document bipartite fragment keyed on normalized entity form.
struct EntityDocFragment {
    std::map<std::string, std::string> entity_surface;          // normalized -> first surface seen
    std::map<std::string, std::set<std::string>> entity_docs;   // normalized -> mentioning doc ids
    std::vector<std::string> doc_ids;                            // every processed document
};

EntityDocFragment build_entity_document_graph(
    const std::map<std::string, Document>& documents,
    const std::function<std::vector<DocEntity>(const Document&)>& ner);

HybridGraph assemble_hybrid_graph(const SubTable& sub, const EntityDocFragment& fragment,
                                  const TableTextInstance& inst);

std::set<std::string> collect_entity_total(const HybridGraph& g);

// Debug/golden serialization: sorted nodes, edges, kinds.
nlohmann::ordered_json graph_to_json(const HybridGraph& g);

} // namespace hygraph
