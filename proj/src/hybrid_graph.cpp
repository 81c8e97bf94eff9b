#include "hygraph/hybrid_graph.hpp"

#include <algorithm>

#include "hygraph/text.hpp"

using nlohmann::ordered_json;

namespace hygraph {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::cell: return "cell";
        case NodeKind::entity: return "entity";
        case NodeKind::document: return "document";
    }
    return "?";
}

const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::row: return "row";
        case EdgeKind::mention: return "mention";
        case EdgeKind::link: return "link";
    }
    return "?";
}

NodeId cell_node(int row, int col) {
    return {NodeKind::cell, "r" + std::to_string(row) + ":h" + std::to_string(col)};
}

NodeId entity_node(const std::string& normalized) { return {NodeKind::entity, normalized}; }

NodeId document_node(const std::string& doc_id) { return {NodeKind::document, doc_id}; }

const std::vector<std::pair<NodeId, EdgeKind>> HybridGraph::kNoNeighbors;

void HybridGraph::add_node(const NodeId& id, NodePayload payload) {
    nodes.emplace(id, std::move(payload)); // first insertion wins
}

void HybridGraph::add_edge(const NodeId& a, const NodeId& b, EdgeKind kind) {
    if (a == b) throw GraphError("self edge on " + a.key);
    if (!nodes.count(a) || !nodes.count(b))
        throw GraphError("edge endpoint not in graph: " + a.key + " -- " + b.key);
    auto kinds_ok = [&](NodeKind x, NodeKind y) {
        return (a.kind == x && b.kind == y) || (a.kind == y && b.kind == x);
    };
    switch (kind) {
        case EdgeKind::row:
            if (!kinds_ok(NodeKind::cell, NodeKind::cell))
                throw GraphError("row edge must join two cells");
            if (nodes.at(a).row != nodes.at(b).row)
                throw GraphError("row edge across rows: " + a.key + " -- " + b.key);
            break;
        case EdgeKind::mention:
            if (!kinds_ok(NodeKind::document, NodeKind::entity))
                throw GraphError("mention edge must join document and entity");
            break;
        case EdgeKind::link:
            if (!kinds_ok(NodeKind::entity, NodeKind::cell))
                throw GraphError("link edge must join entity and cell");
            break;
    }
    const NodeId& lo = std::min(a, b);
    const NodeId& hi = std::max(a, b);
    if (edges.emplace(lo, hi, kind).second) {
        adjacency_[a].emplace_back(b, kind);
        adjacency_[b].emplace_back(a, kind);
    }
}

const std::vector<std::pair<NodeId, EdgeKind>>& HybridGraph::neighbors(const NodeId& id) const {
    auto it = adjacency_.find(id);
    return it == adjacency_.end() ? kNoNeighbors : it->second;
}

void HybridGraph::finalize() {
    for (auto& [id, adj] : adjacency_) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
}

SubTable retrieve_sub_table(const Table& table, const std::vector<std::string>& relevant_headers) {
    if (relevant_headers.empty()) throw GraphError("retrieve_sub_table: no headers selected");
    for (const auto& h : relevant_headers)
        if (!table.header_index(h))
            throw GraphError("retrieve_sub_table: unknown header '" + h + "'");
    SubTable sub;
    sub.table = &table;
    for (size_t c = 0; c < table.headers.size(); ++c) {
        bool selected = std::any_of(relevant_headers.begin(), relevant_headers.end(),
                                    [&](const std::string& h) { return iequals_ascii(h, table.headers[c]); });
        if (selected) {
            sub.column_indices.push_back(static_cast<int>(c));
            sub.headers.push_back(table.headers[c]);
        }
    }
    return sub;
}

EntityDocFragment build_entity_document_graph(
    const std::map<std::string, Document>& documents,
    const std::function<std::vector<DocEntity>(const Document&)>& ner) {
    EntityDocFragment frag;
    for (const auto& [id, doc] : documents) {
        frag.doc_ids.push_back(id);
        for (const DocEntity& e : ner(doc)) {
            if (e.normalized.empty()) continue;
            frag.entity_surface.emplace(e.normalized, e.surface);
            frag.entity_docs[e.normalized].insert(id);
        }
    }
    return frag;
}

HybridGraph assemble_hybrid_graph(const SubTable& sub, const EntityDocFragment& fragment,
                                  const TableTextInstance& inst) {
    if (!sub.table) throw GraphError("assemble_hybrid_graph: empty sub-table");
    HybridGraph g;
    g.sub_table_headers = sub.headers;
    g.sub_table_columns = sub.column_indices;

    const Table& table = *sub.table;
    for (size_t r = 0; r < table.rows.size(); ++r) {
        for (size_t i = 0; i < sub.column_indices.size(); ++i) {
            int c = sub.column_indices[i];
            const Cell& cell = table.at(static_cast<int>(r), c);
            NodePayload p;
            p.label = cell.text;
            p.row = static_cast<int>(r);
            p.col = c;
            p.header = sub.headers[i];
            g.add_node(cell_node(static_cast<int>(r), c), std::move(p));
        }
        for (size_t i = 0; i < sub.column_indices.size(); ++i)
            for (size_t j = i + 1; j < sub.column_indices.size(); ++j)
                g.add_edge(cell_node(static_cast<int>(r), sub.column_indices[i]),
                           cell_node(static_cast<int>(r), sub.column_indices[j]), EdgeKind::row);
    }

    for (const auto& id : fragment.doc_ids) {
        auto it = inst.documents.find(id);
        NodePayload p;
        p.label = (it != inst.documents.end() && !it->second.title.empty()) ? it->second.title : id;
        g.add_node(document_node(id), std::move(p));
    }
    for (const auto& [normalized, surface] : fragment.entity_surface) {
        NodePayload p;
        p.label = surface;
        g.add_node(entity_node(normalized), std::move(p));
    }
    for (const auto& [normalized, docs] : fragment.entity_docs)
        for (const auto& id : docs) {
            if (!inst.documents.count(id))
                throw GraphError("entity '" + normalized + "' mentions unknown document '" + id + "'");
            g.add_edge(document_node(id), entity_node(normalized), EdgeKind::mention);
        }

    // Link edges: entity -> sub-table cell whenever the cell links a
    // document that mentions the entity.
    for (size_t r = 0; r < table.rows.size(); ++r)
        for (int c : sub.column_indices) {
            const Cell& cell = table.at(static_cast<int>(r), c);
            for (const auto& doc_id : cell.linked_doc_ids) {
                if (!inst.documents.count(doc_id))
                    throw GraphError("cell links unknown document '" + doc_id + "'");
                for (const auto& [normalized, docs] : fragment.entity_docs)
                    if (docs.count(doc_id))
                        g.add_edge(entity_node(normalized), cell_node(static_cast<int>(r), c),
                                   EdgeKind::link);
            }
        }

    g.finalize();
    return g;
}

std::set<std::string> collect_entity_total(const HybridGraph& g) {
    std::set<std::string> out;
    for (const auto& [id, payload] : g.nodes)
        if (id.kind == NodeKind::entity) out.insert(id.key);
    return out;
}

ordered_json graph_to_json(const HybridGraph& g) {
    ordered_json nodes = ordered_json::array();
    for (const auto& [id, p] : g.nodes) {
        ordered_json n{{"kind", to_string(id.kind)}, {"key", id.key}, {"label", p.label}};
        if (id.kind == NodeKind::cell) {
            n["row"] = p.row;
            n["col"] = p.col;
            n["header"] = p.header;
        }
        nodes.push_back(std::move(n));
    }
    ordered_json edges = ordered_json::array();
    for (const auto& [a, b, kind] : g.edges)
        edges.push_back(ordered_json{{"a", a.key}, {"b", b.key}, {"kind", to_string(kind)}});
    return ordered_json{{"sub_table_headers", g.sub_table_headers},
                        {"nodes", std::move(nodes)},
                        {"edges", std::move(edges)}};
}

} // namespace hygraph
