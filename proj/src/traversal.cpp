#include "hygraph/traversal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "hygraph/text.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

namespace hygraph {

double LexicalFallback::similarity(const std::string& a, const std::string& b) {
    std::string na = normalize_text(a);
    std::string nb = normalize_text(b);
    if (na == nb) return 1.0;
    auto ta = split_tokens(na);
    auto tb = split_tokens(nb);
    std::set<std::string> sa(ta.begin(), ta.end());
    std::set<std::string> sb(tb.begin(), tb.end());
    if (sa.empty() || sb.empty()) return 0.0;
    size_t shared = 0;
    for (const auto& t : sa)
        if (sb.count(t)) ++shared;
    return 2.0 * static_cast<double>(shared) / static_cast<double>(sa.size() + sb.size());
}

ExternalEmbed::ExternalEmbed(std::string endpoint, std::shared_ptr<Transport> transport)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {
    if (!transport_) transport_ = std::make_shared<HttpTransport>();
}

std::vector<double> ExternalEmbed::embed(const std::string& text) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(text);
        if (it != cache_.end()) return it->second;
    }
    TransportRequest req;
    req.url = endpoint_;
    req.body = json{{"texts", json::array({text})}}.dump();
    TransportResponse res = transport_->send(req);
    if (res.status != 200)
        throw GatewayError("embedding service returned HTTP " + std::to_string(res.status));
    std::vector<double> v;
    try {
        json j = json::parse(res.body);
        v = j.at("embeddings").at(0).get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw GatewayError(std::string("bad embedding response: ") + e.what());
    }
    if (v.empty()) throw GatewayError("embedding service returned an empty vector");
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(text, v);
    return v;
}

double ExternalEmbed::similarity(const std::string& a, const std::string& b) {
    std::vector<double> va = embed(a);
    std::vector<double> vb = embed(b);
    if (va.size() != vb.size())
        throw GatewayError("embedding dimensions disagree");
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < va.size(); ++i) {
        dot += va[i] * vb[i];
        na += va[i] * va[i];
        nb += vb[i] * vb[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    double cosine = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(cosine, 0.0, 1.0);
}

std::shared_ptr<SimilarityProvider> make_similarity_provider(const std::string& name,
                                                             const std::string& endpoint) {
    if (name == "lexical_fallback" || name.empty() || name == "lexical")
        return std::make_shared<LexicalFallback>();
    if (name == "external_embed" || name == "external") {
        if (endpoint.empty())
            throw std::invalid_argument("external_embed requires an embedding endpoint");
        return std::make_shared<ExternalEmbed>(endpoint);
    }
    throw std::invalid_argument("unknown similarity provider: " + name);
}

const char* to_string(SearchSpace s) {
    switch (s) {
        case SearchSpace::header_column: return "header_column";
        case SearchSpace::entity_total: return "entity_total";
        case SearchSpace::expanded_all_columns: return "expanded_all_columns";
    }
    return "?";
}

namespace {

struct Candidate {
    NodeId node;
    std::string label;
};

// Highest score wins; ties go to the lexicographically smaller node key.
std::optional<std::pair<Candidate, double>> best_candidate(const std::vector<Candidate>& candidates,
                                                          const std::string& query,
                                                          SimilarityProvider& provider,
                                                          double threshold) {
    std::optional<std::pair<Candidate, double>> best;
    for (const auto& cand : candidates) {
        double s = provider.similarity(query, cand.label);
        if (s < threshold) continue;
        if (!best || s > best->second || (s == best->second && cand.node < best->first.node))
            best = {cand, s};
    }
    return best;
}

std::vector<Candidate> column_candidates(const Table& table, const std::vector<int>& columns) {
    std::vector<Candidate> out;
    for (int c : columns)
        for (size_t r = 0; r < table.rows.size(); ++r)
            out.push_back({cell_node(static_cast<int>(r), c), table.at(static_cast<int>(r), c).text});
    return out;
}

} // namespace

std::vector<MatchResult> semantic_match(const QuestionAnalysis& analysis, const HybridGraph& g,
                                        const Table& table, SimilarityProvider& provider,
                                        double threshold) {
    if (threshold <= 0.0 || threshold > 1.0)
        throw std::invalid_argument("threshold must be in (0, 1]");

    std::vector<Candidate> entity_candidates;
    for (const auto& [id, payload] : g.nodes)
        if (id.kind == NodeKind::entity) entity_candidates.push_back({id, payload.label});

    std::vector<int> all_columns;
    for (size_t c = 0; c < table.headers.size(); ++c) all_columns.push_back(static_cast<int>(c));

    std::vector<MatchResult> out;
    for (const auto& entity : analysis.entities) {
        std::vector<std::string> mapped;
        if (auto it = analysis.entity_header_map.find(entity); it != analysis.entity_header_map.end())
            mapped = it->second;
        else
            mapped = {"Others"};

        std::vector<int> columns;
        bool has_others = false;
        for (const auto& m : mapped) {
            if (m == "Others") {
                has_others = true;
            } else if (auto c = table.header_index(m)) {
                columns.push_back(*c);
            }
        }
        const bool header_mapped = !columns.empty();

        std::vector<Candidate> pool;
        if (header_mapped) pool = column_candidates(table, columns);
        if (has_others || !header_mapped)
            pool.insert(pool.end(), entity_candidates.begin(), entity_candidates.end());

        MatchResult result;
        result.question_entity = entity;
        result.search_space = header_mapped ? SearchSpace::header_column : SearchSpace::entity_total;
        auto best = best_candidate(pool, entity, provider, threshold);
        if (!best && header_mapped) {
            // Nothing in the mapped columns: widen to the whole table.
            best = best_candidate(column_candidates(table, all_columns), entity, provider, threshold);
            result.search_space = SearchSpace::expanded_all_columns;
        }
        if (!best) continue;
        result.matched_node = best->first.node;
        result.score = best->second;
        out.push_back(std::move(result));
    }
    return out;
}

HopDictionary bfs_prune(const HybridGraph& g, const std::vector<NodeId>& seeds, int max_hops) {
    if (seeds.empty()) throw GraphError("bfs_prune: no seeds");
    HopDictionary hd;
    std::set<NodeId> seed_set(seeds.begin(), seeds.end());
    for (const auto& s : seed_set) {
        if (!g.nodes.count(s)) throw GraphError("bfs_prune: seed not in graph: " + s.key);
        hd.distance[s] = 0;
        hd.seeds.push_back(s);
    }

    auto display = [&](const NodeId& id, bool with_header) {
        const NodePayload& p = g.nodes.at(id);
        if (id.kind == NodeKind::cell && with_header) return p.label + "; " + p.header;
        return p.label;
    };

    std::deque<NodeId> frontier(hd.seeds.begin(), hd.seeds.end()); // already sorted
    while (!frontier.empty()) {
        NodeId u = frontier.front();
        frontier.pop_front();
        int du = hd.distance.at(u);
        if (du >= max_hops) continue;
        for (const auto& [v, kind] : g.neighbors(u)) {
            if (kind == EdgeKind::mention) continue; // documents are payload, not hops
            if (hd.distance.count(v)) continue;
            hd.distance[v] = du + 1;
            PathTriple t;
            t.from_node = u;
            t.to_node = v;
            t.from = display(u, /*with_header=*/u.kind == NodeKind::cell);
            t.relation = v.kind == NodeKind::cell ? g.nodes.at(v).header : "entity";
            t.to = display(v, false);
            hd.hops[du + 1].push_back(std::move(t));
            frontier.push_back(v);
        }
    }
    return hd;
}

ordered_json hop_dictionary_to_json(const HopDictionary& hd) {
    ordered_json out = ordered_json::object();
    int max_hop = 0;
    for (const auto& [k, _] : hd.hops) max_hop = std::max(max_hop, k);
    for (int k = 1; k <= std::max(max_hop, 3); ++k) {
        ordered_json triples = ordered_json::array();
        if (auto it = hd.hops.find(k); it != hd.hops.end())
            for (const auto& t : it->second)
                triples.push_back(ordered_json::array({t.from, t.relation, t.to}));
        out[std::to_string(k) + "-hop"] = std::move(triples);
    }
    return out;
}

FallbackContext fallback_context(const TableTextInstance& inst) {
    return FallbackContext{true, &inst};
}

} // namespace hygraph
