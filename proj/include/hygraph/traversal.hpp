#pragma once
// Question-guided pruning: match question entities onto graph nodes, then
// breadth-first expand from the matched seeds for a bounded number of hops.
// Documents never count as hops; traversal moves cell<->cell along row
// edges and cell<->entity along link edges.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hygraph/hybrid_graph.hpp"
#include "hygraph/question_analysis.hpp"

namespace hygraph {

class SimilarityProvider {
public:
    virtual ~SimilarityProvider() = default;
    // Symmetric, in [0, 1].
    virtual double similarity(const std::string& a, const std::string& b) = 0;
    virtual const char* name() const = 0;
};

// Dice coefficient over normalized token sets. similarity(a, a) == 1.
class LexicalFallback : public SimilarityProvider {
public:
    double similarity(const std::string& a, const std::string& b) override;
    const char* name() const override { return "lexical_fallback"; }
};

// Cosine similarity (clamped to [0, 1]) between vectors from an HTTP
// embedding service: POST {"texts": [...]} -> {"embeddings": [[...], ...]}.
class ExternalEmbed : public SimilarityProvider {
public:
    explicit ExternalEmbed(std::string endpoint, std::shared_ptr<Transport> transport = nullptr);
    double similarity(const std::string& a, const std::string& b) override;
    const char* name() const override { return "external_embed"; }

private:
    std::vector<double> embed(const std::string& text);
    std::string endpoint_;
    std::shared_ptr<Transport> transport_;
    std::map<std::string, std::vector<double>> cache_;
    std::mutex mu_;
};

std::shared_ptr<SimilarityProvider> make_similarity_provider(const std::string& name,
                                                             const std::string& endpoint = {});

enum class SearchSpace { header_column, entity_total, expanded_all_columns };
const char* to_string(SearchSpace s);

struct MatchResult {
    std::string question_entity;
    std::optional<NodeId> matched_node; // set iff score >= threshold
    double score = 0.0;
    SearchSpace search_space = SearchSpace::header_column;
};

// One result per question entity whose best candidate clears the
// threshold. Header-mapped entities search their mapped columns (widening
// to every table column when nothing clears); "Others" entities search the
// extracted entity set. Empty result = nothing matched anywhere, callers
// fall back to full context. Note: expanded-column matches may name cells
// outside the current sub-table; rebuild the graph before seeding those.
std::vector<MatchResult> semantic_match(const QuestionAnalysis& analysis, const HybridGraph& g,
                                        const Table& table, SimilarityProvider& provider,
                                        double threshold);

struct PathTriple {
    std::string from;     // cell: "text; Header", entity: surface
    std::string relation; // target cell's header, or "entity"
    std::string to;
    NodeId from_node;
    NodeId to_node;
};

struct HopDictionary {
    std::map<int, std::vector<PathTriple>> hops; // 1..max_hops
    std::map<NodeId, int> distance;              // seeds at 0; only reached nodes
    std::vector<NodeId> seeds;
};

// Joint multi-source BFS; each node keeps its minimum hop distance and one
// discovery triple. Deterministic: frontier and neighbors in node order.
HopDictionary bfs_prune(const HybridGraph& g, const std::vector<NodeId>& seeds, int max_hops);

// {"1-hop": [[from, relation, to], ...], ...}
nlohmann::ordered_json hop_dictionary_to_json(const HopDictionary& hd);

// Marker object for the no-seeds case: the reader gets the whole instance.
struct FallbackContext {
    bool fallback = true;
    const TableTextInstance* instance = nullptr;
};

FallbackContext fallback_context(const TableTextInstance& inst);

} // namespace hygraph
