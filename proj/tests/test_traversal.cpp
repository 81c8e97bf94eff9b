#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hygraph/corpus.hpp"
#include "hygraph/llm_gateway.hpp"
#include "hygraph/ner.hpp"
#include "hygraph/traversal.hpp"
#include "support/generators.hpp"

using namespace hygraph;
using nlohmann::json;

TEST_CASE("lexical similarity") {
    LexicalFallback sim;
    CHECK(sim.similarity("British", "british") == doctest::Approx(1.0));
    CHECK(sim.similarity("", "x") == 0.0);
    // Equal normalized forms short-circuit to 1, even when both are empty.
    CHECK(sim.similarity("", "") == 1.0);
    CHECK(sim.similarity("red", "blue") == 0.0);
    // Token-set Dice: {position, 4} vs {4} -> 2*1/(2+1).
    CHECK(sim.similarity("position 4", "4") == doctest::Approx(2.0 / 3.0));
    CHECK(sim.similarity("Jenson Button", "Button") == doctest::Approx(2.0 / 3.0));

    SUBCASE("symmetric on random pairs") {
        testgen::Rng rng(5);
        for (int i = 0; i < 200; ++i) {
            std::string a = testgen::lower_word(rng) + " " + testgen::title_word(rng);
            std::string b = testgen::lower_word(rng);
            CHECK(sim.similarity(a, b) == doctest::Approx(sim.similarity(b, a)));
            CHECK(sim.similarity(a, a) == doctest::Approx(1.0));
        }
    }
}

namespace {

class FakeEmbedder : public Transport {
public:
    TransportResponse send(const TransportRequest& req) override {
        ++calls;
        json body = json::parse(req.body);
        json embeddings = json::array();
        for (const auto& t : body.at("texts")) {
            // Orthogonal-ish toy vectors: "apple" -> x axis, rest -> y.
            if (t.get<std::string>() == "apple")
                embeddings.push_back(json::array({1.0, 0.0}));
            else
                embeddings.push_back(json::array({0.0, 2.0}));
        }
        return {200, json{{"embeddings", embeddings}}.dump()};
    }
    int calls = 0;
};

} // namespace

TEST_CASE("external embedding provider") {
    auto transport = std::make_shared<FakeEmbedder>();
    ExternalEmbed embed("http://embed.test/v1", transport);
    CHECK(embed.similarity("apple", "apple") == doctest::Approx(1.0));
    CHECK(embed.similarity("apple", "pear") == doctest::Approx(0.0)); // orthogonal
    CHECK(embed.similarity("pear", "plum") == doctest::Approx(1.0));  // same direction
    int calls_before = transport->calls;
    embed.similarity("apple", "pear"); // both vectors already cached
    CHECK(transport->calls == calls_before);

    SUBCASE("service failure surfaces as a gateway error") {
        class Broken : public Transport {
            TransportResponse send(const TransportRequest&) override { return {503, "down"}; }
        };
        ExternalEmbed sad("http://embed.test/v1", std::make_shared<Broken>());
        CHECK_THROWS_AS(sad.similarity("a", "b"), GatewayError);
    }
}

TEST_CASE("similarity provider factory") {
    CHECK(std::string(make_similarity_provider("lexical_fallback")->name()) == "lexical_fallback");
    CHECK(std::string(make_similarity_provider("external_embed", "http://e")->name()) ==
          "external_embed");
    CHECK_THROWS_AS(make_similarity_provider("external_embed", ""), std::invalid_argument);
    CHECK_THROWS_AS(make_similarity_provider("instructor-xl", ""), std::invalid_argument);
}

namespace {

// Race-shaped fixture: seed cell "4" -> same-row driver -> shared entity ->
// other-row driver. Mirrors the canonical worked example.
struct RaceWorld {
    TableTextInstance inst;
    HybridGraph graph;
    QuestionAnalysis analysis;
};

RaceWorld race_world() {
    RaceWorld w;
    w.inst.question_id = "race";
    w.inst.question = "what nationality is the driver in position 4 ?";
    w.inst.table.table_id = "gp";
    w.inst.table.headers = {"Pos", "Driver"};
    auto add_row = [&](int r, const std::string& pos, const std::string& driver,
                       const std::string& doc_id) {
        Row row;
        Cell c0{r, 0, pos, {}};
        Cell c1{r, 1, driver, {}};
        if (!doc_id.empty()) c1.linked_doc_ids.push_back(doc_id);
        row.cells = {c0, c1};
        w.inst.table.rows.push_back(row);
    };
    add_row(0, "4", "Jenson Button", "d_jb");
    add_row(1, "7", "Juan Pablo Montoya", "d_jpm");
    add_row(2, "9", "Nick Heidfeld", "");
    w.inst.documents["d_jb"] = {"d_jb", "Jenson Button",
                                "Jenson Button is a British racing driver ."};
    w.inst.documents["d_jpm"] = {"d_jpm", "Juan Pablo Montoya",
                                 "He drove for the British team for six seasons ."};

    w.analysis.entities = {"driver", "position 4", "nationality"};
    w.analysis.relevant_headers = {"Pos", "Driver"};
    w.analysis.entity_header_map = {{"driver", {"Driver"}},
                                    {"position 4", {"Pos"}},
                                    {"nationality", {"Others"}}};

    auto fragment = build_entity_document_graph(w.inst.documents, rule_ner);
    SubTable sub = retrieve_sub_table(w.inst.table, w.analysis.relevant_headers);
    w.graph = assemble_hybrid_graph(sub, fragment, w.inst);
    return w;
}

bool matched(const std::vector<MatchResult>& ms, const std::string& entity,
             const std::string& key) {
    return std::any_of(ms.begin(), ms.end(), [&](const MatchResult& m) {
        return m.question_entity == entity && m.matched_node && m.matched_node->key == key;
    });
}

} // namespace

TEST_CASE("semantic matching") {
    auto w = race_world();
    LexicalFallback sim;

    SUBCASE("threshold domain") {
        CHECK_THROWS_AS(semantic_match(w.analysis, w.graph, w.inst.table, sim, 0.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(semantic_match(w.analysis, w.graph, w.inst.table, sim, 1.2),
                        std::invalid_argument);
    }

    SUBCASE("column-mapped entity matches its column cell") {
        auto ms = semantic_match(w.analysis, w.graph, w.inst.table, sim, 0.6);
        CHECK(matched(ms, "position 4", "r0:h0")); // Dice("position 4","4") = 2/3
        for (const auto& m : ms)
            if (m.question_entity == "position 4") {
                CHECK(m.score == doctest::Approx(2.0 / 3.0));
                CHECK(m.search_space == SearchSpace::header_column);
            }
    }

    SUBCASE("Others-mapped entity searches the document entities") {
        QuestionAnalysis qa = w.analysis;
        qa.entities = {"the British"};
        qa.entity_header_map = {{"the British", {"Others"}}};
        auto ms = semantic_match(qa, w.graph, w.inst.table, sim, 0.6);
        REQUIRE(ms.size() == 1);
        CHECK(ms[0].matched_node->kind == NodeKind::entity);
        CHECK(ms[0].matched_node->key == "british");
        CHECK(ms[0].search_space == SearchSpace::entity_total);
    }

    SUBCASE("no match anywhere yields an empty list") {
        QuestionAnalysis qa;
        qa.entities = {"quantum flux"};
        qa.relevant_headers = w.analysis.relevant_headers;
        qa.entity_header_map = {{"quantum flux", {"Others"}}};
        CHECK(semantic_match(qa, w.graph, w.inst.table, sim, 0.8).empty());
    }

    SUBCASE("unmatched column entity expands to every column") {
        QuestionAnalysis qa;
        qa.entities = {"Nick Heidfeld"};
        qa.relevant_headers = {"Pos"};
        qa.entity_header_map = {{"Nick Heidfeld", {"Pos"}}}; // wrong column
        auto ms = semantic_match(qa, w.graph, w.inst.table, sim, 0.9);
        REQUIRE(ms.size() == 1);
        CHECK(ms[0].matched_node->key == "r2:h1");
        CHECK(ms[0].search_space == SearchSpace::expanded_all_columns);
    }

    SUBCASE("exact normalized equality scores 1") {
        QuestionAnalysis qa;
        qa.entities = {"jenson button"};
        qa.relevant_headers = {"Driver"};
        qa.entity_header_map = {{"jenson button", {"Driver"}}};
        auto ms = semantic_match(qa, w.graph, w.inst.table, sim, 0.8);
        REQUIRE(ms.size() == 1);
        CHECK(ms[0].score == doctest::Approx(1.0));
        CHECK(ms[0].matched_node->key == "r0:h1");
    }

    SUBCASE("score ties break to the smaller node key") {
        // Two identical cells in the mapped column.
        TableTextInstance inst;
        inst.question_id = "tie";
        inst.question = "?";
        inst.table.table_id = "tt";
        inst.table.headers = {"Name"};
        for (int r = 0; r < 2; ++r) {
            Row row;
            Cell c{r, 0, "Twin", {}};
            row.cells = {c};
            inst.table.rows.push_back(row);
        }
        auto fragment = build_entity_document_graph(inst.documents, rule_ner);
        SubTable sub = retrieve_sub_table(inst.table, {"Name"});
        HybridGraph g = assemble_hybrid_graph(sub, fragment, inst);
        QuestionAnalysis qa;
        qa.entities = {"Twin"};
        qa.relevant_headers = {"Name"};
        qa.entity_header_map = {{"Twin", {"Name"}}};
        LexicalFallback lex;
        auto ms = semantic_match(qa, g, inst.table, lex, 0.8);
        REQUIRE(ms.size() == 1);
        CHECK(ms[0].matched_node->key == "r0:h0");
    }
}

TEST_CASE("bfs pruning on the race fixture") {
    auto w = race_world();

    SUBCASE("seed validation") {
        CHECK_THROWS_AS(bfs_prune(w.graph, {}, 3), GraphError);
        CHECK_THROWS_AS(bfs_prune(w.graph, {cell_node(99, 99)}, 3), GraphError);
    }

    auto hd = bfs_prune(w.graph, {cell_node(0, 0)}, 3);

    SUBCASE("hop triples follow the from/relation/to convention") {
        REQUIRE(hd.hops.count(1));
        bool hop1 = std::any_of(hd.hops.at(1).begin(), hd.hops.at(1).end(), [](const PathTriple& t) {
            return t.from == "4; Pos" && t.relation == "Driver" && t.to == "Jenson Button";
        });
        CHECK(hop1);
        REQUIRE(hd.hops.count(2));
        bool hop2 = std::any_of(hd.hops.at(2).begin(), hd.hops.at(2).end(), [](const PathTriple& t) {
            return t.from == "Jenson Button; Driver" && t.relation == "entity" && t.to == "British";
        });
        CHECK(hop2);
        REQUIRE(hd.hops.count(3));
        bool hop3 = std::any_of(hd.hops.at(3).begin(), hd.hops.at(3).end(), [](const PathTriple& t) {
            return t.from == "British" && t.relation == "Driver" && t.to == "Juan Pablo Montoya";
        });
        CHECK(hop3);
    }

    SUBCASE("documents never enter the hop structure") {
        for (const auto& [node, dist] : hd.distance) CHECK(node.kind != NodeKind::document);
    }

    SUBCASE("seeds sit at distance zero") {
        CHECK(hd.distance.at(cell_node(0, 0)) == 0);
        CHECK(hd.seeds == std::vector<NodeId>{cell_node(0, 0)});
    }

    SUBCASE("unlinked row stays unreached") {
        // Row 2 has no linked passage; nothing bridges to it.
        CHECK(hd.distance.count(cell_node(2, 0)) == 0);
        CHECK(hd.distance.count(cell_node(2, 1)) == 0);
    }

    SUBCASE("json shape matches the hop buckets") {
        auto j = hop_dictionary_to_json(hd);
        REQUIRE(j.contains("1-hop"));
        auto first = j.at("1-hop").at(0).get<std::vector<std::string>>();
        CHECK(first.size() == 3);
    }

    SUBCASE("dead-end seed stops after the row hop") {
        auto lonely = bfs_prune(w.graph, {cell_node(2, 0)}, 3);
        // Row edge still reaches the sibling cell, nothing further.
        CHECK(lonely.hops.at(1).size() == 1);
        CHECK(lonely.hops.count(2) == 0);
        CHECK(lonely.distance.size() == 2);
    }
}

TEST_CASE("fallback context flags the whole instance") {
    auto w = race_world();
    auto fc = fallback_context(w.inst);
    CHECK(fc.fallback);
    CHECK(fc.instance == &w.inst);
}

namespace {

constexpr int kInf = 1 << 20;

// Independent distance oracle over the traversal relation (row and link
// edges only; documents excluded).
std::vector<std::vector<int>> floyd_warshall(const HybridGraph& g,
                                             const std::map<NodeId, int>& index) {
    const int n = static_cast<int>(index.size());
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, kInf));
    for (int i = 0; i < n; ++i) dist[i][i] = 0;
    for (const auto& [a, b, kind] : g.edges) {
        if (kind == EdgeKind::mention) continue;
        auto ia = index.find(a);
        auto ib = index.find(b);
        if (ia == index.end() || ib == index.end()) continue;
        dist[ia->second][ib->second] = 1;
        dist[ib->second][ia->second] = 1;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (dist[i][k] + dist[k][j] < dist[i][j]) dist[i][j] = dist[i][k] + dist[k][j];
    return dist;
}

} // namespace

TEST_CASE("bfs distances equal the Floyd-Warshall oracle on 200 random graphs") {
    testgen::Rng rng(77);
    for (int iter = 0; iter < 200; ++iter) {
        CAPTURE(iter);
        auto world = testgen::random_traversal_graph(rng, 50);
        REQUIRE(world.graph.nodes.size() <= 50);

        // Index the non-document nodes; documents are payload, not hops.
        std::map<NodeId, int> index;
        for (const auto& [id, payload] : world.graph.nodes)
            if (id.kind != NodeKind::document)
                index.emplace(id, static_cast<int>(index.size()));

        auto dist = floyd_warshall(world.graph, index);
        const int max_hops = 3;
        auto hd = bfs_prune(world.graph, world.seeds, max_hops);

        for (const auto& [id, idx] : index) {
            int oracle = kInf;
            for (const auto& seed : world.seeds) oracle = std::min(oracle, dist[index.at(seed)][idx]);
            auto it = hd.distance.find(id);
            if (oracle <= max_hops) {
                REQUIRE(it != hd.distance.end());
                REQUIRE(it->second == oracle);
            } else {
                REQUIRE(it == hd.distance.end());
            }
        }

        // Triples land in the bucket of their target's distance, and extend
        // a node one hop closer.
        for (const auto& [hop, triples] : hd.hops)
            for (const auto& t : triples) {
                REQUIRE(hd.distance.at(t.to_node) == hop);
                REQUIRE(hd.distance.at(t.from_node) == hop - 1);
            }
    }
}

TEST_CASE("grand prix fixture: seed, triples, and hop shape") {
    auto corpus = load_corpus(std::string(HYGRAPH_FIXTURES_DIR) + "/a2_grand_prix.jsonl",
                              CorpusFormat::native);
    REQUIRE(corpus.size() == 1);
    const TableTextInstance& inst = corpus[0];

    QuestionAnalysis qa;
    qa.entities = {"position 4"};
    qa.relevant_headers = {"Pos", "Driver"};
    qa.entity_header_map = {{"position 4", {"Pos"}}};

    auto fragment = build_entity_document_graph(inst.documents, rule_ner);
    SubTable sub = retrieve_sub_table(inst.table, qa.relevant_headers);
    HybridGraph g = assemble_hybrid_graph(sub, fragment, inst);

    LexicalFallback sim;
    auto ms = semantic_match(qa, g, inst.table, sim, 0.6);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].matched_node->key == "r3:h0"); // the "4" cell
    CHECK(ms[0].score == doctest::Approx(2.0 / 3.0));

    auto hd = bfs_prune(g, {*ms[0].matched_node}, 3);
    auto has_triple = [&](int hop, const char* from, const char* rel, const char* to) {
        const auto& bucket = hd.hops.at(hop);
        return std::any_of(bucket.begin(), bucket.end(), [&](const PathTriple& t) {
            return t.from == from && t.relation == rel && t.to == to;
        });
    };
    CHECK(has_triple(1, "4; Pos", "Driver", "Jenson Button"));
    CHECK(has_triple(2, "Jenson Button; Driver", "entity", "British"));
    CHECK(has_triple(3, "British", "Driver", "Juan Pablo Montoya"));
    // Shared "Formula One" mention also pulls in the winner's row.
    CHECK(has_triple(3, "Formula One", "Driver", "Michael Schumacher"));
}

TEST_CASE("hop sets grow monotonically with the hop budget") {
    testgen::Rng rng(78);
    for (int iter = 0; iter < 50; ++iter) {
        CAPTURE(iter);
        auto world = testgen::random_traversal_graph(rng, 40);
        std::map<int, HopDictionary> runs;
        for (int k = 1; k <= 3; ++k) runs.emplace(k, bfs_prune(world.graph, world.seeds, k));
        for (int k = 1; k < 3; ++k) {
            const auto& small = runs.at(k);
            const auto& big = runs.at(k + 1);
            for (const auto& [node, d] : small.distance) {
                REQUIRE(big.distance.count(node) == 1);
                REQUIRE(big.distance.at(node) == d);
            }
            // Shared hop buckets agree exactly.
            for (const auto& [h, a] : small.hops) {
                REQUIRE(big.hops.count(h) == 1);
                const auto& b = big.hops.at(h);
                REQUIRE(a.size() == b.size());
                for (size_t i = 0; i < a.size(); ++i) {
                    REQUIRE(a[i].from == b[i].from);
                    REQUIRE(a[i].to == b[i].to);
                }
            }
        }
    }
}
