#pragma once
// Shared hand-built fixtures: a small race-results instance whose linked
// passages chain two rows through a common "British" mention, plus a
// scripted-gateway builder for driving pipelines without a network.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hygraph/corpus.hpp"
#include "hygraph/llm_gateway.hpp"
#include "hygraph/scripted.hpp"

namespace hygraph::testgen {

inline TableTextInstance race_instance() {
    TableTextInstance inst;
    inst.question_id = "q-race";
    inst.question = "what nationality is the driver in position 4 ?";
    inst.gold_answers = {"British"};
    inst.table.table_id = "gp";
    inst.table.headers = {"Pos", "Driver", "Time"};
    auto add_row = [&](int r, const char* pos, const char* driver, const char* time,
                       const char* doc_id) {
        Row row;
        Cell c0{r, 0, pos, {}};
        Cell c1{r, 1, driver, {}};
        Cell c2{r, 2, time, {}};
        if (*doc_id) c1.linked_doc_ids.push_back(doc_id);
        row.cells = {c0, c1, c2};
        inst.table.rows.push_back(row);
    };
    add_row(0, "4", "Jenson Button", "1:02", "d_jb");
    add_row(1, "7", "Juan Pablo Montoya", "1:09", "d_jpm");
    inst.documents["d_jb"] = {"d_jb", "Jenson Button",
                              "Jenson Button is a British racing driver ."};
    inst.documents["d_jpm"] = {"d_jpm", "Juan Pablo Montoya",
                               "He drove for the British team for six seasons ."};
    return inst;
}

// Live-mode gateway backed by a scripted transport. Returned by value; the
// gateway is neither copyable nor movable, so this relies on guaranteed
// elision -- always initialize a fresh variable from the call.
inline LlmGateway scripted_gateway(std::vector<ScriptRule> rules) {
    GatewayConfig cfg;
    cfg.mode = GatewayMode::live;
    cfg.endpoint = "http://scripted.test/v1";
    auto transport = std::make_shared<ScriptedTransport>(std::move(rules));
    return LlmGateway(cfg, transport);
}

// Rules that walk race_instance() to "British" at hop 1.
inline std::vector<ScriptRule> race_rules() {
    return {
        {"entity_extract", {}, "Entities: ['position 4', 'nationality']", -1},
        {"header_select", {}, "Relevant headers: ['Pos', 'Driver']", -1},
        {"entity_map", {}, "{'position 4': ['Pos'], 'nationality': ['Others']}", -1},
        {"reader", {}, "Final Answer: British", -1},
    };
}

} // namespace hygraph::testgen
