#pragma once
// End-to-end processing of one instance under a chosen run mode: analysis,
// graph construction, matching, traversal and the reader call(s).

#include <memory>
#include <string>

#include <json.hpp>

#include "hygraph/metrics.hpp"
#include "hygraph/ner.hpp"
#include "hygraph/question_analysis.hpp"
#include "hygraph/reader.hpp"
#include "hygraph/traversal.hpp"

namespace hygraph {

struct PipelineOptions {
    RunMode mode = RunMode::odyssey_hopwise;
    AnalysisOptions analysis;
    ReaderOptions reader;
    NerOptions ner;
    double threshold = 0.8;
    std::shared_ptr<SimilarityProvider> similarity; // lexical fallback when null
};

struct InstanceResult {
    std::string question_id;
    RunMode mode = RunMode::odyssey_hopwise;
    QuestionAnalysis analysis;            // odyssey modes only
    std::vector<MatchResult> matches;
    nlohmann::ordered_json hop_dict;      // serialized HopDictionary, or null
    ReaderOutcome outcome;
    std::vector<LlmExchange> exchanges;   // every call made for this instance
    Score answer_score;
    bool scored = false;                  // golds were present
    std::string error;                    // non-empty when processing failed
    std::string missing_cache_key;        // set on replay miss
};

// Never throws: failures land in result.error (replay misses also fill
// missing_cache_key) so a batch run can report them together.
InstanceResult run_instance(const TableTextInstance& inst, CompletionService& gw,
                            const PipelineOptions& opt);

ScoreRow to_score_row(const InstanceResult& result);

} // namespace hygraph
