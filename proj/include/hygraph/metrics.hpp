#pragma once
// Answer scoring and run aggregation. Normalization and token-overlap
// scoring follow the common extractive-QA recipe: lowercase, delete
// punctuation, drop articles, compare token multisets, take the best gold.

#include <string>
#include <vector>

namespace hygraph {

std::string normalize_answer(const std::string& s);

struct Score {
    int em = 0;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

// Max over golds: EM from any exact normalized match; F1/P/R from the gold
// with the highest F1. golds must be non-empty.
Score score(const std::string& pred, const std::vector<std::string>& golds);

double standard_error(double em, size_t n); // sqrt(em * (1 - em) / n)

struct ScoreRow {
    std::string question_id;
    int em = 0;
    double f1 = 0.0, precision = 0.0, recall = 0.0;
    std::string hop_answered = "none"; // none | 1..3 | full | single
    bool full_context_used = false;
    size_t reader_input_tokens = 0; // prompt tokens of reader-purpose calls
    size_t reader_output_tokens = 0;
    size_t total_input_tokens = 0;  // every call incl. analysis/summaries
    size_t total_output_tokens = 0;
    std::string mode;
};

struct HopwisePoint {
    std::string bucket;    // "1".."3", "full", "single"
    size_t answered = 0;   // instances answered in this bucket
    double cumulative_em = 0.0; // in [0,1], over all n
    double se = 0.0;
};

struct RunReport {
    std::string mode;
    size_t n = 0;
    double em = 0.0, f1 = 0.0, precision = 0.0, recall = 0.0; // x100
    double mean_reader_input_tokens = 0.0;
    double mean_reader_output_tokens = 0.0;
    double mean_total_input_tokens = 0.0;
    double est_cost_usd = 0.0; // mean reader input x rate
    size_t full_context_count = 0;
    std::vector<HopwisePoint> hopwise;
};

// usd_per_million_input defaults to the data-collection-era flagship rate.
RunReport make_report(const std::vector<ScoreRow>& rows, double usd_per_million_input = 10.0);

// Side-by-side markdown table, one column per report.
std::string report_markdown(const std::vector<RunReport>& reports);

// bucket,answered,cumulative_em,se rows for plotting.
std::string hopwise_csv(const RunReport& report);

// 1 - method/baseline, as a percentage.
double reduction_percent(double method_tokens, double baseline_tokens);

} // namespace hygraph
