#include "hygraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hygraph/text.hpp"

namespace hygraph {

std::string normalize_answer(const std::string& s) {
    std::string lowered = normalize_text(s);
    std::string no_punct;
    no_punct.reserve(lowered.size());
    for (unsigned char c : lowered)
        if (!std::ispunct(c)) no_punct.push_back(static_cast<char>(c)); // deleted, not spaced
    std::string out;
    for (const auto& tok : split_tokens(no_punct)) {
        if (tok == "a" || tok == "an" || tok == "the") continue;
        if (!out.empty()) out.push_back(' ');
        out += tok;
    }
    return out;
}

namespace {

Score score_single(const std::vector<std::string>& pred_tokens, const std::string& pred_norm,
                   const std::string& gold) {
    Score s;
    std::string gold_norm = normalize_answer(gold);
    auto gold_tokens = split_tokens(gold_norm);
    s.em = pred_norm == gold_norm ? 1 : 0;
    if (pred_tokens.empty() || gold_tokens.empty()) {
        // No tokens to overlap: score degenerates to exact equality.
        s.f1 = s.precision = s.recall = static_cast<double>(s.em);
        return s;
    }
    std::map<std::string, int> counts;
    for (const auto& t : gold_tokens) ++counts[t];
    size_t overlap = 0;
    for (const auto& t : pred_tokens) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return s;
    s.precision = static_cast<double>(overlap) / static_cast<double>(pred_tokens.size());
    s.recall = static_cast<double>(overlap) / static_cast<double>(gold_tokens.size());
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

} // namespace

Score score(const std::string& pred, const std::vector<std::string>& golds) {
    if (golds.empty()) throw std::invalid_argument("score: empty gold list");
    std::string pred_norm = normalize_answer(pred);
    auto pred_tokens = split_tokens(pred_norm);
    Score best;
    bool first = true;
    for (const auto& gold : golds) {
        Score s = score_single(pred_tokens, pred_norm, gold);
        if (first || s.f1 > best.f1) {
            int em = std::max(best.em, s.em);
            best = s;
            best.em = em;
            first = false;
        } else {
            best.em = std::max(best.em, s.em);
        }
    }
    return best;
}

double standard_error(double em, size_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(em * (1.0 - em) / static_cast<double>(n));
}

RunReport make_report(const std::vector<ScoreRow>& rows, double usd_per_million_input) {
    if (rows.empty()) throw std::invalid_argument("make_report: no rows");
    RunReport r;
    r.mode = rows.front().mode;
    r.n = rows.size();
    double em = 0, f1 = 0, p = 0, rec = 0, rin = 0, rout = 0, tin = 0;
    for (const auto& row : rows) {
        em += row.em;
        f1 += row.f1;
        p += row.precision;
        rec += row.recall;
        rin += static_cast<double>(row.reader_input_tokens);
        rout += static_cast<double>(row.reader_output_tokens);
        tin += static_cast<double>(row.total_input_tokens);
        if (row.full_context_used) ++r.full_context_count;
    }
    const double n = static_cast<double>(r.n);
    r.em = 100.0 * em / n;
    r.f1 = 100.0 * f1 / n;
    r.precision = 100.0 * p / n;
    r.recall = 100.0 * rec / n;
    r.mean_reader_input_tokens = rin / n;
    r.mean_reader_output_tokens = rout / n;
    r.mean_total_input_tokens = tin / n;
    r.est_cost_usd = r.mean_reader_input_tokens * usd_per_million_input / 1e6;

    // Cumulative EM as the answer hop advances; the tail bucket ("full" or
    // "single") closes the gap to the overall EM.
    static const std::vector<std::string> order = {"1", "2", "3", "full", "single"};
    double cumulative = 0;
    for (const auto& bucket : order) {
        HopwisePoint pt;
        pt.bucket = bucket;
        for (const auto& row : rows)
            if (row.hop_answered == bucket) {
                ++pt.answered;
                cumulative += row.em;
            }
        if (pt.answered == 0 && (bucket == "single" || bucket == "full")) continue;
        pt.cumulative_em = cumulative / n;
        pt.se = standard_error(pt.cumulative_em, r.n);
        r.hopwise.push_back(std::move(pt));
    }
    return r;
}

namespace {

std::string fmt(double v, int precision = 1) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(precision);
    os << v;
    return os.str();
}

} // namespace

std::string report_markdown(const std::vector<RunReport>& reports) {
    std::ostringstream os;
    os << "| Metric |";
    for (const auto& r : reports) os << ' ' << r.mode << " |";
    os << "\n|---|";
    for (size_t i = 0; i < reports.size(); ++i) os << "---|";
    os << '\n';
    auto row = [&](const std::string& name, auto getter, int precision = 1) {
        os << "| " << name << " |";
        for (const auto& r : reports) os << ' ' << fmt(getter(r), precision) << " |";
        os << '\n';
    };
    row("EM", [](const RunReport& r) { return r.em; });
    row("F1", [](const RunReport& r) { return r.f1; });
    row("Precision", [](const RunReport& r) { return r.precision; });
    row("Recall", [](const RunReport& r) { return r.recall; });
    row("Mean reader input tokens", [](const RunReport& r) { return r.mean_reader_input_tokens; });
    row("Mean reader output tokens", [](const RunReport& r) { return r.mean_reader_output_tokens; });
    row("Est. cost ($/question)", [](const RunReport& r) { return r.est_cost_usd; }, 6);
    os << "| Full-context fallbacks |";
    for (const auto& r : reports) os << ' ' << r.full_context_count << "/" << r.n << " |";
    os << '\n';
    return os.str();
}

std::string hopwise_csv(const RunReport& report) {
    std::ostringstream os;
    os << "bucket,answered,cumulative_em,se\n";
    for (const auto& pt : report.hopwise)
        os << pt.bucket << ',' << pt.answered << ',' << fmt(pt.cumulative_em, 6) << ','
           << fmt(pt.se, 6) << '\n';
    return os.str();
}

double reduction_percent(double method_tokens, double baseline_tokens) {
    if (baseline_tokens <= 0) return 0.0;
    return 100.0 * (1.0 - method_tokens / baseline_tokens);
}

} // namespace hygraph
