#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hygraph/metrics.hpp"
#include "support/metric_cases.hpp"

using namespace hygraph;

TEST_CASE("answer normalization") {
    CHECK(normalize_answer("The British") == "british");
    CHECK(normalize_answer("PS1.") == "ps1");
    CHECK(normalize_answer("") == "");
    CHECK(normalize_answer("A, B, and C") == "b and c");
    CHECK(normalize_answer("  Multiple   spaces  ") == "multiple spaces");
    CHECK(normalize_answer("don't") == "dont");
    CHECK(normalize_answer("1,301 acres") == "1301 acres");
    CHECK(normalize_answer("an The a") == "");
}

TEST_CASE("hand-derived scoring table") {
    for (const auto& c : testgen::metric_cases()) {
        CAPTURE(c.note);
        Score s = score(c.pred, c.golds);
        CHECK(s.em == c.em);
        CHECK(s.f1 == doctest::Approx(c.f1).epsilon(1e-9));
        CHECK(s.precision == doctest::Approx(c.precision).epsilon(1e-9));
        CHECK(s.recall == doctest::Approx(c.recall).epsilon(1e-9));
    }
}

TEST_CASE("over-long span lands on 0.667") {
    // The table above checks the exact fraction; this pins the rounded
    // contract value with its own tolerance.
    Score s = score("hosted by Regis Philbin", {"Regis Philbin"});
    CHECK(s.em == 0);
    CHECK(std::abs(s.f1 - 0.667) <= 0.001);
}

TEST_CASE("score rejects an empty gold list") {
    CHECK_THROWS_AS(score("x", {}), std::invalid_argument);
}

TEST_CASE("score is invariant to gold order and duplicates") {
    const std::vector<std::string> golds = {"alpha beta", "gamma", "alpha"};
    Score base = score("alpha beta", golds);
    std::vector<std::string> shuffled = {"gamma", "alpha", "alpha beta"};
    Score reordered = score("alpha beta", shuffled);
    CHECK(base.em == reordered.em);
    CHECK(base.f1 == doctest::Approx(reordered.f1));
    std::vector<std::string> doubled = golds;
    doubled.insert(doubled.end(), golds.begin(), golds.end());
    Score dup = score("alpha beta", doubled);
    CHECK(base.em == dup.em);
    CHECK(base.f1 == doctest::Approx(dup.f1));
}

namespace {

std::string random_answer(std::mt19937_64& rng) {
    static const char* words[] = {"red", "blue", "fast", "driver", "1984", "station", "of", "prix"};
    std::string s;
    const size_t n = 1 + rng() % 4;
    for (size_t i = 0; i < n; ++i) {
        if (!s.empty()) s.push_back(' ');
        s += words[rng() % 8];
    }
    return s;
}

// Same normalized form, different surface: case flips, articles,
// punctuation, padding.
std::string decorate(std::string s, std::mt19937_64& rng) {
    switch (rng() % 4) {
        case 0: std::transform(s.begin(), s.end(), s.begin(), ::toupper); return s;
        case 1: return "the " + s;
        case 2: return "  " + s + ".";
        default: return s + "!";
    }
}

} // namespace

TEST_CASE("exact match forces full overlap on 1000 random pairs") {
    std::mt19937_64 rng(4242);
    int exact_seen = 0;
    for (int i = 0; i < 1000; ++i) {
        std::string gold = random_answer(rng);
        std::string pred = (rng() % 2) ? decorate(gold, rng) : random_answer(rng);
        Score s = score(pred, {gold});
        if (s.em == 1) {
            ++exact_seen;
            CHECK(s.f1 == doctest::Approx(1.0));
            CHECK(s.precision == doctest::Approx(1.0));
            CHECK(s.recall == doctest::Approx(1.0));
        }
        CHECK(s.f1 >= 0.0);
        CHECK(s.f1 <= 1.0);
        // F1 is the harmonic mean: zero iff either side is zero.
        if (s.precision == 0.0 || s.recall == 0.0) CHECK(s.f1 == 0.0);
    }
    CHECK(exact_seen > 300); // the decorated half should mostly hit
}

TEST_CASE("standard error formula") {
    CHECK(standard_error(0.5, 100) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(standard_error(0.0, 50) == 0.0);
    CHECK(standard_error(1.0, 50) == 0.0);
    CHECK(standard_error(0.5, 0) == 0.0);
}

TEST_CASE("token reduction percentage") {
    // Reference figures for the headline reduction claim.
    CHECK(std::abs(reduction_percent(3857.0, 7195.0) - 46.4) <= 0.05);
    CHECK(reduction_percent(50.0, 100.0) == doctest::Approx(50.0));
    CHECK(reduction_percent(100.0, 100.0) == doctest::Approx(0.0));
    CHECK(reduction_percent(10.0, 0.0) == 0.0);
}

namespace {

ScoreRow make_row(const std::string& id, int em, double f1, const std::string& hop,
                  size_t reader_in, const std::string& mode = "odyssey_hopwise") {
    ScoreRow r;
    r.question_id = id;
    r.em = em;
    r.f1 = f1;
    r.precision = f1;
    r.recall = f1;
    r.hop_answered = hop;
    r.full_context_used = hop == "full";
    r.reader_input_tokens = reader_in;
    r.total_input_tokens = reader_in + 100;
    r.mode = mode;
    return r;
}

} // namespace

TEST_CASE("report aggregation") {
    CHECK_THROWS_AS(make_report({}), std::invalid_argument);

    SUBCASE("singleton run") {
        RunReport r = make_report({make_row("q0", 1, 1.0, "1", 500)});
        CHECK(r.n == 1);
        CHECK(r.em == doctest::Approx(100.0));
        CHECK(r.f1 == doctest::Approx(100.0));
        CHECK(r.mean_reader_input_tokens == doctest::Approx(500.0));
        CHECK(r.full_context_count == 0);
    }

    SUBCASE("cumulative hopwise closes at the overall EM") {
        std::vector<ScoreRow> rows = {
            make_row("q0", 1, 1.0, "1", 300), make_row("q1", 0, 0.5, "1", 350),
            make_row("q2", 1, 1.0, "2", 700), make_row("q3", 0, 0.0, "3", 900),
            make_row("q4", 1, 1.0, "full", 1400),
        };
        RunReport r = make_report(rows);
        CHECK(r.em == doctest::Approx(60.0));
        CHECK(r.full_context_count == 1);
        REQUIRE(r.hopwise.size() == 4); // buckets 1,2,3,full; no "single"
        CHECK(r.hopwise[0].bucket == "1");
        CHECK(r.hopwise[0].answered == 2);
        CHECK(r.hopwise[0].cumulative_em == doctest::Approx(0.2)); // 1 of 5
        CHECK(r.hopwise[1].cumulative_em == doctest::Approx(0.4));
        CHECK(r.hopwise[2].cumulative_em == doctest::Approx(0.4));
        CHECK(r.hopwise[3].bucket == "full");
        // Tail bucket matches the overall EM (fraction vs percent).
        CHECK(r.hopwise.back().cumulative_em == doctest::Approx(r.em / 100.0));
        for (const auto& pt : r.hopwise)
            CHECK(pt.se == doctest::Approx(standard_error(pt.cumulative_em, rows.size())));
    }

    SUBCASE("cost scales with the configured rate") {
        RunReport r = make_report({make_row("q0", 1, 1.0, "1", 1000)}, 10.0);
        CHECK(r.est_cost_usd == doctest::Approx(0.01)); // 1000 tokens at $10/1M
        RunReport cheap = make_report({make_row("q0", 1, 1.0, "1", 1000)}, 1.0);
        CHECK(cheap.est_cost_usd == doctest::Approx(0.001));
    }

    SUBCASE("aggregates stay in range") {
        std::mt19937_64 rng(7);
        std::vector<ScoreRow> rows;
        for (int i = 0; i < 40; ++i)
            rows.push_back(make_row("q" + std::to_string(i), static_cast<int>(rng() % 2),
                                    static_cast<double>(rng() % 101) / 100.0,
                                    (rng() % 2) ? "1" : "2", rng() % 3000));
        RunReport r = make_report(rows);
        for (double v : {r.em, r.f1, r.precision, r.recall}) {
            CHECK(v >= 0.0);
            CHECK(v <= 100.0);
        }
    }
}

TEST_CASE("markdown report renders one column per run") {
    RunReport a = make_report({make_row("q0", 1, 1.0, "1", 500)});
    RunReport b = make_report({make_row("q0", 0, 0.5, "single", 900, "odyssey_flat")});
    std::string md = report_markdown({a, b});
    CHECK(md.find("| Metric | odyssey_hopwise | odyssey_flat |") != std::string::npos);
    CHECK(md.find("| EM | 100.0 | 0.0 |") != std::string::npos);
    CHECK(md.find("Mean reader input tokens") != std::string::npos);
    CHECK(md.find("Full-context fallbacks | 0/1 | 0/1 |") != std::string::npos);
}

TEST_CASE("hopwise csv shape") {
    RunReport r = make_report({make_row("q0", 1, 1.0, "1", 500), make_row("q1", 0, 0.0, "2", 800)});
    std::string csv = hopwise_csv(r);
    CHECK(csv.rfind("bucket,answered,cumulative_em,se\n", 0) == 0);
    CHECK(csv.find("1,1,0.500000,") != std::string::npos);
    CHECK(csv.find("2,1,0.500000,") != std::string::npos);
}
