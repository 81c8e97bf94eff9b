#pragma once
// Hand-derived scoring table. Every row was worked out on paper from the
// normalization rules (lowercase, delete punctuation, drop a/an/the,
// collapse whitespace) and multiset token overlap, so these values are an
// oracle for score(), not a snapshot of its output.

#include <string>
#include <vector>

namespace hygraph::testgen {

struct MetricCase {
    const char* note;
    std::string pred;
    std::vector<std::string> golds;
    int em;
    double f1;
    double precision;
    double recall;
};

inline const std::vector<MetricCase>& metric_cases() {
    static const std::vector<MetricCase> cases = {
        {"exact match", "British", {"British"}, 1, 1.0, 1.0, 1.0},
        // 2 of 4 prediction tokens overlap, both gold tokens covered:
        // P = 1/2, R = 1, F1 = 2*(1/2)*1 / (3/2) = 2/3.
        {"over-long span", "hosted by Regis Philbin", {"Regis Philbin"}, 0, 2.0 / 3.0, 0.5, 1.0},
        {"article + case", "The British", {"british"}, 1, 1.0, 1.0, 1.0},
        {"trailing punctuation", "PS1.", {"PS1"}, 1, 1.0, 1.0, 1.0},
        {"disjoint", "paris", {"london"}, 0, 0.0, 0.0, 0.0},
        {"empty prediction", "", {"x"}, 0, 0.0, 0.0, 0.0},
        {"article-only difference", "a cat", {"cat"}, 1, 1.0, 1.0, 1.0},
        // Token multisets equal but strings differ: full overlap, no EM.
        {"reordered tokens", "cat dog", {"dog cat"}, 0, 1.0, 1.0, 1.0},
        {"extra pred token", "one two three", {"one two"}, 0, 0.8, 2.0 / 3.0, 1.0},
        {"missing pred tokens", "one two", {"one two three four"}, 0, 2.0 / 3.0, 1.0, 0.5},
        // Best gold wins: "x a" normalizes to "x" (P=1/3, F1=0.5) while
        // "x y z w" gives P=1, R=3/4, F1 = 2*(3/4)/(7/4) = 6/7.
        {"max over golds", "x y z", {"x a", "x y z w"}, 0, 6.0 / 7.0, 1.0, 0.75},
        {"second gold ignored", "an apple", {"apple", "banana"}, 1, 1.0, 1.0, 1.0},
        // "1,301" -> "1301"; the unit token stays missing.
        {"number with unit", "1,301", {"1,301 acres"}, 0, 2.0 / 3.0, 1.0, 0.5},
        {"date reordering", "19 January 1980", {"January 19, 1980"}, 0, 1.0, 1.0, 1.0},
        // Both sides normalize to the empty string; equality carries all
        // four metrics.
        {"all articles", "the the the", {"the"}, 1, 1.0, 1.0, 1.0},
        {"apostrophe", "don't stop", {"dont stop"}, 1, 1.0, 1.0, 1.0},
        {"whitespace runs", "  Multiple   spaces  ", {"multiple spaces"}, 1, 1.0, 1.0, 1.0},
        // The standalone "a" vanishes from prediction AND gold.
        {"article inside list", "A, B, and C", {"a b and c"}, 1, 1.0, 1.0, 1.0},
        {"partial name", "Juan Pablo Montoya", {"Montoya"}, 0, 0.5, 1.0 / 3.0, 1.0},
        {"spelled-out number", "fourty two", {"42"}, 0, 0.0, 0.0, 0.0},
    };
    return cases;
}

} // namespace hygraph::testgen
