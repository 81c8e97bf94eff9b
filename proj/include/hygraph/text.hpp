#pragma once
// Shared text canonicalization used by matching, scoring and corpus loading.

#include <string>
#include <string_view>
#include <vector>

namespace hygraph {

// NFC-compose, lowercase, trim, and collapse internal whitespace runs to
// a single space. The canonical form for entity keys and lexical matching.
std::string normalize_text(std::string_view s);

// Trim + collapse whitespace runs without touching case or composition.
std::string collapse_whitespace(std::string_view s);

// Whitespace split.
std::vector<std::string> split_tokens(std::string_view s);

std::string to_lower_ascii(std::string_view s);
bool iequals_ascii(std::string_view a, std::string_view b);
bool icontains_ascii(std::string_view haystack, std::string_view needle);

} // namespace hygraph
