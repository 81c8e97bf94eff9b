#pragma once
// Token counting for cost accounting. Counts approximate subword tokens
// without pulling in a model-specific BPE vocabulary.

#include <memory>
#include <string>
#include <string_view>

namespace hygraph {

class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual size_t count(std::string_view text) const = 0;
    virtual const char* name() const = 0;
};

// Default: letter runs cost ceil(len/4), digit runs ceil(len/3), every other
// non-space byte costs 1. Monotone under concatenation; "" -> 0.
class HeuristicTokenizer : public Tokenizer {
public:
    size_t count(std::string_view text) const override;
    const char* name() const override { return "heuristic"; }
};

// Whitespace-separated word count; cheapest possible estimate.
class WhitespaceTokenizer : public Tokenizer {
public:
    size_t count(std::string_view text) const override;
    const char* name() const override { return "whitespace"; }
};

std::shared_ptr<Tokenizer> make_tokenizer(const std::string& name);

} // namespace hygraph
