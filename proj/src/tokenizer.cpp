#include "hygraph/tokenizer.hpp"

#include <cctype>
#include <stdexcept>

namespace hygraph {

static bool is_letter(unsigned char c) { return std::isalpha(c) != 0 || c >= 0x80; }
static bool is_digit(unsigned char c) { return std::isdigit(c) != 0; }
static bool is_space(unsigned char c) { return std::isspace(c) != 0; }

size_t HeuristicTokenizer::count(std::string_view text) const {
    size_t total = 0;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
        } else if (is_letter(c)) {
            size_t j = i;
            while (j < n && is_letter(static_cast<unsigned char>(text[j]))) ++j;
            total += (j - i + 3) / 4;
            i = j;
        } else if (is_digit(c)) {
            size_t j = i;
            while (j < n && is_digit(static_cast<unsigned char>(text[j]))) ++j;
            total += (j - i + 2) / 3;
            i = j;
        } else {
            ++total;
            ++i;
        }
    }
    return total;
}

size_t WhitespaceTokenizer::count(std::string_view text) const {
    size_t total = 0;
    bool in_word = false;
    for (char ch : text) {
        bool sp = is_space(static_cast<unsigned char>(ch));
        if (!sp && !in_word) ++total;
        in_word = !sp;
    }
    return total;
}

std::shared_ptr<Tokenizer> make_tokenizer(const std::string& name) {
    if (name == "heuristic" || name.empty()) return std::make_shared<HeuristicTokenizer>();
    if (name == "whitespace") return std::make_shared<WhitespaceTokenizer>();
    throw std::invalid_argument("unknown tokenizer: " + name);
}

} // namespace hygraph
