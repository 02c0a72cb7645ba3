#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "wec/wikitext/types.h"

namespace wec::pipeline {

struct Token {
    std::string text;
    wikitext::Span span;
};

/// Splits on Unicode whitespace; punctuation becomes single-character
/// tokens except apostrophes, hyphens, periods and commas sitting between
/// two alphanumerics (Men's, al-Qaeda, 1,000, U.S). Every offset listed in
/// `boundaries` starts a new token.
std::vector<Token> tokenize(std::string_view text, const std::vector<std::size_t> &boundaries = {});

/// Joins tokens[first..last] with single spaces, except before closing
/// punctuation and after opening brackets.
std::string detokenize(const std::vector<std::string> &tokens, std::size_t first, std::size_t last);
std::string detokenize(const std::vector<std::string> &tokens);

} // namespace wec::pipeline
