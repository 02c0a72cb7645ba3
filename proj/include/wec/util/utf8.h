#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace wec::utf8 {

/// Decodes the code point starting at `pos` and advances `pos` past it.
/// Invalid sequences decode as U+FFFD and consume one byte.
char32_t decode(std::string_view text, std::size_t &pos);

void append(std::string &out, char32_t cp);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
bool is_alnum(char32_t cp);
bool is_digit(char32_t cp);

/// Lower-cases ASCII letters and the Latin-1 / Latin Extended-A / Greek /
/// Cyrillic upper-case ranges; everything else passes through.
std::string case_fold(std::string_view text);

/// Upper-cases the first code point (same ranges as case_fold).
std::string upper_first(std::string_view text);

/// Case-fold, then collapse whitespace runs to one space and trim.
std::string normalize_surface(std::string_view text);

/// Collapses whitespace runs (ASCII and Unicode) to a single space and trims.
std::string collapse_whitespace(std::string_view text);

} // namespace wec::utf8
