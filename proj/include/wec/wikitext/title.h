#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace wec::wikitext {

/// MediaWiki title normalisation: underscores become spaces, whitespace
/// runs collapse, a leading colon and any `#section` suffix are dropped,
/// and the first character is upper-cased. Returns an empty string when
/// nothing is left (e.g. a bare `#section` link).
std::string normalize_title(std::string_view raw);

/// If `wikitext` begins with a redirect directive (`#REDIRECT [[Target]]`,
/// case-insensitive, optional colon), returns the normalised target.
std::optional<std::string> redirect_target(std::string_view wikitext);

} // namespace wec::wikitext
