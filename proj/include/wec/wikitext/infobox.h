#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace wec::wikitext {

struct InfoboxScan {
    std::optional<std::string> type;
    /// False when the scan hit an unmatched `{{` or `}}`; `type` then holds
    /// whatever was found before the imbalance.
    bool balanced = true;
};

/// Finds the first template (in order of its opening braces, at any nesting
/// depth) whose name starts with "Infobox" and returns the remainder of the
/// name, trimmed, lower-cased and whitespace-collapsed.
InfoboxScan scan_infobox(std::string_view wikitext);

std::optional<std::string> extract_infobox_type(std::string_view wikitext);

/// Normalises a configured or extracted infobox type token the same way
/// scan_infobox does ("Civilian_Attack " -> "civilian attack").
std::string normalize_infobox_type(std::string_view raw);

} // namespace wec::wikitext
