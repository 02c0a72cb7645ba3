#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wec/pipeline/types.h"
#include "wec/wikitext/types.h"

namespace wec::pipeline {

using Allowlist = std::set<std::string>;

/// One infobox type per line; `#` starts a comment. Entries are normalised
/// like extracted infobox types.
Allowlist parse_allowlist(std::string_view text);
Allowlist load_allowlist(const std::filesystem::path &path);

/// Incremental form of collect_pivots for callers that stream pages.
class PivotCollector {
public:
    /// Throws ContractError when `allowlist` is empty or not normalised.
    explicit PivotCollector(Allowlist allowlist);

    void add(const std::string &title, const std::optional<std::string> &infobox_type);
    void add(const wikitext::ParsedPage &page) { add(page.title, page.infobox_type); }

    /// Assigns cluster ids in sorted title order.
    EventRegistry finish() const;

private:
    Allowlist allowlist_;
    std::map<std::string, std::string> found_;
};

EventRegistry collect_pivots(const std::vector<wikitext::ParsedPage> &pages, const Allowlist &allowlist);

/// Text shown to annotators for a pivot: the first non-boilerplate paragraph.
std::string pivot_summary(const wikitext::ParsedPage &page);

} // namespace wec::pipeline
