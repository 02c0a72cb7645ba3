#include "wec/pipeline/pivots.h"

#include "wec/util/error.h"
#include "wec/util/jsonl.h"
#include "wec/wikitext/infobox.h"

namespace wec::pipeline {

Allowlist parse_allowlist(std::string_view text) {
    Allowlist out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        std::string entry = wikitext::normalize_infobox_type(line);
        if (!entry.empty())
            out.insert(std::move(entry));
        pos = nl + 1;
    }
    return out;
}

Allowlist load_allowlist(const std::filesystem::path &path) {
    Allowlist out = parse_allowlist(util::read_file(path));
    if (out.empty())
        throw InputError("allowlist " + path.string() + " has no entries");
    return out;
}

PivotCollector::PivotCollector(Allowlist allowlist) : allowlist_(std::move(allowlist)) {
    if (allowlist_.empty())
        throw ContractError("allowlist must not be empty");
    for (const auto &entry : allowlist_)
        if (wikitext::normalize_infobox_type(entry) != entry)
            throw ContractError("allowlist entry is not normalised: '" + entry + "'");
}

void PivotCollector::add(const std::string &title, const std::optional<std::string> &infobox_type) {
    if (infobox_type && allowlist_.count(*infobox_type))
        found_[title] = *infobox_type;
}

EventRegistry PivotCollector::finish() const {
    EventRegistry registry;
    int next = 0;
    for (const auto &[title, type] : found_)
        registry.pivots.emplace(title, PivotInfo{next++, type});
    return registry;
}

EventRegistry collect_pivots(const std::vector<wikitext::ParsedPage> &pages, const Allowlist &allowlist) {
    PivotCollector collector(allowlist);
    for (const auto &page : pages)
        collector.add(page);
    return collector.finish();
}

std::string pivot_summary(const wikitext::ParsedPage &page) {
    for (const auto &p : page.paragraphs)
        if (!p.is_boilerplate && !p.text.empty())
            return p.text;
    return {};
}

} // namespace wec::pipeline
