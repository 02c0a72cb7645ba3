#include "wec/wikitext/redirects.h"

#include <set>

#include "wec/util/log.h"

namespace wec::wikitext {

RedirectMap resolve_redirects(const RedirectMap &direct, int max_depth) {
    RedirectMap resolved;
    std::size_t cycles = 0;
    std::size_t too_deep = 0;
    for (const auto &[source, first_hop] : direct) {
        std::set<std::string> seen{source};
        std::string current = first_hop;
        int hops = 1;
        bool ok = true;
        while (true) {
            const auto next = direct.find(current);
            if (next == direct.end())
                break;
            if (seen.contains(current)) {
                ok = false;
                ++cycles;
                log::warn("redirect.cycle", {{"title", source}, {"at", current}});
                break;
            }
            if (hops >= max_depth) {
                ok = false;
                ++too_deep;
                log::warn("redirect.too_deep", {{"title", source}, {"depth", max_depth}});
                break;
            }
            seen.insert(current);
            current = next->second;
            ++hops;
        }
        if (ok && current != source)
            resolved.emplace(source, current);
    }
    if (cycles || too_deep)
        log::info("redirect.summary", {{"resolved", resolved.size()}, {"cycles", cycles}, {"too_deep", too_deep}});
    return resolved;
}

} // namespace wec::wikitext
