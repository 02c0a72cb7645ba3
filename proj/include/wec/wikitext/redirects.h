#pragma once

#include <map>
#include <string>

namespace wec::wikitext {

using RedirectMap = std::map<std::string, std::string>;

inline constexpr int kMaxRedirectDepth = 8;

/// Resolves redirect chains. `direct` maps each redirect page title to the
/// title it points at. The result maps every redirect to the final
/// non-redirect title reached within `max_depth` hops; titles on a cycle,
/// or whose chain is longer than `max_depth`, are left out.
RedirectMap resolve_redirects(const RedirectMap &direct, int max_depth = kMaxRedirectDepth);

} // namespace wec::wikitext
