#include "wec/wikitext/title.h"

#include <cctype>

#include "wec/util/utf8.h"

namespace wec::wikitext {

std::string normalize_title(std::string_view raw) {
    std::string text(raw);
    for (char &c : text)
        if (c == '_')
            c = ' ';
    if (const auto hash = text.find('#'); hash != std::string::npos)
        text.erase(hash);
    std::string collapsed = utf8::collapse_whitespace(text);
    std::string_view view = collapsed;
    while (!view.empty() && view.front() == ':')
        view.remove_prefix(1);
    std::string trimmed = utf8::collapse_whitespace(view);
    return utf8::upper_first(trimmed);
}

std::optional<std::string> redirect_target(std::string_view wikitext) {
    std::size_t pos = 0;
    while (pos < wikitext.size() && std::isspace(static_cast<unsigned char>(wikitext[pos])))
        ++pos;
    static constexpr std::string_view directive = "#redirect";
    if (wikitext.size() - pos < directive.size())
        return std::nullopt;
    for (std::size_t i = 0; i < directive.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(wikitext[pos + i])) != directive[i])
            return std::nullopt;
    pos += directive.size();
    while (pos < wikitext.size() && (std::isspace(static_cast<unsigned char>(wikitext[pos])) || wikitext[pos] == ':'))
        ++pos;
    if (wikitext.compare(pos, 2, "[[") != 0)
        return std::nullopt;
    pos += 2;
    const auto close = wikitext.find("]]", pos);
    if (close == std::string_view::npos)
        return std::nullopt;
    std::string_view inner = wikitext.substr(pos, close - pos);
    if (const auto pipe = inner.find('|'); pipe != std::string_view::npos)
        inner = inner.substr(0, pipe);
    std::string target = normalize_title(inner);
    if (target.empty())
        return std::nullopt;
    return target;
}

} // namespace wec::wikitext
