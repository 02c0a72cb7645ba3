#include "wec/wikitext/infobox.h"

#include <vector>

#include "wec/util/log.h"
#include "wec/util/utf8.h"

namespace wec::wikitext {

std::string normalize_infobox_type(std::string_view raw) {
    std::string text(raw);
    for (char &c : text)
        if (c == '_')
            c = ' ';
    return utf8::normalize_surface(text);
}

namespace {

bool starts_with_infobox(std::string_view name) {
    static constexpr std::string_view prefix = "infobox";
    if (name.size() < prefix.size())
        return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        const char c = name[i];
        const char lower = (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c;
        if (lower != prefix[i])
            return false;
    }
    return true;
}

// Template name: text after `{{` up to the first `|` or `}}` or nested `{{`.
std::string_view template_name(std::string_view text, std::size_t open) {
    std::size_t pos = open + 2;
    std::size_t end = pos;
    while (end < text.size()) {
        if (text[end] == '|' || text.compare(end, 2, "}}") == 0 || text.compare(end, 2, "{{") == 0)
            break;
        ++end;
    }
    return text.substr(pos, end - pos);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\n' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\n' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace

InfoboxScan scan_infobox(std::string_view text) {
    InfoboxScan result;
    int depth = 0;
    for (std::size_t pos = 0; pos < text.size();) {
        if (text.compare(pos, 4, "<!--") == 0) {
            const auto close = text.find("-->", pos + 4);
            pos = close == std::string_view::npos ? text.size() : close + 3;
            continue;
        }
        if (text.compare(pos, 2, "{{") == 0) {
            // Template parameters `{{{x}}}` are consumed as one unit.
            if (text.compare(pos, 3, "{{{") == 0 && text.compare(pos, 4, "{{{{") != 0) {
                const auto close = text.find("}}}", pos + 3);
                if (close != std::string_view::npos) {
                    pos = close + 3;
                    continue;
                }
            }
            if (!result.type) {
                const std::string_view name = trim(template_name(text, pos));
                if (starts_with_infobox(name)) {
                    std::string type = normalize_infobox_type(name.substr(7));
                    if (!type.empty())
                        result.type = std::move(type);
                }
            }
            ++depth;
            pos += 2;
            continue;
        }
        if (text.compare(pos, 2, "}}") == 0) {
            if (depth == 0) {
                result.balanced = false;
                break;
            }
            --depth;
            pos += 2;
            continue;
        }
        ++pos;
    }
    if (depth != 0)
        result.balanced = false;
    if (!result.balanced)
        log::debug("infobox.unbalanced_braces", {{"found", result.type.value_or("")}});
    return result;
}

std::optional<std::string> extract_infobox_type(std::string_view wikitext) { return scan_infobox(wikitext).type; }

} // namespace wec::wikitext
