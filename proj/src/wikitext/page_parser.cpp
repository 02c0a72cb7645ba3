#include "wec/wikitext/page_parser.h"

#include <array>
#include <cctype>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "wec/util/error.h"
#include "wec/util/log.h"
#include "wec/util/utf8.h"
#include "wec/wikitext/infobox.h"
#include "wec/wikitext/title.h"

namespace wec::wikitext {

namespace {

constexpr std::size_t npos = std::string_view::npos;

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_ws(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back()))
        s.remove_suffix(1);
    return s;
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char &c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool starts_with_at(std::string_view s, std::size_t pos, std::string_view prefix) {
    return s.compare(pos, prefix.size(), prefix) == 0;
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
    if (s.size() - pos < prefix.size() || pos > s.size())
        return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i])
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Construct matching
// ---------------------------------------------------------------------------

std::size_t skip_comment(std::string_view s, std::size_t pos) {
    const auto close = s.find("-->", pos + 4);
    return close == npos ? s.size() : close + 3;
}

/// `pos` at "{{"; returns the index just past the matching "}}", or npos.
std::size_t match_template(std::string_view s, std::size_t pos) {
    int depth = 0;
    std::size_t i = pos;
    while (i < s.size()) {
        if (starts_with_at(s, i, "<!--")) {
            i = skip_comment(s, i);
            continue;
        }
        if (starts_with_at(s, i, "{{")) {
            ++depth;
            i += 2;
            continue;
        }
        if (starts_with_at(s, i, "}}")) {
            --depth;
            i += 2;
            if (depth == 0)
                return i;
            continue;
        }
        ++i;
    }
    return npos;
}

/// `pos` at "[["; returns the index just past the matching "]]", or npos.
/// Links never span a blank line.
std::size_t match_link(std::string_view s, std::size_t pos) {
    int depth = 0;
    std::size_t i = pos;
    while (i < s.size()) {
        if (starts_with_at(s, i, "\n\n"))
            return npos;
        if (starts_with_at(s, i, "{{")) {
            const auto end = match_template(s, i);
            if (end == npos)
                return npos;
            i = end;
            continue;
        }
        if (starts_with_at(s, i, "[[")) {
            ++depth;
            i += 2;
            continue;
        }
        if (starts_with_at(s, i, "]]")) {
            --depth;
            i += 2;
            if (depth == 0)
                return i;
            continue;
        }
        ++i;
    }
    return npos;
}

/// First occurrence of `ch` outside nested links, templates and comments.
std::size_t find_top_level(std::string_view s, char ch, std::size_t from = 0) {
    std::size_t i = from;
    while (i < s.size()) {
        if (starts_with_at(s, i, "<!--")) {
            i = skip_comment(s, i);
            continue;
        }
        if (starts_with_at(s, i, "{{")) {
            const auto end = match_template(s, i);
            if (end == npos)
                return npos;
            i = end;
            continue;
        }
        if (starts_with_at(s, i, "[[")) {
            const auto end = match_link(s, i);
            if (end == npos) {
                i += 2;
                continue;
            }
            i = end;
            continue;
        }
        if (s[i] == ch)
            return i;
        ++i;
    }
    return npos;
}

std::vector<std::string_view> split_top_level(std::string_view s, char ch) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto at = find_top_level(s, ch, start);
        if (at == npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, at - start));
        start = at + 1;
    }
}

struct Tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    std::size_t end = 0; // index just past '>'
};

/// Parses an HTML/extension tag starting at `pos` ('<').
std::optional<Tag> parse_tag(std::string_view s, std::size_t pos) {
    std::size_t i = pos + 1;
    Tag tag;
    if (i < s.size() && s[i] == '/') {
        tag.closing = true;
        ++i;
    }
    const std::size_t name_start = i;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '-'))
        ++i;
    if (i == name_start || !std::isalpha(static_cast<unsigned char>(s[name_start])))
        return std::nullopt;
    tag.name = lower_ascii(s.substr(name_start, i - name_start));
    if (i < s.size() && !(is_ws(s[i]) || s[i] == '>' || s[i] == '/'))
        return std::nullopt;
    char quote = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (quote) {
            if (c == quote)
                quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '\n' && s.compare(i, 2, "\n\n") == 0) {
            return std::nullopt;
        } else if (c == '>') {
            tag.self_closing = i > pos && s[i - 1] == '/';
            tag.end = i + 1;
            return tag;
        }
        ++i;
    }
    return std::nullopt;
}

/// Index just past the closing tag `</name ...>` searched from `from`, or npos.
std::size_t find_closing_tag(std::string_view s, std::string_view name, std::size_t from) {
    std::size_t i = from;
    while ((i = s.find("</", i)) != npos) {
        if (starts_with_ci(s, i + 2, name)) {
            const auto after = i + 2 + name.size();
            if (after >= s.size() || s[after] == '>' || is_ws(s[after])) {
                const auto close = s.find('>', after);
                return close == npos ? s.size() : close + 1;
            }
        }
        i += 2;
    }
    return npos;
}

bool in_list(std::string_view name, std::initializer_list<std::string_view> names) {
    for (auto n : names)
        if (n == name)
            return true;
    return false;
}

// Tags whose content is never prose.
bool is_dropped_element(std::string_view name) {
    return in_list(name, {"ref", "references", "math", "gallery", "timeline", "imagemap", "syntaxhighlight",
                          "source", "score", "templatedata", "graph", "mapframe", "maplink", "chem", "ce",
                          "hiero", "categorytree", "inputbox", "indicator", "pre", "includeonly", "templatestyles",
                          "section", "charinsert", "dynamicpagelist", "ref-group", "code-block"});
}

// Tags removed while their content stays.
bool is_transparent_tag(std::string_view name) {
    return in_list(name, {"small", "big", "sup", "sub", "span", "div", "center", "blockquote", "s", "u", "i", "b",
                          "em", "strong", "code", "abbr", "font", "del", "ins", "cite", "q", "tt", "var", "kbd",
                          "p", "strike", "poem", "onlyinclude", "noinclude", "mark", "bdi", "bdo", "time", "data",
                          "dfn", "ruby", "rt", "rb", "rp", "wbr", "table", "tr", "td", "th", "caption", "tbody",
                          "thead", "tfoot", "ul", "ol", "li", "dl", "dt", "dd", "h1", "h2", "h3", "h4", "h5", "h6",
                          "samp", "nowiki", "translate", "languages", "a"});
}

// Tags whose content the line scanner must treat as one unit.
bool is_multiline_element(std::string_view name) {
    return is_dropped_element(name) || name == "nowiki" || name == "table";
}

struct Entity {
    std::string_view name;
    char32_t cp;
};

constexpr std::array<Entity, 24> kEntities{{{"nbsp", 0xA0},   {"amp", '&'},     {"lt", '<'},
                                            {"gt", '>'},      {"quot", '"'},    {"apos", '\''},
                                            {"ndash", 0x2013}, {"mdash", 0x2014}, {"minus", 0x2212},
                                            {"hellip", 0x2026}, {"thinsp", 0x2009}, {"ensp", 0x2002},
                                            {"emsp", 0x2003}, {"times", 0xD7},  {"deg", 0xB0},
                                            {"middot", 0xB7}, {"lsquo", 0x2018}, {"rsquo", 0x2019},
                                            {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"eacute", 0xE9},
                                            {"shy", 0xAD},    {"zwj", 0x200D},  {"euro", 0x20AC}}};

/// Decodes an entity at `pos` ('&'). Returns (code point, length).
std::optional<std::pair<char32_t, std::size_t>> decode_entity(std::string_view s, std::size_t pos) {
    const auto semi = s.find(';', pos + 1);
    if (semi == npos || semi - pos > 12)
        return std::nullopt;
    const std::string_view body = s.substr(pos + 1, semi - pos - 1);
    if (body.empty())
        return std::nullopt;
    if (body[0] == '#') {
        char32_t cp = 0;
        const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
        const std::string_view digits = body.substr(hex ? 2 : 1);
        if (digits.empty())
            return std::nullopt;
        for (char c : digits) {
            int v;
            if (c >= '0' && c <= '9')
                v = c - '0';
            else if (hex && c >= 'a' && c <= 'f')
                v = c - 'a' + 10;
            else if (hex && c >= 'A' && c <= 'F')
                v = c - 'A' + 10;
            else
                return std::nullopt;
            cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
            if (cp > 0x10FFFF)
                return std::nullopt;
        }
        if (cp == 0)
            return std::nullopt;
        return std::make_pair(cp, semi - pos + 1);
    }
    for (const auto &e : kEntities)
        if (e.name == body)
            return std::make_pair(e.cp, semi - pos + 1);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Plain-text builder with whitespace collapsing and anchor capture
// ---------------------------------------------------------------------------

class TextBuilder {
public:
    void space() { pending_space_ = true; }

    void put(std::string_view bytes) {
        for (std::size_t pos = 0; pos < bytes.size();) {
            const std::size_t start = pos;
            const char32_t cp = utf8::decode(bytes, pos);
            if (utf8::is_space(cp)) {
                pending_space_ = true;
                continue;
            }
            if (cp == 0xAD || cp == 0x200B)
                continue; // soft hyphen, zero-width space
            flush_space();
            if (capturing_ && capture_start_ == npos)
                capture_start_ = out_.size();
            out_.append(bytes.substr(start, pos - start));
        }
    }

    void put(char32_t cp) {
        std::string tmp;
        utf8::append(tmp, cp);
        put(tmp);
    }

    void begin_capture() {
        capturing_ = true;
        capture_start_ = npos;
    }

    std::optional<Span> end_capture() {
        capturing_ = false;
        if (capture_start_ == npos)
            return std::nullopt;
        return Span{capture_start_, out_.size()};
    }

    bool capturing() const { return capturing_; }
    const std::string &text() const { return out_; }
    std::string take() { return std::move(out_); }

private:
    void flush_space() {
        if (pending_space_ && !out_.empty())
            out_.push_back(' ');
        pending_space_ = false;
    }

    std::string out_;
    bool pending_space_ = false;
    bool capturing_ = false;
    std::size_t capture_start_ = npos;
};

struct PendingLink {
    std::string target;
    Span span;
};

// ---------------------------------------------------------------------------
// Inline renderer
// ---------------------------------------------------------------------------

class InlineRenderer {
public:
    InlineRenderer(TextBuilder &out, std::vector<PendingLink> &links, const MarkupConfig &config)
        : out_(out), links_(links), config_(config) {}

    void render(std::string_view s) {
        std::size_t i = 0;
        while (i < s.size()) {
            const char c = s[i];
            if (c == '<' && starts_with_at(s, i, "<!--")) {
                i = skip_comment(s, i);
            } else if (c == '{' && starts_with_at(s, i, "{{")) {
                const auto end = match_template(s, i);
                i = end == npos ? s.size() : end;
            } else if (c == '[' && starts_with_at(s, i, "[[")) {
                i = render_link(s, i);
            } else if (c == '[') {
                i = render_external(s, i);
            } else if (c == '\'' && starts_with_at(s, i, "''")) {
                std::size_t n = 0;
                while (i + n < s.size() && s[i + n] == '\'')
                    ++n;
                if (n == 4)
                    out_.put("'");
                else if (n > 5)
                    out_.put(std::string(n - 5, '\''));
                i += n;
            } else if (c == '<') {
                i = render_tag(s, i);
            } else if (c == '&') {
                if (const auto ent = decode_entity(s, i)) {
                    out_.put(ent->first);
                    i += ent->second;
                } else {
                    out_.put("&");
                    ++i;
                }
            } else if (c == '_' && starts_with_at(s, i, "__")) {
                i = skip_magic_word(s, i);
            } else if (is_ws(c)) {
                out_.space();
                ++i;
            } else {
                std::size_t next = i;
                utf8::decode(s, next);
                out_.put(s.substr(i, next - i));
                i = next;
            }
        }
    }

    /// Renders the caption of a media link `[[File:...|opts|caption]]`.
    void render_media_caption(std::string_view link_inner) {
        const auto parts = split_top_level(link_inner, '|');
        for (std::size_t k = parts.size(); k-- > 1;) {
            if (!is_media_option(trim(parts[k]))) {
                render(parts[k]);
                return;
            }
        }
    }

    std::string_view prefix_of(std::string_view target) const {
        const auto colon = target.find(':');
        if (colon == npos)
            return {};
        return trim(target.substr(0, colon));
    }

    bool is_media_target(std::string_view target) const {
        return config_.media_prefixes.contains(lower_ascii(prefix_of(target)));
    }

private:
    static bool is_media_option(std::string_view opt) {
        const std::string o = lower_ascii(opt);
        if (in_list(o, {"thumb", "thumbnail", "frame", "framed", "frameless", "left", "right", "center", "centre",
                        "none", "upright", "border", "baseline", "middle", "sub", "super", "text-top",
                        "text-bottom", "top", "bottom"}))
            return true;
        for (std::string_view key : {"alt=", "link=", "page=", "class=", "lang=", "upright=", "thumb=", "thumbtime="})
            if (o.rfind(key, 0) == 0)
                return true;
        if (o.size() > 2 && o.compare(o.size() - 2, 2, "px") == 0) {
            for (std::size_t k = 0; k + 2 < o.size(); ++k)
                if (!std::isdigit(static_cast<unsigned char>(o[k])) && o[k] != 'x')
                    return false;
            return true;
        }
        return false;
    }

    static bool is_interlanguage(std::string_view prefix) {
        // Language codes: 2-3 lower-case letters, optionally with '-suffix'.
        if (prefix.size() < 2 || prefix.size() > 12)
            return false;
        std::size_t letters = 0;
        while (letters < prefix.size() && prefix[letters] >= 'a' && prefix[letters] <= 'z')
            ++letters;
        if (letters < 2 || letters > 3)
            return false;
        if (letters == prefix.size())
            return true;
        if (prefix[letters] != '-')
            return false;
        for (std::size_t k = letters + 1; k < prefix.size(); ++k)
            if (!(prefix[k] >= 'a' && prefix[k] <= 'z'))
                return false;
        return letters + 1 < prefix.size();
    }

    std::size_t render_link(std::string_view s, std::size_t pos) {
        const auto end = match_link(s, pos);
        if (end == npos) {
            out_.put("[[");
            return pos + 2;
        }
        const std::string_view inner = s.substr(pos + 2, end - pos - 4);
        const auto pipe = find_top_level(inner, '|');
        std::string_view target = trim(pipe == npos ? inner : inner.substr(0, pipe));
        const std::optional<std::string_view> display =
            pipe == npos ? std::nullopt : std::optional<std::string_view>(inner.substr(pipe + 1));

        bool leading_colon = false;
        if (!target.empty() && target.front() == ':') {
            leading_colon = true;
            target = trim(target.substr(1));
        }
        const std::string prefix = lower_ascii(prefix_of(target));
        if (!prefix.empty() && !leading_colon) {
            if (config_.media_prefixes.contains(prefix) || config_.category_prefixes.contains(prefix) ||
                is_interlanguage(prefix))
                return end;
        }
        const bool namespaced = !prefix.empty() && (config_.non_article_prefixes.contains(prefix) ||
                                                    config_.media_prefixes.contains(prefix) ||
                                                    config_.category_prefixes.contains(prefix) ||
                                                    is_interlanguage(prefix));

        std::string pipe_trick;
        std::string_view shown;
        if (display && !trim(*display).empty()) {
            shown = *display;
        } else if (display) {
            // Pipe trick: [[Foo (bar)|]] shows "Foo", [[Help:Foo|]] shows "Foo".
            std::string_view base = target;
            if (const auto colon = base.find(':'); colon != npos && namespaced)
                base = base.substr(colon + 1);
            if (const auto paren = base.find(" ("); paren != npos && base.back() == ')')
                base = base.substr(0, paren);
            if (const auto comma = base.find(", "); comma != npos)
                base = base.substr(0, comma);
            pipe_trick = std::string(trim(base));
            shown = pipe_trick;
        } else {
            shown = target;
        }

        const std::string title = namespaced ? std::string() : normalize_title(target);
        if (title.empty() || out_.capturing()) {
            render(shown);
            return end;
        }
        out_.begin_capture();
        render(shown);
        if (const auto span = out_.end_capture())
            links_.push_back({title, *span});
        return end;
    }

    std::size_t render_external(std::string_view s, std::size_t pos) {
        static constexpr std::array<std::string_view, 8> schemes{"http://", "https://", "ftp://",  "//",
                                                                 "mailto:", "irc://",   "news:", "sftp://"};
        bool is_url = false;
        for (auto scheme : schemes)
            if (starts_with_ci(s, pos + 1, scheme))
                is_url = true;
        if (!is_url) {
            out_.put("[");
            return pos + 1;
        }
        const auto close = s.find(']', pos);
        const auto newline = s.find('\n', pos);
        if (close == npos || (newline != npos && newline < close)) {
            out_.put("[");
            return pos + 1;
        }
        const std::string_view inner = s.substr(pos + 1, close - pos - 1);
        const auto space = inner.find(' ');
        if (space != npos)
            render(inner.substr(space + 1));
        return close + 1;
    }

    std::size_t render_tag(std::string_view s, std::size_t pos) {
        const auto tag = parse_tag(s, pos);
        if (!tag) {
            out_.put("<");
            return pos + 1;
        }
        if (tag->name == "br" || tag->name == "hr") {
            out_.space();
            return tag->end;
        }
        if (tag->name == "nowiki" && !tag->closing && !tag->self_closing) {
            const auto close = find_closing_tag(s, "nowiki", tag->end);
            const std::size_t content_end = close == npos ? s.size() : s.rfind("</", close);
            out_.put(s.substr(tag->end, content_end - tag->end));
            return close == npos ? s.size() : close;
        }
        if (is_dropped_element(tag->name)) {
            if (tag->closing || tag->self_closing)
                return tag->end;
            const auto close = find_closing_tag(s, tag->name, tag->end);
            return close == npos ? s.size() : close;
        }
        if (is_transparent_tag(tag->name)) {
            if (in_list(tag->name, {"p", "div", "li", "dd", "dt", "tr", "td", "th", "blockquote", "center"}))
                out_.space();
            return tag->end;
        }
        // Unknown tags render literally, as MediaWiki does.
        out_.put("<");
        return pos + 1;
    }

    static std::size_t skip_magic_word(std::string_view s, std::size_t pos) {
        std::size_t i = pos + 2;
        while (i < s.size() && std::isupper(static_cast<unsigned char>(s[i])))
            ++i;
        if (i > pos + 2 && starts_with_at(s, i, "__"))
            return i + 2;
        return pos + 1;
    }

    TextBuilder &out_;
    std::vector<PendingLink> &links_;
    const MarkupConfig &config_;
};

// ---------------------------------------------------------------------------
// Logical lines and segmentation
// ---------------------------------------------------------------------------

struct LogicalLine {
    std::size_t begin = 0;
    std::size_t end = 0; // excludes the terminating newline
    bool blank = false;
    bool unterminated = false;
};

/// Splits the source into logical lines: physical lines, except that a
/// newline inside an open template, comment, table or multi-line element
/// does not end the line.
std::vector<LogicalLine> split_logical_lines(std::string_view s) {
    std::vector<LogicalLine> lines;
    std::size_t pos = 0;
    while (pos < s.size()) {
        LogicalLine line;
        line.begin = pos;
        int templates = 0;
        int tables = 0;
        int links = 0;
        bool comment = false;
        std::string open_element;
        bool at_line_start = true;
        std::size_t i = pos;
        for (; i < s.size(); ++i) {
            const char c = s[i];
            if (comment) {
                if (starts_with_at(s, i, "-->")) {
                    comment = false;
                    i += 2;
                }
                continue;
            }
            if (!open_element.empty()) {
                if (c == '<' && starts_with_at(s, i, "</") && starts_with_ci(s, i + 2, open_element)) {
                    const auto close = s.find('>', i);
                    i = close == npos ? s.size() - 1 : close;
                    open_element.clear();
                }
                continue;
            }
            if (at_line_start) {
                std::size_t j = i;
                while (j < s.size() && (s[j] == ' ' || s[j] == '\t'))
                    ++j;
                if (starts_with_at(s, j, "{|"))
                    ++tables;
                else if (starts_with_at(s, j, "|}") && tables > 0)
                    --tables;
                at_line_start = false;
            }
            if (c == '\n') {
                if (links > 0) {
                    // link text may wrap, but never across a blank line
                    std::size_t j = i + 1;
                    while (j < s.size() && (s[j] == ' ' || s[j] == '\t' || s[j] == '\r'))
                        ++j;
                    if (j >= s.size() || s[j] == '\n')
                        links = 0;
                }
                if (templates == 0 && tables == 0 && links == 0)
                    break;
                at_line_start = true;
                continue;
            }
            if (c == '<' && starts_with_at(s, i, "<!--")) {
                comment = true;
                i += 3;
            } else if (c == '{' && starts_with_at(s, i, "{{")) {
                ++templates;
                ++i;
            } else if (c == '}' && starts_with_at(s, i, "}}")) {
                if (templates > 0)
                    --templates;
                ++i;
            } else if (c == '[' && starts_with_at(s, i, "[[")) {
                ++links;
                ++i;
            } else if (c == ']' && starts_with_at(s, i, "]]")) {
                if (links > 0)
                    --links;
                ++i;
            } else if (c == '<') {
                if (const auto tag = parse_tag(s, i); tag && !tag->closing && !tag->self_closing &&
                                                      is_multiline_element(tag->name)) {
                    open_element = tag->name;
                    i = tag->end - 1;
                }
            }
        }
        line.end = std::min(i, s.size());
        line.unterminated = (i >= s.size()) && (templates > 0 || tables > 0 || comment || !open_element.empty());
        line.blank = trim(s.substr(line.begin, line.end - line.begin)).empty();
        lines.push_back(line);
        pos = line.end + 1;
    }
    return lines;
}

enum class LineKind { prose, heading, list, table, media, markup, preformatted, broken, transparent };

bool is_boilerplate_kind(LineKind kind) { return kind != LineKind::prose; }

struct RenderedLine {
    LineKind kind = LineKind::prose;
    Span source;
    std::string text;
    std::vector<PendingLink> links;
};

bool only_comments(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        if (is_ws(s[i])) {
            ++i;
        } else if (starts_with_at(s, i, "<!--")) {
            i = skip_comment(s, i);
        } else {
            return false;
        }
    }
    return true;
}

bool is_heading(std::string_view line) {
    const auto t = trim(line);
    if (t.size() < 3 || t.front() != '=')
        return false;
    // trailing comments are allowed after the closing '='
    std::string_view body = t;
    while (true) {
        const auto c = body.rfind("<!--");
        if (c == npos || body.find("-->", c) == npos)
            break;
        if (trim(body.substr(body.find("-->", c) + 3)).empty())
            body = trim(body.substr(0, c));
        else
            break;
    }
    return body.size() >= 3 && body.back() == '=';
}

std::string_view heading_body(std::string_view line) {
    auto t = trim(line);
    while (!t.empty() && t.front() == '=')
        t.remove_prefix(1);
    while (true) {
        t = trim(t);
        const auto c = t.rfind("<!--");
        if (c != npos && t.find("-->", c) != npos && trim(t.substr(t.find("-->", c) + 3)).empty()) {
            t = t.substr(0, c);
            continue;
        }
        break;
    }
    while (!t.empty() && t.back() == '=')
        t.remove_suffix(1);
    return t;
}

void render_table(std::string_view s, InlineRenderer &renderer, TextBuilder &out) {
    // Walk physical lines at template depth zero.
    std::size_t i = 0;
    while (i < s.size()) {
        // find the end of this physical line, skipping over multi-line templates
        std::size_t j = i;
        while (j < s.size() && s[j] != '\n') {
            if (starts_with_at(s, j, "{{")) {
                const auto end = match_template(s, j);
                if (end == npos) {
                    j = s.size();
                    break;
                }
                j = end;
                continue;
            }
            if (starts_with_at(s, j, "<!--")) {
                j = skip_comment(s, j);
                continue;
            }
            ++j;
        }
        std::string_view line = trim(s.substr(i, j - i));
        i = j + 1;
        out.space();
        if (line.empty() || starts_with_at(line, 0, "{|") || starts_with_at(line, 0, "|}") ||
            starts_with_at(line, 0, "|-"))
            continue;
        if (starts_with_at(line, 0, "|+")) {
            renderer.render(line.substr(2));
            continue;
        }
        if (line.front() != '|' && line.front() != '!') {
            renderer.render(line);
            continue;
        }
        const char marker = line.front();
        line.remove_prefix(1);
        // cells are separated by "||" (or "!!" on header rows)
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        std::size_t k = 0;
        while (true) {
            const auto bar = find_top_level(line, '|', k);
            const auto bang = marker == '!' ? find_top_level(line, '!', k) : npos;
            const auto at = std::min(bar, bang);
            if (at == npos) {
                cells.push_back(line.substr(start));
                break;
            }
            if (at + 1 < line.size() && line[at + 1] == line[at]) {
                cells.push_back(line.substr(start, at - start));
                start = at + 2;
                k = start;
            } else {
                k = at + 1;
            }
        }
        for (auto cell : cells) {
            // "attrs | content": drop the attribute part
            const auto bar = find_top_level(cell, '|');
            if (bar != npos)
                cell = cell.substr(bar + 1);
            out.space();
            renderer.render(cell);
        }
    }
}

RenderedLine render_line(std::string_view source, const LogicalLine &line, const MarkupConfig &config) {
    RenderedLine result;
    result.source = Span{line.begin, line.end};
    const std::string_view text = source.substr(line.begin, line.end - line.begin);
    const std::string_view trimmed = trim(text);
    TextBuilder out;
    InlineRenderer renderer(out, result.links, config);

    if (line.unterminated) {
        result.kind = LineKind::broken;
        renderer.render(text);
    } else if (only_comments(text)) {
        result.kind = LineKind::transparent;
    } else if (starts_with_at(trimmed, 0, "{|") || starts_with_ci(trimmed, 0, "<table")) {
        result.kind = LineKind::table;
        if (trimmed.front() == '{')
            render_table(trimmed, renderer, out);
        else
            renderer.render(trimmed);
    } else if (is_heading(text)) {
        result.kind = LineKind::heading;
        renderer.render(heading_body(text));
    } else if (!trimmed.empty() && (trimmed.front() == '*' || trimmed.front() == '#' || trimmed.front() == ';' ||
                                    trimmed.front() == ':')) {
        result.kind = LineKind::list;
        std::size_t k = 0;
        while (k < trimmed.size() && (trimmed[k] == '*' || trimmed[k] == '#' || trimmed[k] == ';' || trimmed[k] == ':'))
            ++k;
        renderer.render(trimmed.substr(k));
    } else if (starts_with_ci(trimmed, 0, "<gallery")) {
        result.kind = LineKind::media;
        const auto tag = parse_tag(trimmed, 0);
        const std::size_t body_start = tag ? tag->end : trimmed.size();
        const auto close = find_closing_tag(trimmed, "gallery", body_start);
        const std::size_t body_end = close == npos ? trimmed.size() : trimmed.rfind("</", close);
        std::string_view body = trimmed.substr(body_start, body_end - body_start);
        while (!body.empty()) {
            const auto nl = body.find('\n');
            const auto entry = nl == npos ? body : body.substr(0, nl);
            if (const auto bar = entry.find('|'); bar != npos) {
                out.space();
                renderer.render(entry.substr(bar + 1));
            }
            if (nl == npos)
                break;
            body.remove_prefix(nl + 1);
        }
    } else if (starts_with_at(trimmed, 0, "[[") && renderer.is_media_target(trimmed.substr(2)) &&
               match_link(trimmed, 0) != npos && only_comments(trimmed.substr(match_link(trimmed, 0)))) {
        result.kind = LineKind::media;
        const auto end = match_link(trimmed, 0);
        renderer.render_media_caption(trimmed.substr(2, end - 4));
    } else if (starts_with_at(trimmed, 0, "----")) {
        result.kind = LineKind::markup;
    } else if (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        result.kind = LineKind::preformatted;
        renderer.render(text);
    } else {
        renderer.render(text);
        result.kind = out.text().empty() ? LineKind::markup : LineKind::prose;
    }
    result.text = out.take();
    return result;
}

bool merges_with(LineKind previous, LineKind next) {
    return previous == next && previous != LineKind::heading;
}

} // namespace

std::string strip_markup(std::string_view wikitext, const MarkupConfig &config) {
    TextBuilder out;
    std::vector<PendingLink> links;
    InlineRenderer renderer(out, links, config);
    renderer.render(wikitext);
    return out.take();
}

ParsedPage parse_page(const RawPage &raw, const MarkupConfig &config) {
    if (raw.redirect_target)
        throw ContractError("parse_page: '" + raw.title + "' is a redirect to '" + *raw.redirect_target + "'");

    ParsedPage page;
    page.page_id = raw.page_id;
    page.title = raw.title;
    const InfoboxScan infobox = scan_infobox(raw.wikitext);
    page.infobox_type = infobox.type;
    if (!infobox.balanced)
        log::debug("page.unbalanced_templates", {{"title", raw.title}});

    const std::string_view source = raw.wikitext;
    const auto lines = split_logical_lines(source);

    // Group rendered logical lines into paragraphs.
    struct Group {
        LineKind kind;
        RenderedLine merged;
    };
    std::vector<Group> groups;
    bool open = false;
    for (const auto &line : lines) {
        if (line.blank) {
            open = false;
            continue;
        }
        RenderedLine rendered = render_line(source, line, config);
        if (rendered.kind == LineKind::transparent)
            continue;
        if (open && merges_with(groups.back().kind, rendered.kind)) {
            auto &merged = groups.back().merged;
            merged.source.end = rendered.source.end;
            std::size_t shift = merged.text.size();
            if (!merged.text.empty() && !rendered.text.empty()) {
                merged.text.push_back(' ');
                ++shift;
            }
            merged.text += rendered.text;
            for (auto &link : rendered.links) {
                link.span.begin += shift;
                link.span.end += shift;
                merged.links.push_back(std::move(link));
            }
        } else {
            const LineKind kind = rendered.kind;
            groups.push_back({kind, std::move(rendered)});
        }
        open = true;
    }

    for (auto &group : groups) {
        if (group.merged.text.empty())
            continue;
        const std::size_t index = page.paragraphs.size();
        Paragraph para;
        para.text = std::move(group.merged.text);
        para.char_span_in_source = group.merged.source;
        para.is_boilerplate = is_boilerplate_kind(group.kind);
        for (auto &link : group.merged.links) {
            InternalLink out;
            out.target_title = std::move(link.target);
            out.anchor_char_span = link.span;
            out.anchor_text = para.text.substr(link.span.begin, link.span.size());
            out.paragraph_index = index;
            page.links.push_back(std::move(out));
        }
        page.paragraphs.push_back(std::move(para));
    }
    return page;
}

} // namespace wec::wikitext
