#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace wec::wikitext {

/// Half-open byte range [begin, end).
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool operator==(const Span &) const = default;
};

/// One page element of a MediaWiki export.
struct RawPage {
    std::int64_t page_id = 0;
    std::string title;
    int ns = 0;
    std::optional<std::string> redirect_target;
    std::string wikitext;
};

struct Paragraph {
    std::string text;
    Span char_span_in_source;
    bool is_boilerplate = false;
};

struct InternalLink {
    std::string target_title;
    std::string anchor_text;
    std::size_t paragraph_index = 0;
    /// Byte offsets into Paragraph::text.
    Span anchor_char_span;
};

struct ParsedPage {
    std::int64_t page_id = 0;
    std::string title;
    std::optional<std::string> infobox_type;
    std::vector<Paragraph> paragraphs;
    std::vector<InternalLink> links;
};

nlohmann::json to_json(const ParsedPage &page);
ParsedPage parsed_page_from_json(const nlohmann::json &record);

} // namespace wec::wikitext
