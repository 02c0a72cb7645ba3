#include "wec/wikitext/types.h"

#include "wec/util/error.h"

namespace wec::wikitext {

namespace {

nlohmann::json span_json(const Span &span) { return nlohmann::json::array({span.begin, span.end}); }

Span span_from(const nlohmann::json &value) {
    if (!value.is_array() || value.size() != 2)
        throw InputError("span must be a two-element array");
    return Span{value[0].get<std::size_t>(), value[1].get<std::size_t>()};
}

} // namespace

nlohmann::json to_json(const ParsedPage &page) {
    nlohmann::json paragraphs = nlohmann::json::array();
    for (const auto &p : page.paragraphs)
        paragraphs.push_back({{"text", p.text},
                              {"char_span_in_source", span_json(p.char_span_in_source)},
                              {"is_boilerplate", p.is_boilerplate}});
    nlohmann::json links = nlohmann::json::array();
    for (const auto &l : page.links)
        links.push_back({{"target_title", l.target_title},
                         {"anchor_text", l.anchor_text},
                         {"paragraph_index", l.paragraph_index},
                         {"anchor_char_span", span_json(l.anchor_char_span)}});
    return {{"page_id", page.page_id},
            {"title", page.title},
            {"infobox_type", page.infobox_type ? nlohmann::json(*page.infobox_type) : nlohmann::json(nullptr)},
            {"paragraphs", std::move(paragraphs)},
            {"links", std::move(links)}};
}

ParsedPage parsed_page_from_json(const nlohmann::json &record) {
    try {
        ParsedPage page;
        page.page_id = record.at("page_id").get<std::int64_t>();
        page.title = record.at("title").get<std::string>();
        if (const auto &type = record.at("infobox_type"); !type.is_null())
            page.infobox_type = type.get<std::string>();
        for (const auto &p : record.at("paragraphs"))
            page.paragraphs.push_back({p.at("text").get<std::string>(), span_from(p.at("char_span_in_source")),
                                       p.at("is_boilerplate").get<bool>()});
        for (const auto &l : record.at("links")) {
            InternalLink link;
            link.target_title = l.at("target_title").get<std::string>();
            link.anchor_text = l.at("anchor_text").get<std::string>();
            link.paragraph_index = l.at("paragraph_index").get<std::size_t>();
            link.anchor_char_span = span_from(l.at("anchor_char_span"));
            if (link.paragraph_index >= page.paragraphs.size())
                throw InputError("link paragraph_index out of range");
            page.links.push_back(std::move(link));
        }
        return page;
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("bad ParsedPage record: ") + e.what());
    }
}

} // namespace wec::wikitext
