#pragma once

#include <set>
#include <string>

#include "wec/wikitext/types.h"

namespace wec::wikitext {

/// Namespace prefixes that change how `[[Prefix:...]]` links are treated.
/// Defaults are the English names; other languages add their own.
struct MarkupConfig {
    /// Media links are removed from prose; a line holding only a media
    /// link becomes a boilerplate caption paragraph.
    std::set<std::string> media_prefixes{"file", "image", "media"};
    std::set<std::string> category_prefixes{"category"};
    /// Prefixes whose display text is kept but which never produce an
    /// article link (project namespaces and sister-project interwikis).
    std::set<std::string> non_article_prefixes{
        "wikipedia", "wp",     "project", "help",       "template", "portal",    "user",
        "user talk", "talk",   "special", "draft",      "module",   "mediawiki", "wiktionary",
        "wikt",      "s",      "q",       "n",          "b",        "v",         "voy",
        "commons",   "c",      "d",       "m",          "meta",     "species",   "wikisource",
        "wikiquote", "wikinews", "wikibooks", "wikiversity", "wikivoyage", "wikidata", "w",
        "file talk", "template talk", "category talk", "wikipedia talk", "portal talk", "timedtext"};
};

/// Splits a non-redirect page into paragraphs and internal links.
/// Throws ContractError when `raw` is a redirect.
ParsedPage parse_page(const RawPage &raw, const MarkupConfig &config = {});

/// Plain-text rendering of a wikitext fragment (templates, references,
/// comments and emphasis removed; link anchors kept inline).
std::string strip_markup(std::string_view wikitext, const MarkupConfig &config = {});

} // namespace wec::wikitext
