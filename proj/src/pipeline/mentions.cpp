#include "wec/pipeline/mentions.h"

#include <algorithm>
#include <map>

#include "wec/pipeline/tokenize.h"
#include "wec/util/log.h"
#include "wec/util/parallel.h"

namespace wec::pipeline {

std::string page_url(const std::string &url_base, const std::string &title) {
    std::string out = url_base;
    for (char c : title)
        out += (c == ' ') ? '_' : c;
    return out;
}

MentionExtractor::MentionExtractor(const EventRegistry &registry, const wikitext::RedirectMap &redirects,
                                   MentionConfig config)
    : registry_(registry), redirects_(redirects), config_(std::move(config)) {}

const std::string *MentionExtractor::resolve(const std::string &target) const {
    if (auto it = registry_.pivots.find(target); it != registry_.pivots.end())
        return &it->first;
    if (!config_.follow_redirects)
        return nullptr;
    auto r = redirects_.find(target);
    if (r == redirects_.end())
        return nullptr;
    if (auto it = registry_.pivots.find(r->second); it != registry_.pivots.end())
        return &it->first;
    return nullptr;
}

PageMentions MentionExtractor::extract(const wikitext::ParsedPage &page) const {
    PageMentions out;

    // Anchor edges of every link in a paragraph are token boundaries, so a
    // mention span always covers its anchor exactly.
    std::map<std::size_t, std::vector<std::size_t>> boundaries;
    for (const auto &link : page.links) {
        auto &b = boundaries[link.paragraph_index];
        b.push_back(link.anchor_char_span.begin);
        b.push_back(link.anchor_char_span.end);
    }

    struct Tokenized {
        std::vector<std::string> texts;
        std::vector<wikitext::Span> spans;
        std::shared_ptr<const std::string> paragraph;
    };
    std::map<std::size_t, Tokenized> cache;

    for (const auto &link : page.links) {
        const std::string *pivot = resolve(link.target_title);
        if (!pivot || *pivot == page.title)
            continue;
        if (link.paragraph_index >= page.paragraphs.size()) {
            ++out.dropped;
            log::warn("mention_dropped", {{"reason", "paragraph index out of range"},
                                          {"source_title", page.title},
                                          {"paragraph_index", link.paragraph_index}});
            continue;
        }
        const auto &para = page.paragraphs[link.paragraph_index];
        if (para.is_boilerplate)
            continue;
        const auto &span = link.anchor_char_span;
        if (span.begin >= span.end || span.end > para.text.size()) {
            ++out.dropped;
            log::warn("mention_dropped", {{"reason", "link offset outside paragraph"},
                                          {"source_title", page.title},
                                          {"paragraph_index", link.paragraph_index},
                                          {"anchor", {span.begin, span.end}}});
            continue;
        }

        auto [it, inserted] = cache.try_emplace(link.paragraph_index);
        Tokenized &tok = it->second;
        if (inserted) {
            for (auto &t : tokenize(para.text, boundaries[link.paragraph_index])) {
                tok.texts.push_back(std::move(t.text));
                tok.spans.push_back(t.span);
            }
            tok.paragraph = std::make_shared<const std::string>(para.text);
        }

        std::size_t first = tok.spans.size(), last = 0;
        for (std::size_t i = 0; i < tok.spans.size(); ++i) {
            if (tok.spans[i].begin >= span.begin && tok.spans[i].end <= span.end) {
                first = std::min(first, i);
                last = i;
            }
        }
        if (first == tok.spans.size()) {
            ++out.dropped;
            log::warn("mention_dropped", {{"reason", "anchor covers no token"},
                                          {"source_title", page.title},
                                          {"paragraph_index", link.paragraph_index}});
            continue;
        }

        const PivotInfo &info = *registry_.find(*pivot);
        Mention m;
        m.tokens = tok.texts;
        m.first = first;
        m.last = last;
        m.mention_text = detokenize(m.tokens, first, last);
        m.source_title = page.title;
        m.target_title = *pivot;
        m.cluster_id = info.cluster_id;
        m.metadata = {page_url(config_.url_base, page.title), page_url(config_.url_base, *pivot),
                      info.infobox_type};
        m.origin = {link.paragraph_index, span, tok.paragraph};
        out.mentions.push_back(std::move(m));
    }
    return out;
}

void finalize_mentions(std::vector<Mention> &mentions) {
    std::stable_sort(mentions.begin(), mentions.end(), [](const Mention &a, const Mention &b) {
        if (a.source_title != b.source_title)
            return a.source_title < b.source_title;
        if (a.origin.paragraph_index != b.origin.paragraph_index)
            return a.origin.paragraph_index < b.origin.paragraph_index;
        if (a.origin.anchor.begin != b.origin.anchor.begin)
            return a.origin.anchor.begin < b.origin.anchor.begin;
        return a.origin.anchor.end < b.origin.anchor.end;
    });
    for (std::size_t i = 0; i < mentions.size(); ++i)
        mentions[i].mention_id = static_cast<std::int64_t>(i);
}

std::vector<Mention> collect_mentions(const std::vector<wikitext::ParsedPage> &pages,
                                      const EventRegistry &registry,
                                      const wikitext::RedirectMap &redirects, const MentionConfig &config,
                                      unsigned workers, std::size_t *dropped) {
    MentionExtractor extractor(registry, redirects, config);
    std::vector<PageMentions> per_page(pages.size());
    util::parallel_for(pages.size(), workers, [&](std::size_t i) { per_page[i] = extractor.extract(pages[i]); });

    std::vector<Mention> all;
    std::size_t total_dropped = 0;
    for (auto &pm : per_page) {
        total_dropped += pm.dropped;
        std::move(pm.mentions.begin(), pm.mentions.end(), std::back_inserter(all));
    }
    if (dropped)
        *dropped = total_dropped;
    finalize_mentions(all);
    return all;
}

} // namespace wec::pipeline
