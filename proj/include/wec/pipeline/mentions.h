#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wec/pipeline/types.h"
#include "wec/wikitext/redirects.h"
#include "wec/wikitext/types.h"

namespace wec::pipeline {

struct MentionConfig {
    /// Resolve link targets through the redirect map before the pivot lookup.
    bool follow_redirects = true;
    std::string url_base = "https://en.wikipedia.org/wiki/";
};

struct PageMentions {
    std::vector<Mention> mentions;
    /// Links whose anchor offsets fall outside their paragraph or cover no token.
    std::size_t dropped = 0;
};

std::string page_url(const std::string &url_base, const std::string &title);

/// Maps one parsed page to its pivot-link mentions. Pure and thread-safe;
/// mention ids are left at -1 until finalize_mentions runs.
class MentionExtractor {
public:
    MentionExtractor(const EventRegistry &registry, const wikitext::RedirectMap &redirects,
                     MentionConfig config = {});

    PageMentions extract(const wikitext::ParsedPage &page) const;

    /// The pivot a link target resolves to, or nullptr.
    const std::string *resolve(const std::string &target) const;

private:
    const EventRegistry &registry_;
    const wikitext::RedirectMap &redirects_;
    MentionConfig config_;
};

/// Puts mentions in corpus order (source title, paragraph, anchor offset)
/// and numbers them from zero. The result is independent of the order in
/// which pages were processed.
void finalize_mentions(std::vector<Mention> &mentions);

/// Extracts from every page using `workers` threads, then finalises.
std::vector<Mention> collect_mentions(const std::vector<wikitext::ParsedPage> &pages,
                                      const EventRegistry &registry,
                                      const wikitext::RedirectMap &redirects,
                                      const MentionConfig &config = {}, unsigned workers = 1,
                                      std::size_t *dropped = nullptr);

} // namespace wec::pipeline
