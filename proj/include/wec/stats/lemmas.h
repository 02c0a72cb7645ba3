#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>

#include "wec/pipeline/types.h"

namespace wec::stats {

/// Case-folded surface token -> lemma. Lookup is total: unknown tokens
/// lemmatise to their case-folded form.
class LemmaResource {
public:
    LemmaResource() = default;

    /// Two tab-separated columns `surface<TAB>lemma`; blank lines and lines
    /// starting with `#` are skipped. Both columns are case-folded.
    static LemmaResource load(const std::filesystem::path &path);
    static LemmaResource parse(std::string_view text);

    void add(std::string_view surface, std::string_view lemma);
    std::string lemma(std::string_view token) const;
    std::size_t size() const { return table_.size(); }

private:
    std::unordered_map<std::string, std::string> table_;
};

/// Picks the head token of a mention; returns an index in [first, last].
using HeadFinder = std::function<std::size_t(const pipeline::Mention &)>;

/// English function words skipped by the default head rule.
const std::set<std::string> &english_stop_words();

/// Rightmost span token that is not a stop word, punctuation or a number;
/// the rightmost token when none qualifies.
std::size_t rightmost_content_head(const pipeline::Mention &mention,
                                   const std::set<std::string> &stop_words = english_stop_words());

/// Throws ContractError when the mention span is invalid.
std::string head_lemma(const pipeline::Mention &mention, const LemmaResource &lemmas,
                       const HeadFinder &head = nullptr);

} // namespace wec::stats
