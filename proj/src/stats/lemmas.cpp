#include "wec/stats/lemmas.h"

#include "wec/util/error.h"
#include "wec/util/jsonl.h"
#include "wec/util/utf8.h"

namespace wec::stats {

LemmaResource LemmaResource::load(const std::filesystem::path &path) {
    try {
        return parse(util::read_file(path));
    } catch (const InputError &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

LemmaResource LemmaResource::parse(std::string_view text) {
    LemmaResource out;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty() || line.front() == '#')
            continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size())
            throw InputError("line " + std::to_string(line_no) + ": expected surface<TAB>lemma");
        out.add(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
}

void LemmaResource::add(std::string_view surface, std::string_view lemma) {
    table_[utf8::case_fold(surface)] = utf8::case_fold(lemma);
}

std::string LemmaResource::lemma(std::string_view token) const {
    std::string folded = utf8::case_fold(token);
    auto it = table_.find(folded);
    return it == table_.end() ? folded : it->second;
}

const std::set<std::string> &english_stop_words() {
    static const std::set<std::string> words{
        "a",     "an",    "the",   "of",    "in",     "on",    "at",    "to",     "for",   "by",    "with",
        "from",  "and",   "or",    "but",   "nor",    "as",    "into",  "onto",   "upon",  "over",  "under",
        "about", "after", "before", "during", "since", "until", "than", "this",   "that",  "these", "those",
        "its",   "it",    "his",   "her",   "hers",   "their", "theirs", "our",   "ours",  "my",    "your",
        "yours", "he",    "she",   "they",  "we",     "you",   "i",     "them",   "him",   "us",    "me",
        "who",   "whom",  "whose", "which", "what",   "there", "here",  "be",     "is",    "are",   "was",
        "were",  "been",  "being", "has",   "have",   "had",   "do",    "does",   "did",   "not",   "no",
        "so",    "such",  "very",  "'s",    "s"};
    return words;
}

namespace {

bool all_punct(std::string_view token) {
    std::size_t pos = 0;
    while (pos < token.size())
        if (!utf8::is_punct(utf8::decode(token, pos)))
            return false;
    return true;
}

/// Digits with optional separators: 2001, 1,000, 3.5, 1990s is not.
bool is_number(std::string_view token) {
    bool digit = false;
    std::size_t pos = 0;
    while (pos < token.size()) {
        const char32_t cp = utf8::decode(token, pos);
        if (utf8::is_digit(cp))
            digit = true;
        else if (!utf8::is_punct(cp))
            return false;
    }
    return digit;
}

} // namespace

std::size_t rightmost_content_head(const pipeline::Mention &m, const std::set<std::string> &stop_words) {
    for (std::size_t i = m.last + 1; i-- > m.first;) {
        const std::string &tok = m.tokens[i];
        if (all_punct(tok) || is_number(tok) || stop_words.count(utf8::case_fold(tok)))
            continue;
        return i;
    }
    return m.last;
}

std::string head_lemma(const pipeline::Mention &m, const LemmaResource &lemmas, const HeadFinder &head) {
    if (m.first > m.last || m.last >= m.tokens.size())
        throw ContractError("mention " + std::to_string(m.mention_id) + " has an empty or invalid span");
    const std::size_t index = head ? head(m) : rightmost_content_head(m);
    if (index < m.first || index > m.last)
        throw ContractError("head finder returned a token outside the mention span");
    return lemmas.lemma(m.tokens[index]);
}

} // namespace wec::stats
