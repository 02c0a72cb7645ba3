#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <regex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wec/pipeline/types.h"
#include "wec/wikitext/types.h"

namespace wec::pipeline {

struct FilterResult {
    std::vector<Mention> kept;
    std::vector<Mention> removed;
};

inline constexpr std::size_t kDefaultMinContextTokens = 5;

/// Removes mentions whose paragraph has fewer than `min_tokens` tokens
/// outside the mention span.
FilterResult filter_lacking_context(std::vector<Mention> mentions,
                                    std::size_t min_tokens = kDefaultMinContextTokens);

/// Default detectors for markup that survived stripping: an HTML-style
/// tag pair, and a JSON-style `{"key":` run.
std::vector<std::string> default_boilerplate_patterns();

/// Removes mentions whose paragraph text matches any of `patterns`
/// (ECMAScript syntax). Throws InputError on an invalid pattern.
FilterResult filter_boilerplate_code(std::vector<Mention> mentions,
                                     const std::vector<std::string> &patterns = default_boilerplate_patterns());

struct NerAnnotation {
    std::string source_title;
    std::size_t paragraph_index = 0;
    /// Byte offsets into the paragraph text.
    wikitext::Span char_span;
    std::string label;
};

/// The spaCy / OntoNotes entity labels.
const std::set<std::string> &ontonotes_labels();

/// The labels whose mentions are argument links rather than event links.
const std::set<std::string> &default_blocked_labels();

/// Standoff NE annotations indexed by (source_title, paragraph_index).
class NerIndex {
public:
    explicit NerIndex(std::set<std::string> tagset = ontonotes_labels());

    /// Throws InputError for a label outside the tag set or an empty span.
    void add(NerAnnotation annotation);

    /// Reads {source_title, paragraph_index, char_start, char_end, label}
    /// records; errors name the offending line.
    void load(const std::filesystem::path &path);

    const std::vector<NerAnnotation> *lookup(const std::string &title, std::size_t paragraph) const;
    std::size_t size() const { return count_; }
    /// Annotation count per source title.
    std::map<std::string, std::size_t> title_counts() const;

private:
    std::set<std::string> tagset_;
    std::map<std::pair<std::string, std::size_t>, std::vector<NerAnnotation>> by_paragraph_;
    std::size_t count_ = 0;
};

struct NerFilterStats {
    /// Annotations whose source_title has no mention at all.
    std::size_t unknown_document_annotations = 0;
};

inline constexpr double kDefaultNerCoverage = 0.5;

/// Removes a mention iff one annotation with a blocked label covers at
/// least `coverage` of the mention's anchor bytes.
FilterResult filter_by_ner(std::vector<Mention> mentions, const NerIndex &ner,
                           const std::set<std::string> &blocked = default_blocked_labels(),
                           double coverage = kDefaultNerCoverage, NerFilterStats *stats = nullptr);

} // namespace wec::pipeline
