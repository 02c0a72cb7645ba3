#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "wec/metrics/metrics.h"

namespace wec::metrics {

/// A mention read from the coreference scorer's interchange format:
/// `#begin document` groups of token lines whose last column carries
/// bracketed cluster ids such as `(12`, `12)`, `(12)` or `(3)|(12`.
struct ConllMention {
    std::string document;
    /// Inclusive token positions within the document.
    std::size_t begin = 0;
    std::size_t end = 0;
    long cluster = 0;
    /// Word column of the first token.
    std::string word;

    auto key() const { return std::tie(document, begin, end); }
};

/// Throws InputError naming the line on malformed brackets.
std::vector<ConllMention> read_conll(std::istream &in);
std::vector<ConllMention> read_conll(const std::filesystem::path &path);

/// Writes one single-token line per mention (word `m<id>`) in mention-id
/// order inside one document, the meta-document view the scorer expects.
void write_conll(std::ostream &out, const Partition &partition, const std::string &document = "meta");

/// Mention ids for CoNLL mentions. When every mention is a single token
/// whose word is `m<id>` (as write_conll produces) those ids are used;
/// otherwise ids number the distinct (document, begin, end) spans in order.
std::map<std::tuple<std::string, std::size_t, std::size_t>, MentionId>
conll_mention_ids(const std::vector<ConllMention> &mentions);

/// Builds a partition with mentions grouped by (document, cluster). Throws
/// InputError if one span carries two cluster ids or lacks an id.
Partition conll_partition(const std::vector<ConllMention> &mentions,
                          const std::map<std::tuple<std::string, std::size_t, std::size_t>, MentionId> &ids);

/// Native clustering records: one `{"mention_id": ..., "cluster_id": ...}`
/// per line. Dataset split files qualify as they carry both fields.
Partition read_clustering(const std::filesystem::path &path);
/// Writes clusters in order of their smallest mention id, numbering them
/// from zero, each line in mention-id order.
void write_clustering(const std::filesystem::path &path, const Partition &partition);

/// Clusters sorted internally and ordered by smallest member.
Partition canonical(const Partition &partition);

enum class ClusteringFormat { conll, jsonl };

/// `.conll` files and files whose first non-blank line starts with
/// `#begin` are CoNLL; everything else is JSONL.
ClusteringFormat detect_format(const std::filesystem::path &path);

/// Reads a key and a response in either format. Two CoNLL files share one
/// span-to-id map, so mentions align by position.
std::pair<Partition, Partition> read_key_response(const std::filesystem::path &key,
                                                  const std::filesystem::path &response);

} // namespace wec::metrics
