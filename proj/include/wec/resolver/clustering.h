#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wec/metrics/metrics.h"
#include "wec/pipeline/types.h"
#include "wec/resolver/score_matrix.h"
#include "wec/stats/lemmas.h"

namespace wec::resolver {

inline constexpr double kDefaultThreshold = 0.5;

struct Provenance {
    std::string method; // "agglomerative-average" or "lemma-baseline"
    std::optional<double> threshold;
    std::optional<std::string> score_digest;
    std::optional<double> default_score;
    std::optional<std::size_t> doc_groups;
};

struct Clustering {
    metrics::Partition partition;
    Provenance provenance;
};

nlohmann::json to_json(const Provenance &provenance);

struct ClusteringConfig {
    double threshold = kDefaultThreshold;
    /// Threads used to refresh cached best partners after a merge.
    unsigned workers = 1;
};

/// One greedy step: clusters whose smallest member indices are `lower` and
/// `upper` (lower < upper) merged at average-link score `score`.
struct Merge {
    std::size_t lower = 0;
    std::size_t upper = 0;
    double score = 0.0;
};

/// The full greedy average-link merge sequence down to one cluster. At each
/// step the pair with the highest average score wins; ties go to the pair
/// whose smallest member ids are lexicographically smallest.
std::vector<Merge> merge_trajectory(const ScoreMatrix &scores, unsigned workers = 1);

/// Replays merges until the first one scoring below `threshold`. Clusters
/// are sorted internally and listed by their smallest member.
metrics::Partition cut_trajectory(const std::vector<MentionId> &ids, const std::vector<Merge> &merges,
                                  double threshold);

/// Average-link clustering stopped when the best merge scores below the
/// threshold. Throws ContractError if the threshold is outside [0, 1].
Clustering agglomerate(const ScoreMatrix &scores, const ClusteringConfig &config = {});

/// Groups mentions whose head lemmas are equal.
Clustering lemma_baseline(const std::vector<pipeline::Mention> &mentions, const stats::LemmaResource &lemmas,
                          const stats::HeadFinder &head = nullptr);

/// 0.00, 0.05, ..., 1.00.
std::vector<double> default_threshold_grid();

struct TuningResult {
    double threshold = kDefaultThreshold;
    /// CoNLL F1 for each grid value, in grid order.
    std::vector<std::pair<double, double>> curve;
};

/// The grid value whose clustering has the best CoNLL F1 against the key,
/// smallest value on ties. Throws ContractError on an empty grid and
/// InputError when the key and score universes differ.
TuningResult tune_threshold(const metrics::Partition &dev_key, const ScoreMatrix &dev_scores,
                            const std::vector<double> &grid = default_threshold_grid(), unsigned workers = 1);

/// Document name to group label.
using DocPartition = std::map<std::string, std::string>;

/// Reads `document<TAB>group` lines; `#` starts a comment. Throws InputError
/// on malformed lines or a document listed in two groups.
DocPartition load_doc_partition(const std::filesystem::path &path);

/// Runs agglomerate separately inside each group of documents.
/// `mention_documents` maps every mention id in the scores to its document.
/// Throws InputError when a mention has no document or its document has no
/// group.
Clustering partition_restricted_clustering(const ScoreMatrix &scores, const ClusteringConfig &config,
                                           const std::map<MentionId, std::string> &mention_documents,
                                           const DocPartition &doc_partition);

} // namespace wec::resolver
