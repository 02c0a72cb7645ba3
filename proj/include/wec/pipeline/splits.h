#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wec/pipeline/types.h"

namespace wec::pipeline {

inline constexpr std::size_t kDefaultMaxIdentical = 4;

/// Within each chain keeps, for every normalised mention_text (case-folded,
/// whitespace collapsed), only the first `max_identical` mentions in chain
/// order. Chains are expected in corpus order, as assemble_chains makes them.
std::vector<CoreferenceChain> control_diversity(std::vector<CoreferenceChain> chains,
                                                std::size_t max_identical = kDefaultMaxIdentical);

inline constexpr double kDefaultDevFraction = 0.4;

struct Splits {
    DatasetSplit train{"train", {}};
    DatasetSplit dev{"dev", {}};
    DatasetSplit test{"test", {}};

    /// cluster_id -> split name.
    std::map<int, std::string> assignment() const;
};

/// Draws `n_eval_clusters` chains uniformly without replacement (seeded
/// partial Fisher-Yates over chains sorted by cluster id). In draw order,
/// chains go to dev while dev holds fewer than dev_fraction of the drawn
/// mentions, then to test. Every split lists chains by cluster id.
Splits make_splits(std::vector<CoreferenceChain> chains, std::size_t n_eval_clusters,
                   double dev_fraction = kDefaultDevFraction, std::uint64_t seed = 0);

/// Routes chains into splits by a previously computed assignment; chains
/// whose cluster is not assigned go to train.
Splits apply_assignment(std::vector<CoreferenceChain> chains, const std::map<int, std::string> &assignment);

/// Drops every train mention whose source article also holds a validated
/// eval mention, then drops chains left empty.
DatasetSplit purge_train_leakage(const DatasetSplit &train, const std::vector<Mention> &validated_eval);

} // namespace wec::pipeline
