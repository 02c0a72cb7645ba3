#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wec/pipeline/types.h"
#include "wec/stats/lemmas.h"

namespace wec::stats {

struct StatsReport {
    std::string name;
    std::size_t mentions = 0;
    std::size_t clusters = 0;
    std::size_t non_singleton_clusters = 0;
    /// Mean number of distinct clusters per distinct head lemma; absent
    /// when there are no mentions.
    std::optional<double> ambiguity;
    /// Mean number of distinct head lemmas per non-singleton cluster;
    /// absent when every cluster is a singleton.
    std::optional<double> diversity;
    /// Mean, over non-singleton clusters, of mentions per distinct
    /// normalised mention string.
    std::optional<double> same_string_ratio;
};

StatsReport compute_stats(const pipeline::DatasetSplit &split, const LemmaResource &lemmas,
                          const HeadFinder &head = nullptr);

/// Machine-readable form; undefined ratios are null.
nlohmann::json to_json(const StatsReport &report);

/// Fixed-width table with one row per report, ratios to one decimal and
/// "-" for undefined values.
std::string format_table(const std::vector<StatsReport> &reports);

} // namespace wec::stats
