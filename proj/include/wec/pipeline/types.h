#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "wec/wikitext/types.h"

namespace wec::pipeline {

struct PivotInfo {
    int cluster_id = 0;
    std::string infobox_type;
};

/// Event pivot pages keyed by title. Cluster ids are dense and follow the
/// sorted title order.
struct EventRegistry {
    std::map<std::string, PivotInfo> pivots;

    const PivotInfo *find(const std::string &title) const;
    std::size_t size() const { return pivots.size(); }
    bool empty() const { return pivots.empty(); }
    /// Pivot titles indexed by cluster id.
    std::vector<std::string> titles_by_cluster() const;
};

struct MentionMetadata {
    std::string source_url;
    std::string target_url;
    std::string infobox_type;
};

/// Where a mention came from inside its source page. Used by the context
/// and NE filters; never written to dataset files.
struct MentionOrigin {
    std::size_t paragraph_index = 0;
    wikitext::Span anchor;
    std::shared_ptr<const std::string> paragraph_text;
};

struct Mention {
    std::int64_t mention_id = -1;
    std::vector<std::string> tokens;
    std::size_t first = 0;
    std::size_t last = 0;
    std::string mention_text;
    std::string source_title;
    std::string target_title;
    int cluster_id = 0;
    MentionMetadata metadata;
    MentionOrigin origin;
};

struct CoreferenceChain {
    int cluster_id = 0;
    std::string pivot_title;
    std::vector<Mention> mentions;
};

struct DatasetSplit {
    std::string name;
    std::vector<CoreferenceChain> chains;

    std::size_t mention_count() const;
};

/// Dataset record form: exactly the published mention fields.
nlohmann::json to_json(const Mention &mention);
/// Validates field presence and span bounds; throws InputError.
Mention mention_from_json(const nlohmann::json &record);

/// Groups mentions into chains ordered by cluster id, each chain in
/// mention-id order. `registry`, when given, supplies pivot titles;
/// otherwise the mentions' target_title is used.
std::vector<CoreferenceChain> assemble_chains(std::vector<Mention> mentions,
                                              const EventRegistry *registry = nullptr);

std::vector<Mention> flatten(const std::vector<CoreferenceChain> &chains);

} // namespace wec::pipeline
