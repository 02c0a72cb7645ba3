#include "wec/pipeline/types.h"

#include <algorithm>

#include "wec/util/error.h"

namespace wec::pipeline {

using nlohmann::json;

const PivotInfo *EventRegistry::find(const std::string &title) const {
    auto it = pivots.find(title);
    return it == pivots.end() ? nullptr : &it->second;
}

std::vector<std::string> EventRegistry::titles_by_cluster() const {
    std::vector<std::string> titles(pivots.size());
    for (const auto &[title, info] : pivots) {
        if (info.cluster_id < 0 || static_cast<std::size_t>(info.cluster_id) >= titles.size())
            throw ContractError("registry cluster ids are not dense");
        titles[info.cluster_id] = title;
    }
    return titles;
}

std::size_t DatasetSplit::mention_count() const {
    std::size_t n = 0;
    for (const auto &chain : chains)
        n += chain.mentions.size();
    return n;
}

json to_json(const Mention &m) {
    return json{{"mention_id", m.mention_id},
                {"tokens", m.tokens},
                {"span", json::array({m.first, m.last})},
                {"mention_text", m.mention_text},
                {"source_title", m.source_title},
                {"target_title", m.target_title},
                {"cluster_id", m.cluster_id},
                {"metadata",
                 {{"source_url", m.metadata.source_url},
                  {"target_url", m.metadata.target_url},
                  {"infobox_type", m.metadata.infobox_type}}}};
}

Mention mention_from_json(const json &r) {
    Mention m;
    try {
        m.mention_id = r.at("mention_id").get<std::int64_t>();
        m.tokens = r.at("tokens").get<std::vector<std::string>>();
        const auto &span = r.at("span");
        if (!span.is_array() || span.size() != 2)
            throw InputError("span must be [first, last]");
        m.first = span[0].get<std::size_t>();
        m.last = span[1].get<std::size_t>();
        m.mention_text = r.at("mention_text").get<std::string>();
        m.source_title = r.at("source_title").get<std::string>();
        m.target_title = r.at("target_title").get<std::string>();
        m.cluster_id = r.at("cluster_id").get<int>();
        if (auto it = r.find("metadata"); it != r.end() && it->is_object()) {
            m.metadata.source_url = it->value("source_url", "");
            m.metadata.target_url = it->value("target_url", "");
            m.metadata.infobox_type = it->value("infobox_type", "");
        }
    } catch (const json::exception &e) {
        throw InputError(std::string("bad mention record: ") + e.what());
    }
    if (m.first > m.last || m.last >= m.tokens.size())
        throw InputError("mention " + std::to_string(m.mention_id) + ": span out of range");
    return m;
}

std::vector<CoreferenceChain> assemble_chains(std::vector<Mention> mentions,
                                              const EventRegistry *registry) {
    std::stable_sort(mentions.begin(), mentions.end(), [](const Mention &a, const Mention &b) {
        if (a.cluster_id != b.cluster_id)
            return a.cluster_id < b.cluster_id;
        return a.mention_id < b.mention_id;
    });
    std::vector<std::string> titles;
    if (registry)
        titles = registry->titles_by_cluster();

    std::vector<CoreferenceChain> chains;
    for (auto &m : mentions) {
        if (chains.empty() || chains.back().cluster_id != m.cluster_id) {
            CoreferenceChain chain;
            chain.cluster_id = m.cluster_id;
            if (registry && m.cluster_id >= 0 && static_cast<std::size_t>(m.cluster_id) < titles.size())
                chain.pivot_title = titles[m.cluster_id];
            else
                chain.pivot_title = m.target_title;
            chains.push_back(std::move(chain));
        }
        chains.back().mentions.push_back(std::move(m));
    }
    return chains;
}

std::vector<Mention> flatten(const std::vector<CoreferenceChain> &chains) {
    std::vector<Mention> out;
    for (const auto &chain : chains)
        out.insert(out.end(), chain.mentions.begin(), chain.mentions.end());
    return out;
}

} // namespace wec::pipeline
