#include "wec/pipeline/splits.h"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_map>

#include "wec/util/error.h"
#include "wec/util/random.h"
#include "wec/util/utf8.h"

namespace wec::pipeline {

std::vector<CoreferenceChain> control_diversity(std::vector<CoreferenceChain> chains, std::size_t max_identical) {
    if (max_identical < 1)
        throw ContractError("max_identical must be at least 1");
    for (auto &chain : chains) {
        std::unordered_map<std::string, std::size_t> seen;
        std::vector<Mention> kept;
        for (auto &m : chain.mentions)
            if (++seen[utf8::normalize_surface(m.mention_text)] <= max_identical)
                kept.push_back(std::move(m));
        chain.mentions = std::move(kept);
    }
    return chains;
}

std::map<int, std::string> Splits::assignment() const {
    std::map<int, std::string> out;
    for (const auto *split : {&train, &dev, &test})
        for (const auto &chain : split->chains)
            out[chain.cluster_id] = split->name;
    return out;
}

namespace {

void sort_by_cluster(std::vector<CoreferenceChain> &chains) {
    std::sort(chains.begin(), chains.end(),
              [](const CoreferenceChain &a, const CoreferenceChain &b) { return a.cluster_id < b.cluster_id; });
}

} // namespace

Splits make_splits(std::vector<CoreferenceChain> chains, std::size_t n_eval_clusters, double dev_fraction,
                   std::uint64_t seed) {
    if (n_eval_clusters > 0 && n_eval_clusters >= chains.size())
        throw ContractError("eval cluster count " + std::to_string(n_eval_clusters) +
                            " must be smaller than the number of chains (" + std::to_string(chains.size()) + ")");
    if (!(dev_fraction >= 0.0 && dev_fraction <= 1.0))
        throw ContractError("dev_fraction must lie in [0, 1]");
    sort_by_cluster(chains);

    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n_eval_clusters; ++i) {
        const std::size_t j = i + util::uniform_below(rng, chains.size() - i);
        std::swap(chains[i], chains[j]);
    }

    std::size_t drawn_mentions = 0;
    for (std::size_t i = 0; i < n_eval_clusters; ++i)
        drawn_mentions += chains[i].mentions.size();
    const double dev_target = dev_fraction * static_cast<double>(drawn_mentions);

    Splits out;
    std::size_t dev_mentions = 0;
    for (std::size_t i = 0; i < chains.size(); ++i) {
        if (i >= n_eval_clusters) {
            out.train.chains.push_back(std::move(chains[i]));
        } else if (static_cast<double>(dev_mentions) < dev_target) {
            dev_mentions += chains[i].mentions.size();
            out.dev.chains.push_back(std::move(chains[i]));
        } else {
            out.test.chains.push_back(std::move(chains[i]));
        }
    }
    sort_by_cluster(out.train.chains);
    sort_by_cluster(out.dev.chains);
    sort_by_cluster(out.test.chains);
    return out;
}

Splits apply_assignment(std::vector<CoreferenceChain> chains, const std::map<int, std::string> &assignment) {
    sort_by_cluster(chains);
    Splits out;
    for (auto &chain : chains) {
        auto it = assignment.find(chain.cluster_id);
        const std::string name = it == assignment.end() ? "train" : it->second;
        if (name == "dev")
            out.dev.chains.push_back(std::move(chain));
        else if (name == "test")
            out.test.chains.push_back(std::move(chain));
        else
            out.train.chains.push_back(std::move(chain));
    }
    return out;
}

DatasetSplit purge_train_leakage(const DatasetSplit &train, const std::vector<Mention> &validated_eval) {
    std::set<std::string> sources;
    for (const auto &m : validated_eval)
        sources.insert(m.source_title);
    DatasetSplit out{train.name, {}};
    for (const auto &chain : train.chains) {
        CoreferenceChain kept{chain.cluster_id, chain.pivot_title, {}};
        for (const auto &m : chain.mentions)
            if (!sources.count(m.source_title))
                kept.mentions.push_back(m);
        if (!kept.mentions.empty())
            out.chains.push_back(std::move(kept));
    }
    return out;
}

} // namespace wec::pipeline
