#include "wec/stats/corpus_stats.h"

#include <cstdio>
#include <map>
#include <set>

#include "wec/util/utf8.h"

namespace wec::stats {

StatsReport compute_stats(const pipeline::DatasetSplit &split, const LemmaResource &lemmas, const HeadFinder &head) {
    StatsReport r;
    r.name = split.name;
    std::map<std::string, std::set<int>> clusters_of_lemma;
    double diversity_sum = 0.0, same_string_sum = 0.0;

    // Chains are grouped by cluster id first, so split files holding one
    // cluster in several chains still count it once.
    std::map<int, std::vector<const pipeline::Mention *>> by_cluster;
    for (const auto &chain : split.chains)
        for (const auto &m : chain.mentions)
            by_cluster[m.cluster_id].push_back(&m);

    for (const auto &[cluster, members] : by_cluster) {
        std::set<std::string> cluster_lemmas, strings;
        for (const auto *m : members) {
            std::string lemma = head_lemma(*m, lemmas, head);
            clusters_of_lemma[lemma].insert(cluster);
            cluster_lemmas.insert(std::move(lemma));
            strings.insert(utf8::normalize_surface(m->mention_text));
        }
        r.mentions += members.size();
        ++r.clusters;
        if (members.size() > 1) {
            ++r.non_singleton_clusters;
            diversity_sum += static_cast<double>(cluster_lemmas.size());
            same_string_sum += static_cast<double>(members.size()) / static_cast<double>(strings.size());
        }
    }
    if (!clusters_of_lemma.empty()) {
        double total = 0.0;
        for (const auto &[lemma, clusters] : clusters_of_lemma)
            total += static_cast<double>(clusters.size());
        r.ambiguity = total / static_cast<double>(clusters_of_lemma.size());
    }
    if (r.non_singleton_clusters > 0) {
        r.diversity = diversity_sum / static_cast<double>(r.non_singleton_clusters);
        r.same_string_ratio = same_string_sum / static_cast<double>(r.non_singleton_clusters);
    }
    return r;
}

nlohmann::json to_json(const StatsReport &r) {
    auto opt = [](const std::optional<double> &v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"split", r.name},
            {"mentions", r.mentions},
            {"clusters", r.clusters},
            {"non_singleton_clusters", r.non_singleton_clusters},
            {"ambiguity", opt(r.ambiguity)},
            {"diversity", opt(r.diversity)},
            {"same_string_ratio", opt(r.same_string_ratio)}};
}

std::string format_table(const std::vector<StatsReport> &reports) {
    auto ratio = [](const std::optional<double> &v) {
        if (!v)
            return std::string("-");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", *v);
        return std::string(buf);
    };
    char line[256];
    std::string out;
    std::snprintf(line, sizeof line, "%-10s %10s %10s %14s %10s %10s %12s\n", "Split", "Mentions", "Clusters",
                  "Non-Singleton", "Ambiguity", "Diversity", "Same-String");
    out += line;
    for (const auto &r : reports) {
        std::snprintf(line, sizeof line, "%-10s %10zu %10zu %14zu %10s %10s %12s\n", r.name.c_str(), r.mentions,
                      r.clusters, r.non_singleton_clusters, ratio(r.ambiguity).c_str(), ratio(r.diversity).c_str(),
                      ratio(r.same_string_ratio).c_str());
        out += line;
    }
    return out;
}

} // namespace wec::stats
