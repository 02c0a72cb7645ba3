#include "wec/resolver/clustering.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "wec/util/error.h"
#include "wec/util/log.h"
#include "wec/util/parallel.h"

namespace wec::resolver {

namespace {

/// A candidate merge between clusters identified by their smallest member
/// index, lower < upper.
struct Candidate {
    double score = -std::numeric_limits<double>::infinity();
    std::size_t lower = 0;
    std::size_t upper = 0;
    bool valid = false;
};

bool better(const Candidate &a, const Candidate &b) {
    if (!b.valid)
        return a.valid;
    if (!a.valid)
        return false;
    if (a.score != b.score)
        return a.score > b.score;
    if (a.lower != b.lower)
        return a.lower < b.lower;
    return a.upper < b.upper;
}

class Agglomerator {
public:
    Agglomerator(const ScoreMatrix &scores, unsigned workers)
        : n_(scores.size()), workers_(workers), sizes_(n_, 1), best_(n_) {
        sums_.resize(n_ < 2 ? 0 : n_ * (n_ - 1) / 2);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                sums_[offset(i, j)] = scores.at(i, j);
        for (std::size_t i = 0; i < n_; ++i)
            active_.push_back(i);
        refresh(active_);
    }

    std::vector<Merge> run(double stop) {
        std::vector<Merge> merges;
        while (active_.size() > 1) {
            Candidate top;
            for (std::size_t a : active_)
                if (better(best_[a], top))
                    top = best_[a];
            if (top.score < stop)
                break;
            merges.push_back({top.lower, top.upper, top.score});
            merge(top.lower, top.upper);
        }
        return merges;
    }

private:
    std::size_t offset(std::size_t i, std::size_t j) const {
        if (i > j)
            std::swap(i, j);
        return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
    }

    Candidate pair(std::size_t a, std::size_t c) const {
        Candidate k;
        k.score = sums_[offset(a, c)] / static_cast<double>(sizes_[a] * sizes_[c]);
        k.lower = std::min(a, c);
        k.upper = std::max(a, c);
        k.valid = true;
        return k;
    }

    void refresh_one(std::size_t a) {
        Candidate b;
        for (std::size_t c : active_)
            if (c != a) {
                Candidate k = pair(a, c);
                if (better(k, b))
                    b = k;
            }
        best_[a] = b;
    }

    void refresh(const std::vector<std::size_t> &rows) {
        // Rows are independent, so splitting them across threads keeps the
        // result identical to a sequential pass.
        const unsigned workers = rows.size() * active_.size() > 1u << 16 ? workers_ : 1;
        util::parallel_for(rows.size(), workers, [&](std::size_t i) { refresh_one(rows[i]); });
    }

    void merge(std::size_t lower, std::size_t upper) {
        active_.erase(std::find(active_.begin(), active_.end(), upper));
        for (std::size_t c : active_)
            if (c != lower)
                sums_[offset(lower, c)] += sums_[offset(upper, c)];
        sizes_[lower] += sizes_[upper];
        best_[upper] = Candidate{};

        std::vector<std::size_t> stale{lower};
        for (std::size_t c : active_) {
            if (c == lower)
                continue;
            const Candidate &b = best_[c];
            const std::size_t partner = b.lower == c ? b.upper : b.lower;
            if (!b.valid || partner == lower || partner == upper) {
                stale.push_back(c);
                continue;
            }
            // Every other pair involving c is unchanged, so only the merged
            // cluster can displace the cached partner.
            Candidate k = pair(c, lower);
            if (better(k, b))
                best_[c] = k;
        }
        refresh(stale);
    }

    std::size_t n_;
    unsigned workers_;
    std::vector<double> sums_;
    std::vector<std::size_t> sizes_;
    std::vector<Candidate> best_;
    std::vector<std::size_t> active_;
};

void check_threshold(double threshold) {
    if (!std::isfinite(threshold) || threshold < 0.0 || threshold > 1.0)
        throw ContractError("threshold must be within [0, 1]");
}

metrics::Partition canonical_partition(std::vector<std::vector<MentionId>> clusters) {
    for (auto &c : clusters)
        std::sort(c.begin(), c.end());
    std::sort(clusters.begin(), clusters.end());
    return metrics::Partition(std::move(clusters));
}

} // namespace

nlohmann::json to_json(const Provenance &p) {
    nlohmann::json j{{"method", p.method}};
    if (p.threshold)
        j["threshold"] = *p.threshold;
    if (p.score_digest)
        j["score_digest"] = *p.score_digest;
    if (p.default_score)
        j["default_score"] = *p.default_score;
    if (p.doc_groups)
        j["doc_groups"] = *p.doc_groups;
    return j;
}

std::vector<Merge> merge_trajectory(const ScoreMatrix &scores, unsigned workers) {
    return Agglomerator(scores, workers).run(-std::numeric_limits<double>::infinity());
}

metrics::Partition cut_trajectory(const std::vector<MentionId> &ids, const std::vector<Merge> &merges,
                                  double threshold) {
    std::vector<std::vector<MentionId>> members(ids.size());
    std::vector<bool> alive(ids.size(), true);
    for (std::size_t i = 0; i < ids.size(); ++i)
        members[i] = {ids[i]};
    for (const Merge &m : merges) {
        if (m.score < threshold)
            break;
        if (m.lower >= ids.size() || m.upper >= ids.size() || !alive[m.lower] || !alive[m.upper] ||
            m.lower == m.upper)
            throw ContractError("merge refers to an inactive cluster");
        auto &into = members[m.lower];
        into.insert(into.end(), members[m.upper].begin(), members[m.upper].end());
        members[m.upper].clear();
        alive[m.upper] = false;
    }
    std::vector<std::vector<MentionId>> clusters;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (alive[i])
            clusters.push_back(std::move(members[i]));
    return canonical_partition(std::move(clusters));
}

Clustering agglomerate(const ScoreMatrix &scores, const ClusteringConfig &config) {
    check_threshold(config.threshold);
    auto merges = Agglomerator(scores, config.workers).run(config.threshold);
    Clustering out;
    out.partition = cut_trajectory(scores.ids(), merges, config.threshold);
    out.provenance.method = "agglomerative-average";
    out.provenance.threshold = config.threshold;
    log::debug("agglomerate_done", {{"mentions", scores.size()},
                                    {"merges", merges.size()},
                                    {"clusters", out.partition.size()}});
    return out;
}

Clustering lemma_baseline(const std::vector<pipeline::Mention> &mentions, const stats::LemmaResource &lemmas,
                          const stats::HeadFinder &head) {
    std::map<std::string, std::vector<MentionId>> groups;
    for (const auto &m : mentions)
        groups[stats::head_lemma(m, lemmas, head)].push_back(m.mention_id);
    std::vector<std::vector<MentionId>> clusters;
    for (auto &[lemma, ids] : groups)
        clusters.push_back(std::move(ids));
    Clustering out;
    out.partition = canonical_partition(std::move(clusters));
    out.provenance.method = "lemma-baseline";
    return out;
}

std::vector<double> default_threshold_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i)
        grid.push_back(i / 20.0);
    return grid;
}

TuningResult tune_threshold(const metrics::Partition &dev_key, const ScoreMatrix &dev_scores,
                            const std::vector<double> &grid, unsigned workers) {
    if (grid.empty())
        throw ContractError("threshold grid is empty");
    for (double t : grid)
        check_threshold(t);
    if (dev_key.universe() != dev_scores.ids())
        throw InputError("dev key and dev scores cover different mentions (" +
                         std::to_string(dev_key.mention_count()) + " vs " + std::to_string(dev_scores.size()) + ")");
    const auto merges = merge_trajectory(dev_scores, workers);
    TuningResult result;
    double best_f1 = -1.0;
    for (double t : grid) {
        const double f1 = metrics::evaluate(dev_key, cut_trajectory(dev_scores.ids(), merges, t)).conll_f1;
        result.curve.emplace_back(t, f1);
        if (f1 > best_f1 || (f1 == best_f1 && t < result.threshold)) {
            best_f1 = f1;
            result.threshold = t;
        }
    }
    log::info("threshold_tuned", {{"threshold", result.threshold}, {"conll_f1", best_f1}});
    return result;
}

DocPartition load_doc_partition(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path.string());
    DocPartition groups;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        const auto tab = line.find('\t');
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
            line.find('\t', tab + 1) != std::string::npos)
            throw InputError(where + ": expected 'document<TAB>group'");
        std::string doc = line.substr(0, tab), group = line.substr(tab + 1);
        auto [it, inserted] = groups.emplace(doc, group);
        if (!inserted && it->second != group)
            throw InputError(where + ": document '" + doc + "' is already in group '" + it->second + "'");
    }
    return groups;
}

Clustering partition_restricted_clustering(const ScoreMatrix &scores, const ClusteringConfig &config,
                                           const std::map<MentionId, std::string> &mention_documents,
                                           const DocPartition &doc_partition) {
    check_threshold(config.threshold);
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const MentionId id = scores.ids()[i];
        auto doc = mention_documents.find(id);
        if (doc == mention_documents.end())
            throw InputError("mention " + std::to_string(id) + " has no document");
        auto group = doc_partition.find(doc->second);
        if (group == doc_partition.end())
            throw InputError("document '" + doc->second + "' of mention " + std::to_string(id) +
                             " is missing from the document partition");
        members[group->second].push_back(i);
    }
    std::vector<std::vector<MentionId>> clusters;
    for (const auto &[group, indices] : members) {
        auto part = agglomerate(scores.subset(indices), config).partition;
        clusters.insert(clusters.end(), part.clusters().begin(), part.clusters().end());
    }
    Clustering out;
    out.partition = canonical_partition(std::move(clusters));
    out.provenance.method = "agglomerative-average";
    out.provenance.threshold = config.threshold;
    out.provenance.doc_groups = members.size();
    return out;
}

} // namespace wec::resolver
