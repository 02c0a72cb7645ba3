#include "wec/metrics/metrics.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "wec/metrics/assignment.h"
#include "wec/util/error.h"

namespace wec::metrics {

Partition::Partition(std::vector<std::vector<MentionId>> clusters) : clusters_(std::move(clusters)) {
    std::set<MentionId> seen;
    for (const auto &c : clusters_) {
        if (c.empty())
            throw InputError("partition contains an empty cluster");
        for (MentionId id : c)
            if (!seen.insert(id).second)
                throw InputError("mention " + std::to_string(id) + " appears in more than one cluster");
    }
}

std::size_t Partition::mention_count() const {
    std::size_t n = 0;
    for (const auto &c : clusters_)
        n += c.size();
    return n;
}

std::vector<MentionId> Partition::universe() const {
    std::vector<MentionId> ids;
    for (const auto &c : clusters_)
        ids.insert(ids.end(), c.begin(), c.end());
    std::sort(ids.begin(), ids.end());
    return ids;
}

double f1_score(double recall, double precision) {
    return recall + precision > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

namespace {

std::unordered_map<MentionId, std::size_t> cluster_index(const Partition &p) {
    std::unordered_map<MentionId, std::size_t> index;
    for (std::size_t c = 0; c < p.size(); ++c)
        for (MentionId id : p.clusters()[c])
            index[id] = c;
    return index;
}

/// Link-based MUC score of `a` against `b`: sum over clusters of a of
/// (|c| - number of b-parts of c) / sum of (|c| - 1). Mentions of c that b
/// does not cover count as parts of their own.
std::pair<double, bool> muc_side(const Partition &a, const Partition &b) {
    const auto in_b = cluster_index(b);
    std::size_t numerator = 0, denominator = 0;
    for (const auto &c : a.clusters()) {
        std::set<std::size_t> parts;
        std::size_t uncovered = 0;
        for (MentionId id : c) {
            auto it = in_b.find(id);
            if (it == in_b.end())
                ++uncovered;
            else
                parts.insert(it->second);
        }
        numerator += c.size() - (parts.size() + uncovered);
        denominator += c.size() - 1;
    }
    if (denominator == 0)
        return {0.0, true};
    return {static_cast<double>(numerator) / static_cast<double>(denominator), false};
}

/// Mean over mentions of a of |A(m) & B(m)| / |A(m)|.
std::pair<double, bool> b_cubed_side(const Partition &a, const Partition &b) {
    const auto in_b = cluster_index(b);
    double total = 0.0;
    std::size_t mentions = 0;
    for (const auto &c : a.clusters()) {
        std::map<std::size_t, std::size_t> overlap;
        for (MentionId id : c)
            if (auto it = in_b.find(id); it != in_b.end())
                ++overlap[it->second];
        // Each mention of c sharing b-cluster j contributes overlap_j / |c|.
        for (const auto &[j, n] : overlap)
            total += static_cast<double>(n) * static_cast<double>(n) / static_cast<double>(c.size());
        mentions += c.size();
    }
    if (mentions == 0)
        return {0.0, true};
    return {total / static_cast<double>(mentions), false};
}

MetricScore combine(std::pair<double, bool> recall, std::pair<double, bool> precision) {
    MetricScore s;
    s.recall = recall.first;
    s.recall_undefined = recall.second;
    s.precision = precision.first;
    s.precision_undefined = precision.second;
    s.f1 = f1_score(s.recall, s.precision);
    return s;
}

} // namespace

MetricScore muc(const Partition &key, const Partition &response) {
    return combine(muc_side(key, response), muc_side(response, key));
}

MetricScore b_cubed(const Partition &key, const Partition &response) {
    return combine(b_cubed_side(key, response), b_cubed_side(response, key));
}

MetricScore ceaf_e(const Partition &key, const Partition &response) {
    if (key.size() == 0 || response.size() == 0)
        return combine({0.0, key.size() == 0}, {0.0, response.size() == 0});

    // Only clusters that share a mention have positive similarity, so the
    // alignment decomposes into connected components of the overlap graph.
    const auto in_response = cluster_index(response);
    std::vector<std::map<std::size_t, std::size_t>> overlap(key.size());
    for (std::size_t k = 0; k < key.size(); ++k)
        for (MentionId id : key.clusters()[k])
            if (auto it = in_response.find(id); it != in_response.end())
                ++overlap[k][it->second];

    // Union-find over key clusters [0, K) and response clusters [K, K+R).
    const std::size_t K = key.size(), R = response.size();
    std::vector<std::size_t> parent(K + R);
    for (std::size_t i = 0; i < parent.size(); ++i)
        parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t k = 0; k < K; ++k)
        for (const auto &[r, n] : overlap[k])
            parent[find(k)] = find(K + r);

    std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> components;
    for (std::size_t k = 0; k < K; ++k)
        if (!overlap[k].empty())
            components[find(k)].first.push_back(k);
    for (std::size_t r = 0; r < R; ++r)
        components[find(K + r)].second.push_back(r);

    double similarity = 0.0;
    for (const auto &[root, members] : components) {
        const auto &[ks, rs] = members;
        if (ks.empty() || rs.empty())
            continue;
        std::vector<std::vector<double>> phi(ks.size(), std::vector<double>(rs.size(), 0.0));
        std::unordered_map<std::size_t, std::size_t> column;
        for (std::size_t j = 0; j < rs.size(); ++j)
            column[rs[j]] = j;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const double k_size = static_cast<double>(key.clusters()[ks[i]].size());
            for (const auto &[r, n] : overlap[ks[i]]) {
                const double r_size = static_cast<double>(response.clusters()[r].size());
                phi[i][column[r]] = 2.0 * static_cast<double>(n) / (k_size + r_size);
            }
        }
        similarity += max_weight_assignment(phi).total;
    }
    return combine({similarity / static_cast<double>(K), false}, {similarity / static_cast<double>(R), false});
}

double conll_f1(double muc_f1, double b_cubed_f1, double ceaf_e_f1) {
    return (muc_f1 + b_cubed_f1 + ceaf_e_f1) / 3.0;
}

EvalReport conll(const MetricScore &m, const MetricScore &b, const MetricScore &c) {
    return {m, b, c, conll_f1(m.f1, b.f1, c.f1)};
}

EvalReport evaluate(const Partition &key, const Partition &response) {
    const auto ku = key.universe(), ru = response.universe();
    if (ku != ru) {
        std::vector<MentionId> only_key, only_response;
        std::set_difference(ku.begin(), ku.end(), ru.begin(), ru.end(), std::back_inserter(only_key));
        std::set_difference(ru.begin(), ru.end(), ku.begin(), ku.end(), std::back_inserter(only_response));
        std::string msg = "key and response cover different mentions (" + std::to_string(only_key.size()) +
                          " only in key, " + std::to_string(only_response.size()) + " only in response";
        const MentionId example = only_key.empty() ? only_response.front() : only_key.front();
        msg += "; e.g. mention " + std::to_string(example) + ")";
        throw InputError(msg);
    }
    return conll(muc(key, response), b_cubed(key, response), ceaf_e(key, response));
}

std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", fraction * 100.0);
    return buf;
}

nlohmann::json to_json(const MetricScore &s) {
    nlohmann::json j{{"recall", s.recall}, {"precision", s.precision}, {"f1", s.f1}};
    if (s.recall_undefined)
        j["recall_undefined"] = true;
    if (s.precision_undefined)
        j["precision_undefined"] = true;
    return j;
}

nlohmann::json to_json(const EvalReport &r) {
    return {{"muc", to_json(r.muc)},
            {"b_cubed", to_json(r.b_cubed)},
            {"ceaf_e", to_json(r.ceaf_e)},
            {"conll_f1", r.conll_f1}};
}

std::string format_table(const EvalReport &r) {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-8s %7s %7s %7s\n", "Metric", "R", "P", "F1");
    out += line;
    auto row = [&](const char *name, const MetricScore &s) {
        std::snprintf(line, sizeof line, "%-8s %7s %7s %7s\n", name, format_percent(s.recall).c_str(),
                      format_percent(s.precision).c_str(), format_percent(s.f1).c_str());
        out += line;
    };
    row("MUC", r.muc);
    row("B3", r.b_cubed);
    row("CEAF-e", r.ceaf_e);
    std::snprintf(line, sizeof line, "%-8s %7s %7s %7s\n", "CoNLL", "", "", format_percent(r.conll_f1).c_str());
    out += line;
    return out;
}

} // namespace wec::metrics
