#include "wec/resolver/score_matrix.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wec/util/error.h"
#include "wec/util/log.h"

namespace wec::resolver {

namespace {

void check_score(double s, const std::string &where) {
    if (!std::isfinite(s) || s < 0.0 || s > 1.0)
        throw InputError(where + ": score must be finite and within [0, 1]");
}

} // namespace

ScoreMatrix::ScoreMatrix(std::vector<MentionId> ids, double default_score) : ids_(std::move(ids)) {
    check_score(default_score, "default score");
    std::sort(ids_.begin(), ids_.end());
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end())
        throw InputError("mention universe lists an id twice");
    const std::size_t n = ids_.size();
    values_.assign(n < 2 ? 0 : n * (n - 1) / 2, default_score);
}

std::size_t ScoreMatrix::index_of(MentionId id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id)
        throw InputError("mention " + std::to_string(id) + " is not in the score universe");
    return static_cast<std::size_t>(it - ids_.begin());
}

void ScoreMatrix::set(std::size_t i, std::size_t j, double score) {
    if (i == j || i >= size() || j >= size())
        throw ContractError("score index out of range");
    check_score(score, "pair (" + std::to_string(ids_[i]) + ", " + std::to_string(ids_[j]) + ")");
    values_[offset(i, j)] = score;
}

ScoreMatrix ScoreMatrix::from_dense(const std::vector<MentionId> &ids, const std::vector<std::vector<double>> &dense) {
    ScoreMatrix m(ids);
    const std::size_t n = ids.size();
    if (dense.size() != n)
        throw InputError("score matrix has " + std::to_string(dense.size()) + " rows for " + std::to_string(n) +
                         " mentions");
    for (const auto &row : dense)
        if (row.size() != n)
            throw InputError("score matrix is not square");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::string where = "pair (" + std::to_string(ids[i]) + ", " + std::to_string(ids[j]) + ")";
            check_score(dense[i][j], where);
            check_score(dense[j][i], where);
            if (std::abs(dense[i][j] - dense[j][i]) > 1e-9)
                throw InputError(where + ": matrix is not symmetric");
            m.set(m.index_of(ids[i]), m.index_of(ids[j]), dense[i][j]);
        }
    }
    return m;
}

ScoreMatrix ScoreMatrix::load(const std::filesystem::path &path, double default_score) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path.string());
    std::vector<MentionId> ids;
    std::map<std::pair<MentionId, MentionId>, double> pairs;
    std::string line;
    std::size_t line_no = 0;
    bool header_done = false;
    auto where = [&] { return path.string() + ":" + std::to_string(line_no); };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream fields(line);
        if (line.rfind("#mentions", 0) == 0) {
            if (header_done)
                throw InputError(where() + ": #mentions header after score lines");
            std::string tag;
            fields >> tag;
            for (MentionId id; fields >> id;)
                ids.push_back(id);
            if (!fields.eof())
                throw InputError(where() + ": bad mention id in header");
            continue;
        }
        if (line[0] == '#')
            continue;
        header_done = true;
        MentionId a = 0, b = 0;
        double s = 0;
        std::string rest;
        if (!(fields >> a >> b >> s) || (fields >> rest))
            throw InputError(where() + ": expected 'mention_a mention_b score'");
        check_score(s, where());
        if (a == b) {
            log::debug("score_self_pair_ignored", {{"line", line_no}});
            continue;
        }
        auto key = std::minmax(a, b);
        auto [it, inserted] = pairs.emplace(std::make_pair(key.first, key.second), s);
        if (!inserted && std::abs(it->second - s) > 1e-9)
            throw InputError(where() + ": score for (" + std::to_string(a) + ", " + std::to_string(b) +
                             ") contradicts an earlier line");
    }
    if (ids.empty())
        throw InputError(path.string() + ": missing '#mentions' header listing the mention universe");
    ScoreMatrix m;
    try {
        m = ScoreMatrix(ids, default_score);
    } catch (const InputError &e) {
        throw InputError(path.string() + ": " + e.what());
    }
    for (const auto &[key, s] : pairs)
        m.set(m.index_of(key.first), m.index_of(key.second), s);
    return m;
}

void ScoreMatrix::save(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << "#mentions";
    for (MentionId id : ids_)
        out << ' ' << id;
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = i + 1; j < size(); ++j)
            out << ids_[i] << ' ' << ids_[j] << ' ' << at(i, j) << '\n';
    if (!out)
        throw Error("write failed: " + path.string());
}

ScoreMatrix ScoreMatrix::subset(const std::vector<std::size_t> &indices) const {
    std::vector<MentionId> ids;
    for (std::size_t i : indices)
        ids.push_back(ids_[i]);
    ScoreMatrix out(ids);
    for (std::size_t a = 0; a < indices.size(); ++a)
        for (std::size_t b = a + 1; b < indices.size(); ++b)
            out.values_[out.offset(a, b)] = at(indices[a], indices[b]);
    return out;
}

double ScoreMatrix::min_score() const {
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double ScoreMatrix::max_score() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

} // namespace wec::resolver
