#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "wec/metrics/metrics.h"

namespace wec::resolver {

using metrics::MentionId;

inline constexpr double kDefaultPairScore = 0.0;

/// Symmetric pairwise scores over a mention universe, stored as a packed
/// upper triangle. Mentions are kept in ascending id order, so index order
/// and id order agree.
class ScoreMatrix {
public:
    ScoreMatrix() = default;
    /// All pairs start at `default_score`. Throws InputError on repeated ids.
    explicit ScoreMatrix(std::vector<MentionId> ids, double default_score = kDefaultPairScore);

    /// Builds from a dense square matrix whose rows follow `ids`. Throws
    /// InputError when it is not square, symmetric (to 1e-9) and finite in
    /// [0, 1] off the diagonal.
    static ScoreMatrix from_dense(const std::vector<MentionId> &ids, const std::vector<std::vector<double>> &dense);

    /// Reads `#mentions id id ...` header lines followed by `id_a id_b score`
    /// triples. Pairs may appear in both orders if they agree to 1e-9;
    /// absent pairs take `default_score`.
    static ScoreMatrix load(const std::filesystem::path &path, double default_score = kDefaultPairScore);
    void save(const std::filesystem::path &path) const;

    std::size_t size() const { return ids_.size(); }
    const std::vector<MentionId> &ids() const { return ids_; }
    /// Index of a mention id; throws InputError when absent.
    std::size_t index_of(MentionId id) const;

    double at(std::size_t i, std::size_t j) const { return values_[offset(i, j)]; }
    void set(std::size_t i, std::size_t j, double score);

    /// Restriction to a subset of indices (ascending).
    ScoreMatrix subset(const std::vector<std::size_t> &indices) const;

    double min_score() const;
    double max_score() const;

private:
    std::size_t offset(std::size_t i, std::size_t j) const {
        if (i > j)
            std::swap(i, j);
        // Row i of the strict upper triangle starts after i rows of
        // decreasing length.
        return i * (2 * ids_.size() - i - 1) / 2 + (j - i - 1);
    }

    std::vector<MentionId> ids_;
    std::vector<double> values_;
};

} // namespace wec::resolver
