#pragma once

#include <cstddef>
#include <vector>

namespace wec::metrics {

struct Assignment {
    double total = 0.0;
    /// row_to_col[i] is the column matched to row i, or -1 when row i is
    /// left unmatched (only when there are more rows than columns).
    std::vector<long> row_to_col;
};

/// Maximum-weight one-to-one assignment over a rows x cols matrix (either
/// side may be larger). Hungarian method with potentials, O(n^2 m) for
/// n = min(rows, cols). Equal-weight alternatives resolve the same way on
/// every run.
Assignment max_weight_assignment(const std::vector<std::vector<double>> &weights);

} // namespace wec::metrics
