#include "wec/metrics/assignment.h"

#include <limits>

#include "wec/util/error.h"

namespace wec::metrics {

namespace {

/// Minimum-cost assignment of every row (n <= m) to a distinct column.
/// Rows and columns are 1-based inside, as in the usual potential method.
std::vector<long> min_cost_rows(const std::vector<std::vector<double>> &cost, std::size_t n, std::size_t m) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j])
                    continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<long> row_to_col(n, -1);
    for (std::size_t j = 1; j <= m; ++j)
        if (p[j] != 0)
            row_to_col[p[j] - 1] = static_cast<long>(j - 1);
    return row_to_col;
}

} // namespace

Assignment max_weight_assignment(const std::vector<std::vector<double>> &weights) {
    Assignment out;
    const std::size_t rows = weights.size();
    if (rows == 0)
        return out;
    const std::size_t cols = weights[0].size();
    for (const auto &row : weights)
        if (row.size() != cols)
            throw ContractError("assignment matrix rows differ in length");
    out.row_to_col.assign(rows, -1);
    if (cols == 0)
        return out;

    // Solve with the smaller side as rows; costs are negated weights.
    const bool transpose = rows > cols;
    const std::size_t n = transpose ? cols : rows, m = transpose ? rows : cols;
    std::vector<std::vector<double>> cost(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            cost[i][j] = -(transpose ? weights[j][i] : weights[i][j]);
    const auto matched = min_cost_rows(cost, n, m);
    for (std::size_t i = 0; i < n; ++i) {
        if (transpose)
            out.row_to_col[matched[i]] = static_cast<long>(i);
        else
            out.row_to_col[i] = matched[i];
    }
    for (std::size_t i = 0; i < rows; ++i)
        if (out.row_to_col[i] >= 0)
            out.total += weights[i][out.row_to_col[i]];
    return out;
}

} // namespace wec::metrics
