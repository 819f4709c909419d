#include "rti/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace rti {

namespace {

constexpr double kBig = 1e9;

// Classic potentials formulation; requires rows <= cols. Returns, for each
// row, the matched column. Every row ends up matched, possibly through a
// sentinel entry that the caller filters out.
std::vector<int> hungarian_rows_le_cols(const MatX& a) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(a.cols());
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1, 0.0);
    std::vector<int> match(m + 1, 0), way(m + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), std::numeric_limits<double>::max());
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = std::numeric_limits<double>::max();
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

MatX sanitize(const MatX& cost) {
    MatX a = cost;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const double c = a(i, j);
            if (std::isnan(c)) throw std::invalid_argument("NaN cost entry");
            if (std::isinf(c)) {
                a(i, j) = kBig;
            } else if (std::abs(c) >= kBig / 4) {
                throw std::invalid_argument("finite cost too large for sentinel");
            }
        }
    return a;
}

void finalize(const MatX& cost, std::vector<char>& row_used,
              std::vector<char>& col_used, Assignment& out) {
    for (int i = 0; i < cost.rows(); ++i)
        if (!row_used[i]) out.unassigned_rows.push_back(i);
    for (int j = 0; j < cost.cols(); ++j)
        if (!col_used[j]) out.unassigned_cols.push_back(j);
}

}  // namespace

Assignment assign_gnn(const MatX& cost) {
    Assignment out;
    const int rows = static_cast<int>(cost.rows());
    const int cols = static_cast<int>(cost.cols());
    if (rows == 0 || cols == 0) {
        for (int i = 0; i < rows; ++i) out.unassigned_rows.push_back(i);
        for (int j = 0; j < cols; ++j) out.unassigned_cols.push_back(j);
        return out;
    }

    MatX a = sanitize(cost);
    std::vector<int> row_to_col;
    if (rows <= cols) {
        row_to_col = hungarian_rows_le_cols(a);
    } else {
        const std::vector<int> col_to_row = hungarian_rows_le_cols(a.transpose());
        row_to_col.assign(rows, -1);
        for (int j = 0; j < cols; ++j)
            if (col_to_row[j] >= 0) row_to_col[col_to_row[j]] = j;
    }

    std::vector<char> row_used(rows, 0), col_used(cols, 0);
    for (int i = 0; i < rows; ++i) {
        const int j = row_to_col[i];
        if (j < 0 || a(i, j) >= kBig / 2) continue;  // sentinel: effectively open
        out.pairs.emplace_back(i, j);
        out.total_cost += cost(i, j);
        row_used[i] = 1;
        col_used[j] = 1;
    }
    finalize(cost, row_used, col_used, out);
    return out;
}

Assignment assign_snn(const MatX& cost) {
    Assignment out;
    const int rows = static_cast<int>(cost.rows());
    const int cols = static_cast<int>(cost.cols());

    std::vector<std::tuple<double, int, int>> entries;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double c = cost(i, j);
            if (std::isnan(c)) throw std::invalid_argument("NaN cost entry");
            if (std::isfinite(c)) entries.emplace_back(c, i, j);
        }
    std::sort(entries.begin(), entries.end());

    std::vector<char> row_used(rows, 0), col_used(cols, 0);
    for (const auto& [c, i, j] : entries) {
        if (row_used[i] || col_used[j]) continue;
        out.pairs.emplace_back(i, j);
        out.total_cost += c;
        row_used[i] = 1;
        col_used[j] = 1;
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    finalize(cost, row_used, col_used, out);
    return out;
}

}  // namespace rti
