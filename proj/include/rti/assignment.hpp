#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "rti/common.hpp"

namespace rti {

// Infeasible entries in a cost matrix are +inf. Internally they are mapped
// to a finite sentinel far above any realistic cost (distances in meters,
// cutoff powers), which makes the optimal solver prefer any set of real
// pairings over leaving one open.
constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct Assignment {
    std::vector<std::pair<int, int>> pairs;  // (row, col), both 0-based
    std::vector<int> unassigned_rows;
    std::vector<int> unassigned_cols;
    double total_cost = 0.0;  // sum over assigned pairs
};

// Optimal one-to-one assignment: maximizes the number of feasible pairings,
// and among those minimizes the total cost (Hungarian method with potentials,
// O(n^2 m)). Deterministic for a given matrix; ties resolve toward lower
// column indices.
Assignment assign_gnn(const MatX& cost);

// Greedy suboptimal assignment: repeatedly commits the globally smallest
// feasible entry and discards its row and column. Ties resolve
// lexicographically by (cost, row, col).
Assignment assign_snn(const MatX& cost);

}  // namespace rti
