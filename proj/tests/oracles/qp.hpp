#pragma once

#include <cstddef>
#include <vector>

namespace oracle {

/// Biasless soft-margin dual: maximise sum(pi) - 0.5 pi' Q pi over 0 <= pi <= D,
/// with Q[i][j] = b_i b_j K[i][j] (row-major, m x m).
struct DualProblem {
    std::size_t m = 0;
    std::vector<double> q;
    double penalty = 1.0;

    [[nodiscard]] double objective(const std::vector<double> &pi) const;
};

struct DualSolution {
    std::vector<double> pi;
    double objective = 0.0;
};

/// Exhaustive search over the lattice {0, D/steps, ..., D}^m. Practical for m <= 4.
[[nodiscard]] DualSolution grid_search(const DualProblem &p, int steps = 50);

/// Enumerates every (at 0, at D, free) assignment, solves the free block exactly and keeps the
/// best point satisfying the KKT conditions. Exact up to round-off; 3^m linear solves.
[[nodiscard]] DualSolution active_set_search(const DualProblem &p);

/// Worst-case objective gap between the lattice optimum and the true optimum.
[[nodiscard]] double grid_gap_bound(const DualProblem &p, int steps = 50);

}  // namespace oracle
