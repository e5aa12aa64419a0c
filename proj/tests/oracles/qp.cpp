#include "qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

double DualProblem::objective(const std::vector<double> &pi) const {
    double linear = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        linear += pi[i];
        for (std::size_t j = 0; j < m; ++j) {
            quad += pi[i] * pi[j] * q[i * m + j];
        }
    }
    return linear - 0.5 * quad;
}

namespace {

// Depth-first over coordinates; partial objective updated incrementally.
void grid_rec(const DualProblem &p, int steps, std::size_t k, std::vector<double> &pi, double partial, DualSolution &best) {
    if (k == p.m) {
        if (partial > best.objective) {
            best.objective = partial;
            best.pi = pi;
        }
        return;
    }
    double cross = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        cross += p.q[i * p.m + k] * pi[i];
    }
    for (int s = 0; s <= steps; ++s) {
        const double v = p.penalty * static_cast<double>(s) / static_cast<double>(steps);
        pi[k] = v;
        const double add = v - 0.5 * p.q[k * p.m + k] * v * v - v * cross;
        grid_rec(p, steps, k + 1, pi, partial + add, best);
    }
    pi[k] = 0.0;
}

}  // namespace

DualSolution grid_search(const DualProblem &p, int steps) {
    if (p.m == 0 || p.q.size() != p.m * p.m) {
        throw std::invalid_argument("bad dual problem");
    }
    DualSolution best;
    best.objective = -std::numeric_limits<double>::infinity();
    std::vector<double> pi(p.m, 0.0);
    grid_rec(p, steps, 0, pi, 0.0, best);
    return best;
}

DualSolution active_set_search(const DualProblem &p) {
    const std::size_t m = p.m;
    if (m == 0 || p.q.size() != m * m || m > 12) {
        throw std::invalid_argument("bad dual problem");
    }
    Eigen::MatrixXd q(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            q(i, j) = p.q[i * m + j];
        }
    }
    const double d = p.penalty;
    const double tol = 1e-9 * std::max(1.0, d);

    DualSolution best;
    best.objective = -std::numeric_limits<double>::infinity();
    std::size_t combos = 1;
    for (std::size_t i = 0; i < m; ++i) {
        combos *= 3;
    }
    std::vector<int> state(m);
    for (std::size_t code = 0; code < combos; ++code) {
        std::size_t c = code;
        std::vector<Eigen::Index> free;
        Eigen::VectorXd pi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) {
            state[i] = static_cast<int>(c % 3);  // 0 lower bound, 1 upper bound, 2 free
            c /= 3;
            if (state[i] == 1) {
                pi(static_cast<Eigen::Index>(i)) = d;
            } else if (state[i] == 2) {
                free.push_back(static_cast<Eigen::Index>(i));
            }
        }
        if (!free.empty()) {
            const auto nf = static_cast<Eigen::Index>(free.size());
            Eigen::MatrixXd qff(nf, nf);
            Eigen::VectorXd rhs(nf);
            for (Eigen::Index a = 0; a < nf; ++a) {
                double fixed = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    if (state[j] == 1) {
                        fixed += q(free[a], static_cast<Eigen::Index>(j)) * d;
                    }
                }
                rhs(a) = 1.0 - fixed;
                for (Eigen::Index b = 0; b < nf; ++b) {
                    qff(a, b) = q(free[a], free[b]);
                }
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(qff);
            lu.setThreshold(1e-10);
            if (lu.rank() != nf) {
                continue;
            }
            const Eigen::VectorXd sol = lu.solve(rhs);
            bool inside = true;
            for (Eigen::Index a = 0; a < nf; ++a) {
                inside = inside && sol(a) >= -tol && sol(a) <= d + tol;
                pi(free[a]) = std::clamp(sol(a), 0.0, d);
            }
            if (!inside) {
                continue;
            }
        }
        const Eigen::VectorXd grad = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m)) - q * pi;
        bool kkt = true;
        for (std::size_t i = 0; i < m; ++i) {
            const double g = grad(static_cast<Eigen::Index>(i));
            if (state[i] == 0) {
                kkt = kkt && g <= 1e-7;
            } else if (state[i] == 1) {
                kkt = kkt && g >= -1e-7;
            }
        }
        if (!kkt) {
            continue;
        }
        std::vector<double> v(pi.data(), pi.data() + m);
        const double obj = p.objective(v);
        if (obj > best.objective) {
            best.objective = obj;
            best.pi = std::move(v);
        }
    }
    if (best.pi.empty()) {
        throw std::runtime_error("no KKT point found");
    }
    return best;
}

double grid_gap_bound(const DualProblem &p, int steps) {
    double qmax = 0.0;
    for (const double v : p.q) {
        qmax = std::max(qmax, std::abs(v));
    }
    const double h = p.penalty / static_cast<double>(steps);
    const double mm = static_cast<double>(p.m);
    const double grad = 1.0 + mm * qmax * p.penalty;
    return mm * (h / 2.0) * grad + 0.5 * mm * mm * qmax * (h / 2.0) * (h / 2.0);
}

}  // namespace oracle
