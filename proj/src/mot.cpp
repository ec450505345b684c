#include "mot/mot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace mot {

namespace {

constexpr std::int64_t kMaxVariables = 4'000'000;
constexpr double kCouplingEps = 1e-12;

std::int64_t grid_size(const std::vector<DiscreteMeasure>& marginals) {
    std::int64_t total = 1;
    for (const auto& m : marginals) {
        total *= static_cast<std::int64_t>(m.size());
        if (total > kMaxVariables) {
            throw std::invalid_argument(
                "MOT grid exceeds " + std::to_string(kMaxVariables) +
                " variables; coarsen the marginals");
        }
    }
    return total;
}

bool advance(std::vector<int>& idx, const std::vector<int>& shape) {
    for (int d = static_cast<int>(idx.size()) - 1; d >= 0; --d) {
        if (++idx[static_cast<std::size_t>(d)] < shape[static_cast<std::size_t>(d)]) return true;
        idx[static_cast<std::size_t>(d)] = 0;
    }
    return false;
}

void check_problem(const MotProblem& p) {
    const std::size_t n = p.marginals.size();
    if (n < 2) throw std::invalid_argument("MOT problem needs at least two marginals");
    if (p.payoff.arity != n) throw std::invalid_argument("payoff arity != number of marginals");
    for (int c : p.payoff.reads) {
        if (c < 0 || static_cast<std::size_t>(c) >= n) {
            throw std::invalid_argument("payoff reads a coordinate out of range");
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!convex_order_leq(p.marginals[i], p.marginals[i + 1], 1e-8)) {
            throw std::invalid_argument("marginals are not increasing in convex order (pair " +
                                        std::to_string(i) + "," + std::to_string(i + 1) + ")");
        }
    }
}

struct RowLayout {
    // marginal block i covers atoms 0..m_i-1, with the final row dropped for
    // every block beyond the first
    std::vector<int> marginal_offset;
    std::vector<int> marginal_rows;
    // martingale block j has one row per history tuple over marginals 0..j
    std::vector<int> martingale_offset;
    std::vector<std::int64_t> history_count;
    int total = 0;
};

RowLayout layout_rows(const std::vector<DiscreteMeasure>& marginals) {
    const std::size_t n = marginals.size();
    RowLayout lay;
    int row = 0;
    for (std::size_t i = 0; i < n; ++i) {
        lay.marginal_offset.push_back(row);
        const int rows = static_cast<int>(marginals[i].size()) - (i == 0 ? 0 : 1);
        lay.marginal_rows.push_back(rows);
        row += rows;
    }
    std::int64_t hist = 1;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        hist *= static_cast<std::int64_t>(marginals[j].size());
        lay.martingale_offset.push_back(row);
        lay.history_count.push_back(hist);
        row += static_cast<int>(hist);
    }
    lay.total = row;
    return lay;
}

}  // namespace

LinearProgram build_lp(const MotProblem& p) {
    check_problem(p);
    const std::size_t n = p.marginals.size();
    const std::int64_t nvars = grid_size(p.marginals);
    const RowLayout lay = layout_rows(p.marginals);

    std::vector<int> shape;
    for (const auto& m : p.marginals) shape.push_back(static_cast<int>(m.size()));

    LinearProgram lp;
    lp.sense = p.sense;
    lp.cost.reserve(static_cast<std::size_t>(nvars));
    lp.lower.assign(static_cast<std::size_t>(nvars), 0.0);
    lp.upper.assign(static_cast<std::size_t>(nvars), kInfinity);
    lp.entries.reserve(static_cast<std::size_t>(nvars) * (2 * n - 1));

    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < lay.marginal_rows[i]; ++k) {
            lp.add_row(Relation::equal, p.marginals[i].weights[static_cast<std::size_t>(k)]);
        }
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        for (std::int64_t h = 0; h < lay.history_count[j]; ++h) lp.add_row(Relation::equal, 0.0);
    }

    std::vector<int> idx(n, 0);
    std::vector<double> x(n, 0.0);
    int col = 0;
    do {
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = p.marginals[i].atoms[static_cast<std::size_t>(idx[i])];
        }
        lp.cost.push_back(p.payoff.eval(x));
        std::int64_t hist = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (idx[i] < lay.marginal_rows[i]) {
                lp.add_entry(lay.marginal_offset[i] + idx[i], col, 1.0);
            }
            if (i + 1 < n) {
                hist = hist * shape[i] + idx[i];
                const double dx = p.marginals[i + 1].atoms[static_cast<std::size_t>(idx[i + 1])] -
                                  p.marginals[i].atoms[static_cast<std::size_t>(idx[i])];
                if (dx != 0.0) {
                    lp.add_entry(lay.martingale_offset[i] + static_cast<int>(hist), col, dx);
                }
            }
        }
        ++col;
    } while (advance(idx, shape));

    return lp;
}

MotSolution solve_mot(const MotProblem& p, const SolveOptions& opts) {
    const LinearProgram lp = build_lp(p);
    const LpSolution lps = solve(lp, opts);
    if (lps.status == LpStatus::infeasible) {
        throw std::runtime_error(
            "MOT LP infeasible: no martingale coupling matches the marginals numerically");
    }
    if (lps.status == LpStatus::unbounded) {
        throw std::runtime_error("MOT LP unbounded; the payoff cache is corrupt");
    }

    const std::size_t n = p.marginals.size();
    const RowLayout lay = layout_rows(p.marginals);

    MotSolution sol;
    sol.objective = lps.objective;
    sol.lp_iterations = lps.iterations;
    for (const auto& m : p.marginals) sol.shape.push_back(static_cast<int>(m.size()));

    // Certificate: marginal-row duals become the static legs, martingale-row
    // duals the trading positions. Dropped redundant rows report 0.
    sol.dual.sense = p.sense;
    sol.dual.u.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sol.dual.u[i].assign(p.marginals[i].size(), 0.0);
        for (int k = 0; k < lay.marginal_rows[i]; ++k) {
            sol.dual.u[i][static_cast<std::size_t>(k)] =
                lps.dual[static_cast<std::size_t>(lay.marginal_offset[i] + k)];
        }
    }
    sol.dual.delta.resize(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        sol.dual.delta[j].assign(static_cast<std::size_t>(lay.history_count[j]), 0.0);
        for (std::int64_t h = 0; h < lay.history_count[j]; ++h) {
            sol.dual.delta[j][static_cast<std::size_t>(h)] =
                lps.dual[static_cast<std::size_t>(lay.martingale_offset[j] + h)];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < p.marginals[i].size(); ++k) {
            sol.certificate_value += sol.dual.u[i][k] * p.marginals[i].weights[k];
        }
    }
    sol.duality_gap = std::abs(sol.certificate_value - sol.objective);

    // Sparse coupling plus feasibility and certificate diagnostics in one
    // sweep over the grid.
    std::vector<std::vector<double>> marg_mass(n);
    for (std::size_t i = 0; i < n; ++i) marg_mass[i].assign(p.marginals[i].size(), 0.0);
    std::vector<std::vector<double>> mart_resid(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        mart_resid[j].assign(static_cast<std::size_t>(lay.history_count[j]), 0.0);
    }

    std::vector<int> idx(n, 0);
    std::vector<double> x(n, 0.0);
    const std::vector<int>& shape = sol.shape;
    const double subhedge_sign = p.sense == Sense::minimize ? 1.0 : -1.0;
    double obj_sum = 0.0;
    double worst_subhedge = 0.0;
    std::int64_t col = 0;
    do {
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = p.marginals[i].atoms[static_cast<std::size_t>(idx[i])];
        }
        const double q = lps.primal[static_cast<std::size_t>(col)];
        const double c = lp.cost[static_cast<std::size_t>(col)];
        obj_sum += q * c;

        double hedge = 0.0;
        std::int64_t hist = 0;
        for (std::size_t i = 0; i < n; ++i) {
            hedge += sol.dual.u[i][static_cast<std::size_t>(idx[i])];
            marg_mass[i][static_cast<std::size_t>(idx[i])] += q;
            if (i + 1 < n) {
                hist = hist * sol.shape[i] + idx[i];
                const double dx = x[i + 1] - x[i];
                hedge += sol.dual.delta[i][static_cast<std::size_t>(hist)] * dx;
                mart_resid[i][static_cast<std::size_t>(hist)] += q * dx;
            }
        }
        worst_subhedge = std::max(worst_subhedge, subhedge_sign * (hedge - c));
        if (q > kCouplingEps) {
            CouplingEntry e;
            e.index = idx;
            e.probability = q;
            sol.coupling.push_back(std::move(e));
        }
        ++col;
    } while (advance(idx, shape));

    sol.objective_residual = std::abs(sol.objective - obj_sum);
    sol.max_subhedge_violation = worst_subhedge;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < p.marginals[i].size(); ++k) {
            sol.max_marginal_residual = std::max(
                sol.max_marginal_residual, std::abs(marg_mass[i][k] - p.marginals[i].weights[k]));
        }
    }
    for (const auto& block : mart_resid) {
        for (double r : block) {
            sol.max_martingale_residual = std::max(sol.max_martingale_residual, std::abs(r));
        }
    }
    return sol;
}

std::vector<CouplingEntry> project_coupling(const MotSolution& sol, const std::vector<int>& coords) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] < 0 || coords[i] >= static_cast<int>(sol.shape.size())) {
            throw std::invalid_argument("projection coordinate out of range");
        }
        if (i > 0 && coords[i] <= coords[i - 1]) {
            throw std::invalid_argument("projection coordinates must be strictly increasing");
        }
    }
    std::map<std::vector<int>, double> acc;
    std::vector<int> key(coords.size());
    for (const auto& e : sol.coupling) {
        for (std::size_t i = 0; i < coords.size(); ++i) {
            key[i] = e.index[static_cast<std::size_t>(coords[i])];
        }
        acc[key] += e.probability;
    }
    std::vector<CouplingEntry> out;
    out.reserve(acc.size());
    for (const auto& [k, v] : acc) out.push_back({k, v});
    return out;
}

}  // namespace mot
