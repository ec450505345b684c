#pragma once

#include <cstdint>
#include <vector>

#include "mot/lp.hpp"
#include "mot/measure.hpp"
#include "mot/payoff.hpp"

namespace mot {

/// Discrete martingale-transport problem: optimize E_Q[payoff] over all
/// couplings of the given marginals whose coordinate process is a
/// martingale. Marginals must increase in convex order.
struct MotProblem {
    std::vector<DiscreteMeasure> marginals;
    Payoff payoff;
    Sense sense = Sense::minimize;
};

/// Semi-static hedging certificate read off the LP duals.
///
/// u[i][k] is the static payoff at atom k of marginal i; delta[j][h] is the
/// position in the underlying held between dates j and j+1 given history h,
/// where h indexes tuples over the first j+1 marginals in row-major order
/// (last coordinate fastest). For a minimization the certificate sub-hedges
/// (sum u + trading gains <= payoff on the grid); for a maximization it
/// super-hedges. Values for rows dropped as redundant are reported as 0;
/// certificates are defined only up to constant shifts between the u_i.
struct DualCertificate {
    std::vector<std::vector<double>> u;
    std::vector<std::vector<double>> delta;
    Sense sense = Sense::minimize;
};

struct CouplingEntry {
    std::vector<int> index;  // one atom index per marginal
    double probability = 0.0;
};

struct MotSolution {
    double objective = 0.0;
    std::vector<int> shape;  // atom count per marginal
    std::vector<CouplingEntry> coupling;  // sorted by row-major linear index
    DualCertificate dual;
    double certificate_value = 0.0;  // sum_i E_{mu_i}[u_i]

    std::int64_t lp_iterations = 0;
    double duality_gap = 0.0;              // |certificate_value - objective|
    double max_marginal_residual = 0.0;    // coupling marginals vs inputs
    double max_martingale_residual = 0.0;  // per history node
    double objective_residual = 0.0;       // |objective - sum q*c|
    double max_subhedge_violation = 0.0;   // certificate inequality over the grid
};

/// Assembles the transport LP: one nonnegative variable per atom tuple,
/// equality rows for every marginal (one redundant row dropped per block
/// beyond the first) and one martingale row per history node. Variables are
/// indexed row-major over atom-index tuples, last coordinate fastest, which
/// makes couplings byte-stable across runs.
LinearProgram build_lp(const MotProblem& p);

MotSolution solve_mot(const MotProblem& p, const SolveOptions& opts = {});

/// Marginalizes the coupling onto a subset of coordinates (ascending,
/// 0-based). Probabilities of dropped coordinates are summed.
std::vector<CouplingEntry> project_coupling(const MotSolution& sol,
                                            const std::vector<int>& coords);

}  // namespace mot
