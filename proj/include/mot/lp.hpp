#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mot {

enum class Sense { minimize, maximize };
enum class Relation { less_equal, equal, greater_equal };
enum class LpStatus { optimal, infeasible, unbounded };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct LpEntry {
    int row;
    int col;
    double value;
};

/// General-form linear program
///   min/max c'x  s.t.  A x {<=,=,>=} b,  lower <= x <= upper
/// held as sparse triplets. Duplicate entries are summed by the solver.
struct LinearProgram {
    Sense sense = Sense::minimize;
    std::vector<double> cost;
    std::vector<LpEntry> entries;
    std::vector<Relation> relations;
    std::vector<double> rhs;
    std::vector<double> lower;  // default 0
    std::vector<double> upper;  // default +inf

    int add_variable(double cost_coeff, double lower_bound = 0.0,
                     double upper_bound = kInfinity);
    int add_row(Relation rel, double rhs_value);
    void add_entry(int row, int col, double value);

    int num_vars() const { return static_cast<int>(cost.size()); }
    int num_rows() const { return static_cast<int>(rhs.size()); }
};

struct SolveOptions {
    double feas_tol = 1e-9;
    /// Duality-gap tolerance is gap_tol_rel * (1 + |objective|).
    double gap_tol_rel = 1e-8;
    /// 0 means choose automatically from the problem size.
    std::int64_t max_iterations = 0;
    /// Basis refactorization interval (pivots).
    int refactor_every = 1000;
};

/// Primal-dual result. Duals are reported per original row with the sign
/// convention  c - A'y >= 0  at a minimum and  c - A'y <= 0  at a maximum,
/// so for equality-constrained problems y is directly a (sub/super-)hedging
/// certificate. Dual values for maximize problems are negated accordingly.
struct LpSolution {
    LpStatus status = LpStatus::optimal;
    double objective = 0.0;
    std::vector<double> primal;
    std::vector<double> dual;
    std::vector<double> reduced_cost;  // c - A'y
    std::int64_t iterations = 0;
    double max_primal_residual = 0.0;
    double duality_gap = 0.0;
    double complementarity = 0.0;
};

/// Thrown when the pivot budget is exhausted before reaching optimality.
class SolverStalled : public std::runtime_error {
public:
    SolverStalled(const std::string& what, std::int64_t iterations, int phase)
        : std::runtime_error(what), iterations(iterations), phase(phase) {}
    std::int64_t iterations = 0;
    int phase = 0;
};

/// Two-phase primal revised simplex: devex pricing, an expanding Harris
/// ratio test against degenerate cycling, Bland's rule as a fallback under
/// long stalls, and rank-checked refactorization with basis repair.
/// Deterministic: identical programs produce the identical pivot sequence
/// and solution.
LpSolution solve(const LinearProgram& lp, const SolveOptions& opts = {});

/// Fixed-format MPS export with deterministic row/column names, for
/// cross-checks against external solvers.
void write_mps(const LinearProgram& lp, std::ostream& os,
               const std::string& name = "MOTLP");

}  // namespace mot
