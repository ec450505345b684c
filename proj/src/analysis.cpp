#include "mot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <random>
#include <set>
#include <stdexcept>

#include "mot/hedging.hpp"

namespace mot {

namespace {

MotSolution solve_subset(const std::vector<DiscreteMeasure>& marginals,
                         const std::vector<int>& included, const PayoffSpec& payoff,
                         Sense sense, const SolveOptions& opts) {
    MotProblem p;
    for (int i : included) p.marginals.push_back(marginals[static_cast<std::size_t>(i)]);
    p.payoff = bind_payoff(payoff, p.marginals.size());
    p.sense = sense;
    return solve_mot(p, opts);
}

}  // namespace

ImprovementReport improvement_report(const std::vector<DiscreteMeasure>& marginals,
                                     const PayoffSpec& payoff, const SolveOptions& opts) {
    if (marginals.size() != 3) {
        throw std::invalid_argument("improvement_report expects exactly three marginals");
    }
    ImprovementReport rep;
    rep.payoff = payoff.name;
    rep.lower_13 = solve_subset(marginals, {0, 2}, payoff, Sense::minimize, opts).objective;
    rep.lower_123 = solve_subset(marginals, {0, 1, 2}, payoff, Sense::minimize, opts).objective;
    rep.upper_123 = solve_subset(marginals, {0, 1, 2}, payoff, Sense::maximize, opts).objective;
    rep.upper_13 = solve_subset(marginals, {0, 2}, payoff, Sense::maximize, opts).objective;

    if (std::abs(rep.lower_13) > 1e-12) {
        rep.rel_lower = (rep.lower_123 - rep.lower_13) / rep.lower_13;
    } else {
        rep.rel_lower = rep.lower_123 - rep.lower_13;
        rep.rel_lower_is_absolute = true;
    }
    if (std::abs(rep.upper_13) > 1e-12) {
        rep.rel_upper = (rep.upper_13 - rep.upper_123) / rep.upper_13;
    } else {
        rep.rel_upper = rep.upper_13 - rep.upper_123;
        rep.rel_upper_is_absolute = true;
    }
    return rep;
}

SweepResult inclusion_sweep(const std::vector<DiscreteMeasure>& marginals,
                            const PayoffSpec& payoff, SweepOrder order,
                            const SolveOptions& opts, int jobs) {
    const int n = static_cast<int>(marginals.size());
    if (n < 2) throw std::invalid_argument("inclusion_sweep needs at least two marginals");

    std::vector<std::vector<int>> families;
    std::vector<int> included = {0, n - 1};
    families.push_back(included);
    if (order == SweepOrder::left) {
        for (int i = 1; i + 1 < n; ++i) {
            included.insert(included.end() - 1, i);
            families.push_back(included);
        }
    } else {
        for (int i = n - 2; i >= 1; --i) {
            included.insert(included.begin() + 1, i);
            families.push_back(included);
        }
    }

    SweepResult result;
    result.entries.resize(families.size());
    auto run_one = [&](std::size_t k) {
        SweepEntry e;
        e.included = families[k];
        e.lower = solve_subset(marginals, families[k], payoff, Sense::minimize, opts).objective;
        e.upper = solve_subset(marginals, families[k], payoff, Sense::maximize, opts).objective;
        return e;
    };
    if (jobs <= 1) {
        for (std::size_t k = 0; k < families.size(); ++k) result.entries[k] = run_one(k);
    } else {
        std::vector<std::future<SweepEntry>> futures;
        futures.reserve(families.size());
        for (std::size_t k = 0; k < families.size(); ++k) {
            futures.push_back(std::async(std::launch::async, run_one, k));
        }
        for (std::size_t k = 0; k < families.size(); ++k) result.entries[k] = futures[k].get();
    }
    return result;
}

bool corridor_feasible(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                       const RealMap& t_down, const RealMap& t_up, const SolveOptions& opts) {
    const std::size_t m1 = mu1.size();
    const std::size_t m2 = mu2.size();

    LinearProgram lp;
    lp.sense = Sense::minimize;
    // One variable per corridor-admissible pair (x1, x2).
    std::vector<std::vector<int>> var(m1, std::vector<int>(m2, -1));
    for (std::size_t i = 0; i < m1; ++i) {
        const double x1 = mu1.atoms[i];
        const double lo = t_down(x1);
        const double hi = t_up(x1);
        for (std::size_t k = 0; k < m2; ++k) {
            const double x2 = mu2.atoms[k];
            const double slack = 1e-9 * (1.0 + std::abs(x2));
            if (x2 >= lo - slack && x2 <= hi + slack) var[i][k] = lp.add_variable(0.0);
        }
    }
    // mu1 rows, mu2 rows (last dropped as redundant), martingale rows.
    for (std::size_t i = 0; i < m1; ++i) {
        const int row = lp.add_row(Relation::equal, mu1.weights[i]);
        for (std::size_t k = 0; k < m2; ++k) {
            if (var[i][k] >= 0) lp.add_entry(row, var[i][k], 1.0);
        }
    }
    for (std::size_t k = 0; k + 1 < m2; ++k) {
        const int row = lp.add_row(Relation::equal, mu2.weights[k]);
        for (std::size_t i = 0; i < m1; ++i) {
            if (var[i][k] >= 0) lp.add_entry(row, var[i][k], 1.0);
        }
    }
    for (std::size_t i = 0; i < m1; ++i) {
        const int row = lp.add_row(Relation::equal, 0.0);
        for (std::size_t k = 0; k < m2; ++k) {
            if (var[i][k] >= 0) {
                const double dx = mu2.atoms[k] - mu1.atoms[i];
                if (dx != 0.0) lp.add_entry(row, var[i][k], dx);
            }
        }
    }
    return solve(lp, opts).status == LpStatus::optimal;
}

std::vector<NoImprovementEntry> no_improvement_suite(
    const DiscreteMeasure& mu1, const DiscreteMeasure& mu3, const PayoffSpec& payoff,
    const std::vector<double>& t_grid, const RealMap* t_down, const RealMap* t_up,
    const SolveOptions& opts) {
    if (!convex_order_leq(mu1, mu3, 1e-8)) {
        throw std::invalid_argument("no_improvement_suite: mu1 must precede mu3 in convex order");
    }
    const double base =
        solve_subset({mu1, mu3}, {0, 1}, payoff, Sense::minimize, opts).objective;

    std::vector<NoImprovementEntry> out;
    auto run = [&](const std::string& label, double t, const DiscreteMeasure& mu2) {
        const double three =
            solve_subset({mu1, mu2, mu3}, {0, 1, 2}, payoff, Sense::minimize, opts).objective;
        out.push_back({label, t, std::abs(three - base)});
    };
    for (double t : t_grid) {
        run("mixture", t, mixture(mu1, mu3, t));
        if (t_down != nullptr && t_up != nullptr) {
            run("convex_interpolate", t, convex_interpolate(mu1, *t_down, *t_up, t));
        }
    }
    return out;
}

bool convexity_of_I_check(const DiscreteMeasure& mu1, const DiscreteMeasure& mu3,
                          const PayoffSpec& payoff, const DiscreteMeasure& muA,
                          const DiscreteMeasure& muB, double lambda, const SolveOptions& opts) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("convexity_of_I_check: lambda must be in [0,1]");
    }
    const DiscreteMeasure mid = mixture(muA, muB, lambda);
    const double base = solve_subset({mu1, mu3}, {0, 1}, payoff, Sense::minimize, opts).objective;
    const double three =
        solve_subset({mu1, mid, mu3}, {0, 1, 2}, payoff, Sense::minimize, opts).objective;
    return std::abs(three - base) <= 1e-7 * (1.0 + std::abs(base));
}

bool optimizer_unique_heuristic(const std::vector<DiscreteMeasure>& marginals,
                                const PayoffSpec& payoff, Sense sense, double xi,
                                unsigned seed, const SolveOptions& opts) {
    MotProblem p;
    p.marginals = marginals;
    p.payoff = bind_payoff(payoff, marginals.size());
    p.sense = sense;
    const MotSolution base = solve_mot(p, opts);

    // Per-tuple noise indexed by the flat grid position. A separable
    // perturbation would integrate to a constant on the transport polytope
    // and distinguish nothing.
    std::size_t total = 1;
    std::vector<std::size_t> stride(marginals.size());
    for (std::size_t i = marginals.size(); i-- > 0;) {
        stride[i] = total;
        total *= marginals[i].size();
    }
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto noise = std::make_shared<std::vector<double>>(total);
    for (auto& v : *noise) v = unif(rng);

    const Payoff inner = p.payoff;
    auto marginals_copy = std::make_shared<std::vector<DiscreteMeasure>>(marginals);
    auto support = [](const MotSolution& sol) {
        std::set<std::vector<int>> sup;
        for (const auto& e : sol.coupling) {
            if (e.probability > 1e-9) sup.insert(e.index);
        }
        return sup;
    };

    // Shake in both directions: over a non-singleton optimal face the two
    // shaken optima land on different vertices even when the unperturbed
    // solve happens to agree with one of them.
    const auto base_support = support(base);
    for (double sign : {1.0, -1.0}) {
        MotProblem perturbed = p;
        perturbed.payoff.name = inner.name + "+perturbation";
        perturbed.payoff.reads.clear();
        for (std::size_t i = 0; i < marginals.size(); ++i) {
            perturbed.payoff.reads.push_back(static_cast<int>(i));
        }
        const double amp = sign * xi;
        perturbed.payoff.eval = [inner, noise, amp, stride,
                                 marginals_copy](const std::vector<double>& x) {
            std::size_t flat = 0;
            for (std::size_t i = 0; i < marginals_copy->size(); ++i) {
                const auto& atoms = (*marginals_copy)[i].atoms;
                const auto it = std::lower_bound(atoms.begin(), atoms.end(), x[i]);
                const std::size_t k = it == atoms.end()
                                          ? atoms.size() - 1
                                          : static_cast<std::size_t>(it - atoms.begin());
                flat += k * stride[i];
            }
            return inner.eval(x) + amp * (*noise)[flat];
        };
        if (support(solve_mot(perturbed, opts)) != base_support) return false;
    }
    return true;
}

DegreeCertification certify_degree_of_improvement(const DiscreteMeasure& mu1,
                                                  const DiscreteMeasure& mu2,
                                                  const DiscreteMeasure& mu3,
                                                  const PayoffSpec& payoff,
                                                  const SolveOptions& opts) {
    MotProblem two;
    two.marginals = {mu1, mu3};
    two.payoff = bind_payoff(payoff, 2);
    two.sense = Sense::minimize;
    const MotSolution sol2 = solve_mot(two, opts);

    MotProblem three;
    three.marginals = {mu1, mu2, mu3};
    three.payoff = bind_payoff(payoff, 3);
    three.sense = Sense::minimize;
    const MotSolution sol3 = solve_mot(three, opts);

    DegreeCertification cert;
    cert.improvement = sol3.objective - sol2.objective;

    // Rebuild the three-marginal value from its certificate with the u2 leg
    // replaced by the hedging gap H of the remaining legs.
    const SemiStaticStrategy strat = strategy_from_certificate(sol3.dual, three.marginals);
    const auto fn = payoff.fn;
    const double param = payoff.param;
    const BinaryPayoff c = [fn, param](double x1, double x3) { return fn(x1, x3, param); };
    const GapFunction gap = gap_H(strat, c, mu1.atoms, mu2.atoms, mu3.atoms);

    double e_u1 = 0.0;
    double e_u3 = 0.0;
    for (std::size_t i = 0; i < mu1.size(); ++i) e_u1 += mu1.weights[i] * sol3.dual.u[0][i];
    for (std::size_t i = 0; i < mu3.size(); ++i) e_u3 += mu3.weights[i] * sol3.dual.u[2][i];
    for (std::size_t k = 0; k < mu2.size(); ++k) {
        cert.expected_gap_H += mu2.weights[k] * gap.values[k];
        cert.expected_u2 += mu2.weights[k] * sol3.dual.u[1][k];
    }
    cert.reconstructed = e_u1 + cert.expected_gap_H + e_u3 - sol2.certificate_value;
    return cert;
}

}  // namespace mot
