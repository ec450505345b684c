#include "mot/hedging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace mot {

namespace {

constexpr double kIndicatorTol = 1e-12;

bool near(double x, double y) { return std::abs(x - y) <= kIndicatorTol * (1.0 + std::abs(y)); }

double require_in_band(double x) {
    if (std::abs(x) > 2.0 + 1e-12) {
        throw std::domain_error("hobson strategy evaluated outside [-2,2]");
    }
    return std::clamp(x, -2.0, 2.0);
}

double alpha_fn(double x) {
    return (2.0 * x / std::sqrt(3.0)) * std::asin(x / 2.0) +
           (2.0 - std::sqrt(4.0 - x * x)) / std::sqrt(3.0);
}

double theta_fn(double x) { return (2.0 / std::sqrt(3.0)) * std::asin(x / 2.0); }

double p_inverse(double x) { return (-x - std::sqrt(3.0 * (4.0 - x * x))) / 2.0; }

double q_inverse(double x) { return (-x + std::sqrt(3.0 * (4.0 - x * x))) / 2.0; }

double hobson_u3(double x) {
    x = require_in_band(x);
    if (x < -1.0) {
        const double z = std::clamp(p_inverse(x), -2.0, 2.0);
        return alpha_fn(z) + (z - x) * (1.0 - theta_fn(z));
    }
    if (x > 1.0) {
        const double z = std::clamp(q_inverse(x), -2.0, 2.0);
        return alpha_fn(z) + (z - x) * (-1.0 - theta_fn(z));
    }
    return alpha_fn(x);
}

double hobson_delta1(double x) {
    x = require_in_band(x);
    if (x < -1.0) return -theta_fn(std::clamp(p_inverse(x), -2.0, 2.0));
    if (x > 1.0) return -theta_fn(std::clamp(q_inverse(x), -2.0, 2.0));
    return -theta_fn(x);
}

}  // namespace

GapFunction gap_H(const SemiStaticStrategy& strategy, const BinaryPayoff& payoff,
                  const std::vector<double>& grid1, const std::vector<double>& grid2,
                  const std::vector<double>& grid3) {
    if (grid1.empty() || grid2.empty() || grid3.empty()) {
        throw std::invalid_argument("gap_H: empty grid");
    }
    GapFunction gap;
    gap.grid = grid2;
    gap.values.reserve(grid2.size());
    // u1/u3 do not depend on x2; hoist them out of the x2 loop.
    std::vector<double> u1v(grid1.size());
    std::vector<double> d1v(grid1.size());
    for (std::size_t i = 0; i < grid1.size(); ++i) {
        u1v[i] = strategy.u1(grid1[i]);
        d1v[i] = strategy.delta1(grid1[i]);
    }
    std::vector<double> u3v(grid3.size());
    for (std::size_t k = 0; k < grid3.size(); ++k) u3v[k] = strategy.u3(grid3[k]);

    for (double x2 : grid2) {
        double best = kInfinity;
        for (std::size_t i = 0; i < grid1.size(); ++i) {
            const double x1 = grid1[i];
            const double base = -u1v[i] - d1v[i] * (x2 - x1);
            const double d2 = strategy.delta2(x1, x2);
            for (std::size_t k = 0; k < grid3.size(); ++k) {
                const double x3 = grid3[k];
                const double v = payoff(x1, x3) - u3v[k] + base - d2 * (x3 - x2);
                best = std::min(best, v);
            }
        }
        gap.values.push_back(best);
    }
    return gap;
}

SubhedgeCheck verify_subhedge(const SemiStaticStrategy& strategy, const BinaryPayoff& payoff,
                              const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                              const DiscreteMeasure& mu3, double tol) {
    const GapFunction gap = gap_H(strategy, payoff, mu1.atoms, mu2.atoms, mu3.atoms);
    SubhedgeCheck check;
    double worst = kInfinity;
    for (std::size_t k = 0; k < gap.grid.size(); ++k) {
        const double slack =
            gap.values[k] - (strategy.u2 ? strategy.u2(gap.grid[k]) : 0.0);
        worst = std::min(worst, slack);
    }
    check.worst_violation = std::max(0.0, -worst);
    check.ok = worst >= -tol;
    for (std::size_t i = 0; i < mu1.size(); ++i) check.value += mu1.weights[i] * strategy.u1(mu1.atoms[i]);
    for (std::size_t i = 0; i < mu3.size(); ++i) check.value += mu3.weights[i] * strategy.u3(mu3.atoms[i]);
    if (strategy.u2) {
        for (std::size_t i = 0; i < mu2.size(); ++i) {
            check.value += mu2.weights[i] * strategy.u2(mu2.atoms[i]);
        }
    }
    return check;
}

SemiStaticStrategy hobson_strategy() {
    SemiStaticStrategy s;
    s.u3 = hobson_u3;
    s.u1 = [](double x) { return -hobson_u3(x); };
    s.delta1 = hobson_delta1;
    s.delta2 = [](double x1, double) { return hobson_delta1(x1); };
    return s;
}

SemiStaticStrategy straddle_strategy() {
    SemiStaticStrategy s;
    s.u1 = [](double x) { return std::abs(x) <= 1.0 + kIndicatorTol ? 1.0 - x * x : 0.0; };
    s.u3 = [](double) { return 0.0; };
    s.u2 = [](double x) { return near(x, 1.0) || near(x, -1.0) ? 0.0 : -1.0 - std::abs(x); };
    s.delta1 = [](double x) { return std::abs(x) <= 1.0 + kIndicatorTol ? -x : 0.0; };
    s.delta2 = [](double x1, double x2) {
        if (std::abs(x1) > 1.0 + kIndicatorTol) return 0.0;
        if (near(x2, 1.0)) return 1.0;
        if (near(x2, -1.0)) return -1.0;
        return 0.0;
    };
    return s;
}

SemiStaticStrategy straddle_epsilon_strategy(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("straddle_epsilon_strategy: eps must be in (0,1)");
    }
    auto in_band = [eps](double x) {
        const double a = std::abs(x);
        return a >= 1.0 - eps - kIndicatorTol && a <= 1.0 + kIndicatorTol;
    };
    SemiStaticStrategy s;
    s.u1 = [](double x) { return std::abs(x) <= 1.0 + kIndicatorTol ? 1.0 - x * x : 0.0; };
    s.u3 = [](double) { return 0.0; };
    s.u2 = [in_band](double x) { return in_band(x) ? x * x - 1.0 : -1.0 - std::abs(x); };
    s.delta1 = [](double x) { return std::abs(x) <= 1.0 + kIndicatorTol ? -x : 0.0; };
    s.delta2 = [](double x1, double x2) {
        if (std::abs(x1) > 1.0 + kIndicatorTol || std::abs(x2) > 1.0 + kIndicatorTol) return 0.0;
        return x2;
    };
    return s;
}

namespace {

// Atom index lookup with a relative tolerance; the grids are exact atoms so
// in practice this is an exact match.
std::size_t find_atom(const std::vector<double>& atoms, double x) {
    const auto it = std::lower_bound(atoms.begin(), atoms.end(), x - 1e-9 * (1.0 + std::abs(x)));
    if (it != atoms.end() && std::abs(*it - x) <= 1e-9 * (1.0 + std::abs(x))) {
        return static_cast<std::size_t>(it - atoms.begin());
    }
    throw std::invalid_argument("certificate strategy evaluated off its atom grid");
}

}  // namespace

SemiStaticStrategy strategy_from_certificate(const DualCertificate& cert,
                                             const std::vector<DiscreteMeasure>& marginals) {
    const std::size_t n = marginals.size();
    if (n != cert.u.size() || (n != 2 && n != 3)) {
        throw std::invalid_argument("strategy_from_certificate: need a 2- or 3-marginal certificate");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (cert.u[i].size() != marginals[i].size()) {
            throw std::invalid_argument("strategy_from_certificate: certificate/marginal shape mismatch");
        }
    }

    SemiStaticStrategy s;
    const auto atoms1 = marginals[0].atoms;
    const auto u1 = cert.u[0];
    s.u1 = [atoms1, u1](double x) { return u1[find_atom(atoms1, x)]; };
    const auto atoms_last = marginals[n - 1].atoms;
    const auto u_last = cert.u[n - 1];
    s.u3 = [atoms_last, u_last](double x) { return u_last[find_atom(atoms_last, x)]; };
    const auto d1 = cert.delta[0];
    s.delta1 = [atoms1, d1](double x) { return d1[find_atom(atoms1, x)]; };

    if (n == 2) {
        // Two-marginal strategies trade once; hold the same position over
        // both legs of the three-date telescoping.
        s.delta2 = [atoms1, d1](double x1, double) { return d1[find_atom(atoms1, x1)]; };
    } else {
        const auto atoms2 = marginals[1].atoms;
        const auto u2 = cert.u[1];
        s.u2 = [atoms2, u2](double x) { return u2[find_atom(atoms2, x)]; };
        const auto d2 = cert.delta[1];
        const std::size_t stride = atoms2.size();
        s.delta2 = [atoms1, atoms2, d2, stride](double x1, double x2) {
            return d2[find_atom(atoms1, x1) * stride + find_atom(atoms2, x2)];
        };
    }
    return s;
}

void write_gap_csv(const GapFunction& gap, std::ostream& os) {
    os << "x2,H\n";
    char buf[64];
    for (std::size_t i = 0; i < gap.grid.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", gap.grid[i], gap.values[i]);
        os << buf;
    }
}

}  // namespace mot
