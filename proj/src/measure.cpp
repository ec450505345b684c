#include "mot/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mot {

DiscreteMeasure DiscreteMeasure::make(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.empty() || atoms.size() != weights.size()) {
        throw std::invalid_argument("DiscreteMeasure: empty or mismatched atom/weight arrays");
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!std::isfinite(atoms[i]) || !std::isfinite(weights[i])) {
            throw std::invalid_argument("DiscreteMeasure: non-finite atom or weight");
        }
        if (weights[i] < -1e-15) {
            throw std::invalid_argument("DiscreteMeasure: negative weight");
        }
    }

    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

    // Merge runs of near-coincident atoms at their weighted mean position.
    std::vector<double> xs;
    std::vector<double> ws;
    for (std::size_t idx : order) {
        const double x = atoms[idx];
        const double w = std::max(weights[idx], 0.0);
        if (!xs.empty() && x - xs.back() <= kAtomMergeTol * (1.0 + std::abs(x))) {
            const double tot = ws.back() + w;
            if (tot > 0.0) xs.back() = (xs.back() * ws.back() + x * w) / tot;
            ws.back() = tot;
        } else {
            xs.push_back(x);
            ws.push_back(w);
        }
    }

    double total = std::accumulate(ws.begin(), ws.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("DiscreteMeasure: weights must sum to 1 within 1e-12");
    }

    std::vector<double> fx;
    std::vector<double> fw;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ws[i] >= kWeightPruneTol) {
            fx.push_back(xs[i]);
            fw.push_back(ws[i]);
        }
    }
    if (fx.empty()) throw std::invalid_argument("DiscreteMeasure: all mass pruned");
    const double kept = std::accumulate(fw.begin(), fw.end(), 0.0);
    for (double& w : fw) w /= kept;

    DiscreteMeasure m;
    m.atoms = std::move(fx);
    m.weights = std::move(fw);
    return m;
}

DiscreteMeasure DiscreteMeasure::point_mass(double x) {
    return make({x}, {1.0});
}

double mean(const DiscreteMeasure& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += m.weights[i] * m.atoms[i];
    return s;
}

double call_price(const DiscreteMeasure& m, double strike) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.atoms[i] > strike) s += m.weights[i] * (m.atoms[i] - strike);
    }
    return s;
}

bool convex_order_leq(const DiscreteMeasure& m1, const DiscreteMeasure& m2, double tol) {
    if (std::abs(mean(m1) - mean(m2)) > tol) return false;
    for (const auto* m : {&m1, &m2}) {
        for (double k : m->atoms) {
            if (call_price(m1, k) > call_price(m2, k) + tol) return false;
        }
    }
    return true;
}

ContinuousLawSpec ContinuousLawSpec::uniform(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("uniform law requires a < b");
    return {Kind::uniform, a, b};
}

ContinuousLawSpec ContinuousLawSpec::two_point(double x_minus, double x_plus) {
    if (!(x_minus < x_plus)) throw std::invalid_argument("two-point law requires x- < x+");
    return {Kind::two_point, x_minus, x_plus};
}

DiscreteMeasure quantize(const ContinuousLawSpec& spec, std::size_t n_atoms) {
    if (n_atoms == 0) throw std::invalid_argument("quantize: n_atoms must be >= 1");
    if (spec.kind == ContinuousLawSpec::Kind::two_point) {
        return DiscreteMeasure::make({spec.lo, spec.hi}, {0.5, 0.5});
    }
    std::vector<double> xs(n_atoms);
    std::vector<double> ws(n_atoms, 1.0 / static_cast<double>(n_atoms));
    const double h = (spec.hi - spec.lo) / static_cast<double>(n_atoms);
    for (std::size_t j = 0; j < n_atoms; ++j) {
        xs[j] = spec.lo + h * (static_cast<double>(j) + 0.5);
    }
    return DiscreteMeasure::make(std::move(xs), std::move(ws));
}

DiscreteMeasure binomial_marginal(double s0, int steps) {
    if (steps < 0) throw std::invalid_argument("binomial_marginal: steps must be >= 0");
    const int k = steps;
    std::vector<double> xs(static_cast<std::size_t>(k) + 1);
    std::vector<double> ws(static_cast<std::size_t>(k) + 1);
    double coeff = std::ldexp(1.0, -k);  // C(k,0)/2^k
    for (int j = 0; j <= k; ++j) {
        xs[static_cast<std::size_t>(j)] = s0 - k + 2 * j;
        ws[static_cast<std::size_t>(j)] = coeff;
        if (j < k) coeff = coeff * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
    return DiscreteMeasure::make(std::move(xs), std::move(ws));
}

DiscreteMeasure convex_interpolate(const DiscreteMeasure& mu1, const RealMap& t_down,
                                   const RealMap& t_up, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("convex_interpolate: t must be in [0,1]");
    std::vector<double> xs;
    std::vector<double> ws;
    xs.reserve(2 * mu1.size());
    ws.reserve(2 * mu1.size());
    for (std::size_t i = 0; i < mu1.size(); ++i) {
        const double x = mu1.atoms[i];
        const double w = mu1.weights[i];
        const double lo = t_down(x);
        const double hi = t_up(x);
        const double slack = 1e-12 * (1.0 + std::abs(x));
        if (lo > x + slack || x > hi + slack) {
            throw std::invalid_argument("convex_interpolate: corridor violated at an atom");
        }
        if (hi - lo > slack) {
            const double q = (x - lo) / (hi - lo);
            xs.push_back((1.0 - t) * x + t * hi);
            ws.push_back(w * q);
            xs.push_back((1.0 - t) * x + t * lo);
            ws.push_back(w * (1.0 - q));
        } else {
            xs.push_back(x);
            ws.push_back(w);
        }
    }
    return DiscreteMeasure::make(std::move(xs), std::move(ws));
}

DiscreteMeasure mixture(const DiscreteMeasure& m1, const DiscreteMeasure& m2, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("mixture: t must be in [0,1]");
    std::vector<double> xs(m1.atoms);
    std::vector<double> ws;
    ws.reserve(m1.size() + m2.size());
    for (double w : m1.weights) ws.push_back((1.0 - t) * w);
    xs.insert(xs.end(), m2.atoms.begin(), m2.atoms.end());
    for (double w : m2.weights) ws.push_back(t * w);
    return DiscreteMeasure::make(std::move(xs), std::move(ws));
}

}  // namespace mot
