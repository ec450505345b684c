#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mot {

/// A finitely supported probability measure on the real line.
///
/// Atoms are strictly increasing, weights are strictly positive and sum to
/// one. Use make() to construct: it sorts, merges near-coincident atoms,
/// prunes negligible weights and renormalizes, so every DiscreteMeasure in
/// the program is canonical. Instances are immutable by convention and safe
/// to share across threads.
struct DiscreteMeasure {
    std::vector<double> atoms;
    std::vector<double> weights;

    /// Canonicalizing factory. Throws std::invalid_argument if the input is
    /// empty, contains non-finite values, has a negative weight, or the
    /// total mass deviates from 1 by more than 1e-12.
    static DiscreteMeasure make(std::vector<double> atoms, std::vector<double> weights);

    static DiscreteMeasure point_mass(double x);

    std::size_t size() const { return atoms.size(); }
};

/// Atoms closer than this (relative) distance are merged by make().
inline constexpr double kAtomMergeTol = 1e-9;
/// Weights below this threshold are pruned by make(); mass is renormalized.
inline constexpr double kWeightPruneTol = 1e-14;
/// Default tolerance for convex-order comparisons (absolute, price units).
inline constexpr double kConvexOrderTol = 1e-9;

double mean(const DiscreteMeasure& m);

/// E[(X - strike)^+].
double call_price(const DiscreteMeasure& m, double strike);

/// True iff m1 precedes m2 in the convex order, up to tol: means agree and
/// call prices of m1 never exceed those of m2 by more than tol. Since call
/// curves of discrete laws are piecewise linear with kinks only at atoms,
/// checking strikes in the union of both atom sets is sufficient.
bool convex_order_leq(const DiscreteMeasure& m1, const DiscreteMeasure& m2,
                      double tol = kConvexOrderTol);

/// Reference laws the examples use: uniform on an interval, or a fair coin
/// on two points.
struct ContinuousLawSpec {
    enum class Kind { uniform, two_point };
    Kind kind;
    double lo;
    double hi;

    static ContinuousLawSpec uniform(double a, double b);
    static ContinuousLawSpec two_point(double x_minus, double x_plus);
};

/// Conditional-mean quantization. For uniform(a,b): n equal-probability
/// intervals, one atom at each interval midpoint. The quantized law is
/// dominated by the original in convex order. Two-point laws are returned
/// as-is (n_atoms ignored).
DiscreteMeasure quantize(const ContinuousLawSpec& spec, std::size_t n_atoms);

/// Marginal of the additive +/-1 binomial walk after `steps` steps started
/// at s0: atoms s0-k+2j, weight C(k,j)/2^k.
DiscreteMeasure binomial_marginal(double s0, int steps);

using RealMap = std::function<double(double)>;

/// Martingale convex interpolation between mu1 and its pushforward under a
/// two-map corridor (t_down, t_up). Each atom x moves to
///   (1-t)x + t*t_up(x)   with probability q(x) = (x - t_down(x)) / (t_up(x) - t_down(x)),
///   (1-t)x + t*t_down(x) with probability 1 - q(x),
/// staying put when t_up(x) == t_down(x). Requires t in [0,1] and
/// t_down(x) <= x <= t_up(x) on every atom. The result has the same mean as
/// mu1 for every t and interpolates in convex order between mu1 (t=0) and
/// the full pushforward (t=1).
DiscreteMeasure convex_interpolate(const DiscreteMeasure& mu1, const RealMap& t_down,
                                   const RealMap& t_up, double t);

/// Convex combination (1-t)*m1 + t*m2 of the measures themselves.
DiscreteMeasure mixture(const DiscreteMeasure& m1, const DiscreteMeasure& m2, double t);

}  // namespace mot
