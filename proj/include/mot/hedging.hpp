#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "mot/measure.hpp"
#include "mot/mot.hpp"

namespace mot {

/// Semi-static strategy for a three-date problem: static option legs u1/u3
/// (and optionally u2), a position delta1(x1) held over the first period and
/// delta2(x1,x2) held over the second.
struct SemiStaticStrategy {
    std::function<double(double)> u1;
    std::function<double(double)> u3;
    std::function<double(double)> delta1;
    std::function<double(double, double)> delta2;
    std::function<double(double)> u2;  // optional intermediate static leg
};

/// Pointwise sub-hedging gap evaluated on a grid for the intermediate value.
struct GapFunction {
    std::vector<double> grid;    // x2 points
    std::vector<double> values;  // H(x2)
};

using BinaryPayoff = std::function<double(double, double)>;

/// H(x2) = min over (x1,x3) in grid1 x grid3 of
///   c(x1,x3) - u1(x1) - u3(x3) - delta1(x1)(x2-x1) - delta2(x1,x2)(x3-x2).
/// The minimum runs over the supplied grids only, which is exact on the
/// discrete domain the transport LP works with; a grid H can exceed the
/// continuum infimum.
GapFunction gap_H(const SemiStaticStrategy& strategy, const BinaryPayoff& payoff,
                  const std::vector<double>& grid1, const std::vector<double>& grid2,
                  const std::vector<double>& grid3);

struct SubhedgeCheck {
    bool ok = false;
    double worst_violation = 0.0;  // max(0, -min_x2 (H - u2))
    double value = 0.0;            // sum_i E_{mu_i}[u_i]
};

/// Checks the sub-hedging inequality on the atom grids of the supplied
/// marginals: ok iff H - u2 (H alone when u2 is absent) stays above -tol on
/// every mu2 atom. `value` is the price of the strategy under the marginals.
SubhedgeCheck verify_subhedge(const SemiStaticStrategy& strategy, const BinaryPayoff& payoff,
                              const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                              const DiscreteMeasure& mu3, double tol = 1e-7);

/// Optimal two-marginal sub-hedge of the forward-start straddle |x3 - x1|
/// between U[-1,1] and U[-2,2], in closed form (arcsin family). Only defined
/// for |x| <= 2; evaluation outside throws std::domain_error. The x > 1
/// branch of delta1 reads -theta(q_inverse(x)), mirroring the x < -1 branch.
SemiStaticStrategy hobson_strategy();

/// Three-marginal sub-hedge of the straddle worth 2/3 when the intermediate
/// marginal is the fair coin on {-1,1}: u1 = 1 - x1^2 on [-1,1],
/// u2 = -1 - |x2| off {-1,1}, delta1 = -x1, delta2 = +-1 by the sign of x2.
SemiStaticStrategy straddle_strategy();

/// Smoothed variant that tolerates an intermediate marginal supported on
/// A = [-1,-1+eps] u [1-eps,1]: u2 becomes x2^2 - 1 on A and delta2 becomes
/// x2, keeping the sub-hedge exact pointwise. Its price under U(A) is
/// 2/3 - eps + eps^2/3. Requires 0 < eps < 1.
SemiStaticStrategy straddle_epsilon_strategy(double eps);

/// Wraps a 2- or 3-marginal LP certificate as evaluable functions via atom
/// lookup on the certificate's own grids. For a 2-marginal certificate the
/// intermediate trading leg is extended as delta2(x1,x2) := delta1(x1).
SemiStaticStrategy strategy_from_certificate(const DualCertificate& cert,
                                             const std::vector<DiscreteMeasure>& marginals);

/// CSV rows "x2,H".
void write_gap_csv(const GapFunction& gap, std::ostream& os);

}  // namespace mot
