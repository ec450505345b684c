#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mot/measure.hpp"
#include "mot/mot.hpp"
#include "mot/payoff.hpp"

namespace mot {

/// Paired two-/three-marginal price bounds for a payoff reading the first
/// and last coordinate. The sandwich lower_13 <= lower_123 <= upper_123 <=
/// upper_13 holds up to solver tolerance by feasible-set inclusion.
struct ImprovementReport {
    std::string payoff;
    double lower_13 = 0.0;
    double lower_123 = 0.0;
    double upper_123 = 0.0;
    double upper_13 = 0.0;
    /// (lower_123 - lower_13) / lower_13 and (upper_13 - upper_123) / upper_13,
    /// as fractions. When a base bound is 0 the improvement is reported as an
    /// absolute difference and the corresponding flag is set.
    double rel_lower = 0.0;
    double rel_upper = 0.0;
    bool rel_lower_is_absolute = false;
    bool rel_upper_is_absolute = false;
};

ImprovementReport improvement_report(const std::vector<DiscreteMeasure>& marginals,
                                     const PayoffSpec& payoff, const SolveOptions& opts = {});

enum class SweepOrder { left, right };

struct SweepEntry {
    std::vector<int> included;  // 0-based marginal indices
    double lower = 0.0;
    double upper = 0.0;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
};

/// Bounds along the nested families that start from {first, last} and add
/// interior marginals one at a time, from the left (time order) or from the
/// right. `jobs` > 1 fans the independent solves out over threads; results
/// are merged by index so the output is identical either way.
SweepResult inclusion_sweep(const std::vector<DiscreteMeasure>& marginals,
                            const PayoffSpec& payoff, SweepOrder order,
                            const SolveOptions& opts = {}, int jobs = 1);

/// Whether some martingale coupling of (mu1, mu2) is supported on the
/// corridor t_down(x1) <= x2 <= t_up(x1): an LP feasibility run over the
/// corridor-restricted transport polytope.
bool corridor_feasible(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                       const RealMap& t_down, const RealMap& t_up,
                       const SolveOptions& opts = {});

struct NoImprovementEntry {
    std::string construction;  // "mixture" or "convex_interpolate"
    double t = 0.0;
    double abs_gap = 0.0;  // |lower_123 - lower_13|
};

/// For each t in t_grid, inserts the interpolated intermediate marginal and
/// measures how much the lower bound moves. Mixture always applies; the
/// convex interpolation runs when corridor maps are supplied (they must map
/// mu1 onto maps of an optimal two-map coupling for the gap to vanish).
std::vector<NoImprovementEntry> no_improvement_suite(
    const DiscreteMeasure& mu1, const DiscreteMeasure& mu3, const PayoffSpec& payoff,
    const std::vector<double>& t_grid, const RealMap* t_down = nullptr,
    const RealMap* t_up = nullptr, const SolveOptions& opts = {});

/// Convexity of the no-improvement set: muA and muB are assumed to yield no
/// improvement (caller-verified); checks that their lambda-mixture does not
/// either, within 1e-7 * (1 + |lower_13|).
bool convexity_of_I_check(const DiscreteMeasure& mu1, const DiscreteMeasure& mu3,
                          const PayoffSpec& payoff, const DiscreteMeasure& muA,
                          const DiscreteMeasure& muB, double lambda,
                          const SolveOptions& opts = {});

/// Heuristic uniqueness test for the two-marginal optimizer: re-solves with
/// the payoff perturbed by xi times a seeded random linear functional and
/// compares supports.
bool optimizer_unique_heuristic(const std::vector<DiscreteMeasure>& marginals,
                                const PayoffSpec& payoff, Sense sense, double xi = 1e-7,
                                unsigned seed = 0, const SolveOptions& opts = {});

/// Dual-side reconstruction of the improvement: the three-marginal value is
/// rebuilt from its certificate as E[u1] + E_mu2[H] + E[u3] with H evaluated
/// by gap_H, and the improvement as that quantity minus the two-marginal
/// certificate value. Both should match the primal difference to solver
/// tolerance.
struct DegreeCertification {
    double improvement = 0.0;        // lower_123 - lower_13 (primal)
    double reconstructed = 0.0;      // via the three-marginal certificate and gap_H
    double expected_u2 = 0.0;        // E_mu2[u2] of the three-marginal certificate
    double expected_gap_H = 0.0;     // E_mu2[H] of the same certificate
};

DegreeCertification certify_degree_of_improvement(const DiscreteMeasure& mu1,
                                                  const DiscreteMeasure& mu2,
                                                  const DiscreteMeasure& mu3,
                                                  const PayoffSpec& payoff,
                                                  const SolveOptions& opts = {});

}  // namespace mot
