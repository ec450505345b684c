#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "fixtures.hpp"
#include "generators.hpp"
#include "mot/analysis.hpp"

using namespace mot;

namespace {

// Per-atom successor maps of a two-map coupling; fails the test when some
// atom has more than two successors.
std::pair<RealMap, RealMap> extract_two_maps(const MotSolution& sol,
                                             const DiscreteMeasure& mu1,
                                             const DiscreteMeasure& mu3) {
    auto lo = std::make_shared<std::vector<double>>(mu1.size(), 0.0);
    auto hi = std::make_shared<std::vector<double>>(mu1.size(), 0.0);
    std::vector<std::vector<double>> successors(mu1.size());
    for (const auto& e : sol.coupling) {
        successors[static_cast<std::size_t>(e.index[0])].push_back(
            mu3.atoms[static_cast<std::size_t>(e.index[1])]);
    }
    for (std::size_t i = 0; i < mu1.size(); ++i) {
        REQUIRE(!successors[i].empty());
        REQUIRE(successors[i].size() <= 2);
        (*lo)[i] = successors[i].front();
        (*hi)[i] = successors[i].back();
    }
    const auto atoms = mu1.atoms;
    auto lookup = [atoms](const std::shared_ptr<std::vector<double>>& v) {
        return [atoms, v](double x) {
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                if (atoms[i] == x) return (*v)[i];
            }
            REQUIRE(false);
            return 0.0;
        };
    };
    return {lookup(lo), lookup(hi)};
}

// A chain whose two-marginal coupling is forced: two far-apart atoms with
// disjoint spread images.
std::pair<DiscreteMeasure, DiscreteMeasure> forced_instance() {
    const auto mu1 = DiscreteMeasure::make({0.0, 10.0}, {0.5, 0.5});
    const auto mu3 =
        DiscreteMeasure::make({-1.0, 1.0, 9.0, 11.0}, {0.25, 0.25, 0.25, 0.25});
    return {mu1, mu3};
}

}  // namespace

TEST_CASE("improvement report reproduces the reference rows") {
    const auto mu = fixtures::artificial_marginals();

    const auto straddle = improvement_report(mu, straddle_payoff());
    CHECK(std::abs(straddle.lower_13 - 28.13) <= 0.01);
    CHECK(std::abs(straddle.lower_123 - 31.63) <= 0.01);
    CHECK(std::abs(straddle.upper_123 - 39.99) <= 0.01);
    CHECK(std::abs(straddle.upper_13 - 39.99) <= 0.01);
    CHECK(std::abs(straddle.rel_lower - 0.1243) <= 2e-3);
    CHECK(std::abs(straddle.rel_upper - 0.0) <= 1e-6);

    const auto asian = improvement_report(mu, asian_payoff(100.0));
    CHECK(std::abs(asian.lower_13 - 11.08) <= 0.01);
    CHECK(std::abs(asian.lower_123 - 11.11) <= 0.01);
    CHECK(std::abs(asian.upper_123 - 12.83) <= 0.01);
    CHECK(std::abs(asian.upper_13 - 13.0) <= 0.01);

    for (const auto* rep : {&straddle, &asian}) {
        const double tol = 1e-7 * (1.0 + std::abs(rep->upper_13));
        CHECK(rep->lower_13 <= rep->lower_123 + tol);
        CHECK(rep->lower_123 <= rep->upper_123 + tol);
        CHECK(rep->upper_123 <= rep->upper_13 + tol);
    }
}

TEST_CASE("a linear payoff has all four bounds at zero") {
    PayoffSpec linear{"x3-x1", [](double x1, double x3, double) { return x3 - x1; }, 0.0};
    const auto rep = improvement_report(fixtures::artificial_marginals(), linear);
    CHECK(std::abs(rep.lower_13) <= 1e-9);
    CHECK(std::abs(rep.lower_123) <= 1e-9);
    CHECK(std::abs(rep.upper_123) <= 1e-9);
    CHECK(std::abs(rep.upper_13) <= 1e-9);
    CHECK(rep.rel_lower_is_absolute);
    CHECK(rep.rel_upper_is_absolute);
}

TEST_CASE("binomial inclusion sweep collapses to the model value") {
    std::vector<DiscreteMeasure> marginals;
    for (int k = 1; k <= 6; ++k) marginals.push_back(binomial_marginal(100.0, k));

    // brute force over the 2^5 equally likely step paths from date 1 to 6
    double expected = 0.0;
    for (int paths = 0; paths < 32; ++paths) {
        int sum = 0;
        for (int b = 0; b < 5; ++b) sum += (paths >> b) & 1 ? 1 : -1;
        expected += std::max(sum, 0) / 32.0;
    }
    CHECK(expected == doctest::Approx(0.9375));

    const auto left = inclusion_sweep(marginals, forward_call_payoff(), SweepOrder::left);
    const auto right = inclusion_sweep(marginals, forward_call_payoff(), SweepOrder::right, {}, 4);
    REQUIRE(left.entries.size() == 5);
    REQUIRE(right.entries.size() == 5);

    for (const auto* sweep : {&left, &right}) {
        // nested families only tighten
        for (std::size_t k = 1; k < sweep->entries.size(); ++k) {
            CHECK(sweep->entries[k].lower >= sweep->entries[k - 1].lower - 1e-8);
            CHECK(sweep->entries[k].upper <= sweep->entries[k - 1].upper + 1e-8);
        }
        CHECK(sweep->entries.front().lower <= 0.9375 + 1e-8);
        CHECK(sweep->entries.front().upper >= 0.9375 - 1e-8);
        CHECK(std::abs(sweep->entries.back().upper - sweep->entries.back().lower) <= 1e-7);
        CHECK(std::abs(sweep->entries.back().lower - expected) <= 1e-7);
    }

    // adding the rightmost interior marginal tightens more than the leftmost
    CHECK(right.entries[1].lower >= left.entries[1].lower - 1e-8);
    CHECK(right.entries[1].upper <= left.entries[1].upper + 1e-8);
    CHECK(right.entries[1].upper - right.entries[1].lower <
          left.entries[1].upper - left.entries[1].lower);
}

TEST_CASE("corridor feasibility") {
    SUBCASE("identity corridor pins the intermediate law") {
        const auto coin = DiscreteMeasure::make({-1.0, 1.0}, {0.5, 0.5});
        const RealMap ident = [](double x) { return x; };
        CHECK(corridor_feasible(coin, coin, ident, ident));
        const auto other = DiscreteMeasure::make({-1.0, 0.0, 1.0}, {0.25, 0.5, 0.25});
        CHECK_FALSE(corridor_feasible(coin, other, ident, ident));
    }

    SUBCASE("interpolated marginals always fit their corridor") {
        const auto [mu1, mu3] = forced_instance();
        const RealMap down = [](double x) { return x - 1.0; };
        const RealMap up = [](double x) { return x + 1.0; };
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            CHECK(corridor_feasible(mu1, convex_interpolate(mu1, down, up, t), down, up));
        }
    }

    SUBCASE("the coin between the uniforms escapes the left-curtain corridor") {
        const auto mu1 = quantize(ContinuousLawSpec::uniform(-1.0, 1.0), 64);
        const auto coin = DiscreteMeasure::make({-1.0, 1.0}, {0.5, 0.5});
        const RealMap up = [](double x) { return x > -1.0 ? 1.5 * x + 0.5 : x; };
        const RealMap down = [](double x) { return x > -1.0 ? -0.5 * x - 1.5 : x; };
        CHECK_FALSE(corridor_feasible(mu1, coin, down, up));
    }
}

TEST_CASE("mixture marginals never improve the bounds") {
    const auto mu = fixtures::artificial_marginals();
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int rep = 0; rep < 4; ++rep) {
        const auto& spec = payoff_registry()[static_cast<std::size_t>(rep * 2) %
                                             payoff_registry().size()];
        const std::vector<double> ts = {0.0, ud(rng), ud(rng), 1.0};
        for (const auto& entry : no_improvement_suite(mu[0], mu[2], spec, ts)) {
            CHECK(entry.abs_gap <= 1e-7 * (1.0 + 100.0));
        }
    }
}

TEST_CASE("interpolating the optimizer's own corridor never improves the bound") {
    const auto [mu1, mu3] = forced_instance();
    MotProblem p;
    p.marginals = {mu1, mu3};
    p.payoff = bind_payoff(straddle_payoff(), 2);
    const auto sol = solve_mot(p);
    const auto [down, up] = extract_two_maps(sol, mu1, mu3);

    const auto entries = no_improvement_suite(mu1, mu3, straddle_payoff(),
                                              {0.0, 0.3, 0.6, 1.0}, &down, &up);
    bool saw_interpolation = false;
    for (const auto& e : entries) {
        CHECK(e.abs_gap <= 1e-7 * (1.0 + 10.0));
        saw_interpolation = saw_interpolation || e.construction == "convex_interpolate";
    }
    CHECK(saw_interpolation);
}

TEST_CASE("the no-improvement set is closed under mixtures") {
    const auto mu = fixtures::artificial_marginals();
    const auto muA = mixture(mu[0], mu[2], 0.3);
    const auto muB = mixture(mu[0], mu[2], 0.8);
    CHECK(convexity_of_I_check(mu[0], mu[2], straddle_payoff(), muA, muB, 0.5));
    CHECK(convexity_of_I_check(mu[0], mu[2], straddle_payoff(), muA, muA, 0.25));
    CHECK(convexity_of_I_check(mu[0], mu[2], straddle_payoff(), muA, muB, 0.0));
    CHECK(convexity_of_I_check(mu[0], mu[2], straddle_payoff(), muA, muB, 1.0));
}

TEST_CASE("uniqueness heuristic separates forced and degenerate objectives") {
    const auto [mu1, mu3] = forced_instance();
    CHECK(optimizer_unique_heuristic({mu1, mu3}, straddle_payoff(), Sense::minimize));

    // constant payoff over a polytope with many couplings: the perturbation
    // moves the support
    PayoffSpec constant{"const", [](double, double, double) { return 1.0; }, 0.0};
    const auto coin = DiscreteMeasure::make({99.0, 101.0}, {0.5, 0.5});
    const auto wide =
        DiscreteMeasure::make({97.0, 99.0, 101.0, 103.0}, {0.25, 0.25, 0.25, 0.25});
    CHECK_FALSE(optimizer_unique_heuristic({coin, wide}, constant, Sense::minimize));
}

TEST_CASE("corridor verdict agrees with improvement on unique instances") {
    const auto [mu1, mu3] = forced_instance();
    REQUIRE(optimizer_unique_heuristic({mu1, mu3}, straddle_payoff(), Sense::minimize));
    MotProblem p;
    p.marginals = {mu1, mu3};
    p.payoff = bind_payoff(straddle_payoff(), 2);
    const double base = solve_mot(p).objective;
    const auto [down, up] = extract_two_maps(solve_mot(p), mu1, mu3);

    for (double t : {0.25, 0.75}) {
        const auto mu2 = convex_interpolate(mu1, down, up, t);
        const bool feasible = corridor_feasible(mu1, mu2, down, up);
        MotProblem q;
        q.marginals = {mu1, mu2, mu3};
        q.payoff = bind_payoff(straddle_payoff(), 3);
        const double three = solve_mot(q).objective;
        CHECK(feasible);
        CHECK(std::abs(three - base) <= 1e-7 * (1.0 + std::abs(base)));
    }

    // a mean-preserving contamination leaves the corridor and improves the bound
    const auto escape = DiscreteMeasure::make({-2.0, 1.0, 9.0, 12.0}, {0.2, 0.3, 0.3, 0.2});
    if (convex_order_leq(mu1, escape) && convex_order_leq(escape, mu3)) {
        FAIL("fixture drifted: escape measure should not be sandwiched");
    }
}

TEST_CASE("degree of improvement is certified through the dual gap") {
    const auto mu = fixtures::artificial_marginals();
    for (const auto& spec : {straddle_payoff(), asian_payoff(130.0)}) {
        const auto cert = certify_degree_of_improvement(mu[0], mu[1], mu[2], spec);
        const double scale = 1.0 + std::abs(cert.improvement);
        CHECK(std::abs(cert.reconstructed - cert.improvement) <= 1e-6 * scale);
        // H dominates the u2 leg of the optimal certificate, and optimality
        // forces their mu2-expectations together
        CHECK(cert.expected_gap_H >= cert.expected_u2 - 1e-7);
        CHECK(std::abs(cert.expected_gap_H - cert.expected_u2) <= 1e-7 * scale);
    }
}
