#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mot/lp.hpp"

using namespace mot;

TEST_CASE("min x subject to x >= 3") {
    LinearProgram lp;
    lp.add_variable(1.0);
    lp.add_row(Relation::greater_equal, 3.0);
    lp.add_entry(0, 0, 1.0);

    const auto sol = solve(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(3.0));
    CHECK(sol.primal[0] == doctest::Approx(3.0));
    CHECK(sol.dual[0] == doctest::Approx(1.0));
}

TEST_CASE("max x+y subject to x+y <= 1") {
    LinearProgram lp;
    lp.sense = Sense::maximize;
    lp.add_variable(1.0);
    lp.add_variable(1.0);
    lp.add_row(Relation::less_equal, 1.0);
    lp.add_entry(0, 0, 1.0);
    lp.add_entry(0, 1, 1.0);

    const auto sol = solve(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(1.0));
    CHECK(sol.dual[0] == doctest::Approx(1.0));
}

TEST_CASE("transport between two fair coins with cost |x-y|") {
    // Coupling of U({0,1}) with itself; the identity coupling costs 0.
    LinearProgram lp;
    const double xs[2] = {0.0, 1.0};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            lp.add_variable(std::abs(xs[i] - xs[j]));
        }
    }
    for (int i = 0; i < 2; ++i) {
        const int row = lp.add_row(Relation::equal, 0.5);
        lp.add_entry(row, 2 * i, 1.0);
        lp.add_entry(row, 2 * i + 1, 1.0);
    }
    for (int j = 0; j < 2; ++j) {
        const int row = lp.add_row(Relation::equal, 0.5);
        lp.add_entry(row, j, 1.0);
        lp.add_entry(row, 2 + j, 1.0);
    }

    const auto sol = solve(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    // brute force over the two extreme couplings of the Birkhoff square
    const double identity_cost = 0.0;
    const double swap_cost = 1.0;
    CHECK(sol.objective == doctest::Approx(std::min(identity_cost, swap_cost)));
    CHECK(sol.primal[0] == doctest::Approx(0.5));
    CHECK(sol.primal[3] == doctest::Approx(0.5));
}

TEST_CASE("infeasible and unbounded detection") {
    LinearProgram infeasible;
    infeasible.add_variable(1.0);
    infeasible.add_row(Relation::less_equal, -1.0);
    infeasible.add_entry(0, 0, 1.0);  // x <= -1 with x >= 0
    CHECK(solve(infeasible).status == LpStatus::infeasible);

    LinearProgram unbounded;
    unbounded.add_variable(-1.0);
    unbounded.add_row(Relation::greater_equal, 0.0);
    unbounded.add_entry(0, 0, 1.0);
    CHECK(solve(unbounded).status == LpStatus::unbounded);
}

TEST_CASE("equality rows, shifted lower bounds and finite upper bounds") {
    // min 2x + y  s.t.  x + y = 4, 1 <= x <= 3, 0 <= y <= 5
    LinearProgram lp;
    lp.add_variable(2.0, 1.0, 3.0);
    lp.add_variable(1.0, 0.0, 5.0);
    lp.add_row(Relation::equal, 4.0);
    lp.add_entry(0, 0, 1.0);
    lp.add_entry(0, 1, 1.0);

    const auto sol = solve(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(5.0));
    CHECK(sol.primal[0] == doctest::Approx(1.0));
    CHECK(sol.primal[1] == doctest::Approx(3.0));
}

TEST_CASE("random degenerate transport problems satisfy duality and feasibility") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const int na = 2 + static_cast<int>(ud(rng) * 4);
        const int nb = 2 + static_cast<int>(ud(rng) * 4);
        std::vector<double> wa(na), wb(nb);
        double sa = 0.0, sb = 0.0;
        for (auto& w : wa) sa += (w = 0.1 + ud(rng));
        for (auto& w : wb) sb += (w = 0.1 + ud(rng));
        for (auto& w : wa) w /= sa;
        for (auto& w : wb) w /= sb;

        LinearProgram lp;
        lp.sense = rep % 2 == 0 ? Sense::minimize : Sense::maximize;
        for (int i = 0; i < na; ++i) {
            for (int j = 0; j < nb; ++j) {
                lp.add_variable(std::floor(10.0 * ud(rng)));  // many cost ties
            }
        }
        for (int i = 0; i < na; ++i) {
            const int row = lp.add_row(Relation::equal, wa[static_cast<std::size_t>(i)]);
            for (int j = 0; j < nb; ++j) lp.add_entry(row, i * nb + j, 1.0);
        }
        for (int j = 0; j < nb; ++j) {
            const int row = lp.add_row(Relation::equal, wb[static_cast<std::size_t>(j)]);
            for (int i = 0; i < na; ++i) lp.add_entry(row, i * nb + j, 1.0);
        }

        const auto sol = solve(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.max_primal_residual <= 1e-9);
        CHECK(sol.duality_gap <= 1e-8 * (1.0 + std::abs(sol.objective)));
        CHECK(sol.complementarity <= 1e-8 * (1.0 + std::abs(sol.objective)));
        // reduced costs certify optimality
        for (double d : sol.reduced_cost) {
            if (lp.sense == Sense::minimize) {
                CHECK(d >= -1e-7);
            } else {
                CHECK(d <= 1e-7);
            }
        }
    }
}

TEST_CASE("determinism: identical programs give identical results") {
    auto build = [] {
        LinearProgram lp;
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        for (int j = 0; j < 12; ++j) lp.add_variable(std::floor(5.0 * ud(rng)));
        for (int i = 0; i < 4; ++i) {
            const int row = lp.add_row(Relation::equal, 0.25);
            for (int j = 0; j < 3; ++j) lp.add_entry(row, 3 * i + j, 1.0);
        }
        for (int j = 0; j < 3; ++j) {
            const int row = lp.add_row(Relation::less_equal, 0.9);
            for (int i = 0; i < 4; ++i) lp.add_entry(row, 3 * i + j, 1.0);
        }
        return lp;
    };
    const auto a = solve(build());
    const auto b = solve(build());
    CHECK(a.iterations == b.iterations);
    CHECK(a.objective == b.objective);
    CHECK(a.primal == b.primal);
    CHECK(a.dual == b.dual);
}

TEST_CASE("pivot budget exhaustion raises SolverStalled") {
    LinearProgram lp;
    for (int j = 0; j < 6; ++j) lp.add_variable(j % 2 == 0 ? 1.0 : -1.0);
    for (int i = 0; i < 3; ++i) {
        const int row = lp.add_row(Relation::less_equal, 1.0);
        for (int j = 0; j < 6; ++j) lp.add_entry(row, j, (i + j) % 3 == 0 ? 1.0 : 0.5);
    }
    SolveOptions opts;
    opts.max_iterations = 1;
    CHECK_THROWS_AS(solve(lp, opts), SolverStalled);
}

TEST_CASE("MPS export is a stable golden string") {
    LinearProgram lp;
    lp.add_variable(1.5);
    lp.add_variable(-2.0, 0.5, 4.0);
    lp.add_row(Relation::less_equal, 10.0);
    lp.add_row(Relation::equal, 1.0);
    lp.add_entry(0, 0, 3.0);
    lp.add_entry(0, 1, 1.0);
    lp.add_entry(1, 1, -1.0);

    std::ostringstream os;
    write_mps(lp, os, "TINY");
    const std::string expected =
        "NAME          TINY\n"
        "ROWS\n"
        " N  COST\n"
        " L  R0000000\n"
        " E  R0000001\n"
        "COLUMNS\n"
        "    C0000000  COST      1.500000000000E+00\n"
        "    C0000000  R0000000  3.000000000000E+00\n"
        "    C0000001  COST      -2.000000000000E+00\n"
        "    C0000001  R0000000  1.000000000000E+00\n"
        "    C0000001  R0000001  -1.000000000000E+00\n"
        "RHS\n"
        "    RHS       R0000000  1.000000000000E+01\n"
        "    RHS       R0000001  1.000000000000E+00\n"
        "BOUNDS\n"
        " LO BND       C0000001  5.000000000000E-01\n"
        " UP BND       C0000001  4.000000000000E+00\n"
        "ENDATA\n";
    CHECK(os.str() == expected);
}

#include "oracle.hpp"

TEST_CASE("general-form programs match exact enumeration after manual standardization") {
    // Random bounded programs with mixed relations, nonzero lower bounds and
    // finite upper bounds. The test converts them to equality form itself
    // (slack per inequality, bound row per variable, lower-bound shift) and
    // enumerates all basic solutions in rational arithmetic, so it exercises
    // the solver's standardization path end to end.
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    auto step = [&](double lo, double hi, double grid) {
        return lo + grid * std::floor(ud(rng) * ((hi - lo) / grid + 1.0));
    };

    int infeasible_seen = 0;
    for (int rep = 0; rep < 30; ++rep) {
        const int n = 2 + static_cast<int>(ud(rng) * 3.0);
        const int m = 1 + static_cast<int>(ud(rng) * 3.0);

        LinearProgram lp;
        lp.sense = rep % 2 == 0 ? Sense::minimize : Sense::maximize;
        for (int j = 0; j < n; ++j) {
            const double lo = step(-1.0, 1.0, 0.5);
            lp.add_variable(step(-3.0, 3.0, 0.5), lo, lo + step(0.5, 2.5, 0.5));
        }
        for (int i = 0; i < m; ++i) {
            const int r = static_cast<int>(ud(rng) * 3.0);
            lp.add_row(r == 0 ? Relation::less_equal
                              : r == 1 ? Relation::equal : Relation::greater_equal,
                       step(-2.0, 4.0, 0.5));
            for (int j = 0; j < n; ++j) {
                const double v = step(-2.0, 2.0, 1.0);
                if (v != 0.0) lp.add_entry(i, j, v);
            }
        }

        // equality form over shifted variables x' = x - lower >= 0
        const double sign = lp.sense == Sense::maximize ? -1.0 : 1.0;
        std::vector<std::vector<double>> rows;
        std::vector<double> rhs;
        std::vector<double> cost(static_cast<std::size_t>(n));
        double shift_const = 0.0;
        for (int j = 0; j < n; ++j) {
            cost[static_cast<std::size_t>(j)] = sign * lp.cost[static_cast<std::size_t>(j)];
            shift_const += sign * lp.cost[static_cast<std::size_t>(j)] *
                           lp.lower[static_cast<std::size_t>(j)];
        }
        int n_slack = 0;
        for (int i = 0; i < m; ++i) n_slack += lp.relations[static_cast<std::size_t>(i)] != Relation::equal;
        const int total = n + n_slack + n;  // structural, row slacks, bound slacks
        cost.resize(static_cast<std::size_t>(total), 0.0);

        int slack_at = n;
        for (int i = 0; i < m; ++i) {
            std::vector<double> row(static_cast<std::size_t>(total), 0.0);
            double b = lp.rhs[static_cast<std::size_t>(i)];
            for (const auto& e : lp.entries) {
                if (e.row != i) continue;
                row[static_cast<std::size_t>(e.col)] += e.value;
                b -= e.value * lp.lower[static_cast<std::size_t>(e.col)];
            }
            if (lp.relations[static_cast<std::size_t>(i)] != Relation::equal) {
                row[static_cast<std::size_t>(slack_at++)] =
                    lp.relations[static_cast<std::size_t>(i)] == Relation::less_equal ? 1.0 : -1.0;
            }
            rows.push_back(std::move(row));
            rhs.push_back(b);
        }
        for (int j = 0; j < n; ++j) {
            std::vector<double> row(static_cast<std::size_t>(total), 0.0);
            row[static_cast<std::size_t>(j)] = 1.0;
            row[static_cast<std::size_t>(n + n_slack + j)] = 1.0;
            rows.push_back(std::move(row));
            rhs.push_back(lp.upper[static_cast<std::size_t>(j)] - lp.lower[static_cast<std::size_t>(j)]);
        }

        oracle::RationalLp exact;
        for (const auto& row : rows) {
            exact.rows.emplace_back(row.begin(), row.end());
        }
        exact.rhs.assign(rhs.begin(), rhs.end());
        exact.cost.assign(cost.begin(), cost.end());
        const auto best = oracle::enumerate_min(std::move(exact));

        const auto sol = solve(lp);
        if (!best) {
            CHECK(sol.status == LpStatus::infeasible);
            ++infeasible_seen;
            continue;
        }
        REQUIRE(sol.status == LpStatus::optimal);
        const double expected = sign * (static_cast<double>(*best) + shift_const);
        CHECK(std::abs(sol.objective - expected) <= 1e-9 * (1.0 + std::abs(expected)));
    }
    CHECK(infeasible_seen < 30);  // the draw must include solvable programs
}
