#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "mot/json_io.hpp"
#include "mot/measure.hpp"

using namespace mot;

namespace {

DiscreteMeasure coin() { return DiscreteMeasure::make({-1.0, 1.0}, {0.5, 0.5}); }

// Exact call price of U[a,b].
double uniform_call(double a, double b, double k) {
    if (k <= a) return 0.5 * (a + b) - k;
    if (k >= b) return 0.0;
    return (b - k) * (b - k) / (2.0 * (b - a));
}

}  // namespace

TEST_CASE("make canonicalizes input") {
    const auto m = DiscreteMeasure::make({1.0, -1.0}, {0.25, 0.75});
    CHECK(m.atoms[0] == -1.0);
    CHECK(m.weights[0] == 0.75);

    CHECK_THROWS_AS(DiscreteMeasure::make({0.0}, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure::make({0.0, 1.0}, {1.2, -0.2}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure::make({}, {}), std::invalid_argument);

    // coincident atoms merge, zero weights are pruned
    const auto merged = DiscreteMeasure::make({0.0, 0.0, 3.0}, {0.25, 0.25, 0.5});
    CHECK(merged.size() == 2);
    CHECK(merged.weights[0] == doctest::Approx(0.5));
    const auto pruned = DiscreteMeasure::make({0.0, 1.0, 2.0}, {0.5, 0.0, 0.5});
    CHECK(pruned.size() == 2);
}

TEST_CASE("mean") {
    CHECK(mean(coin()) == doctest::Approx(0.0));
    CHECK(mean(DiscreteMeasure::point_mass(100.0)) == 100.0);
}

TEST_CASE("call_price") {
    CHECK(call_price(coin(), 0.0) == doctest::Approx(0.5));
    // below the support the payoff is linear
    const auto m = DiscreteMeasure::make({2.0, 5.0, 9.0}, {0.2, 0.5, 0.3});
    CHECK(call_price(m, 1.0) == doctest::Approx(mean(m) - 1.0));
    CHECK(call_price(m, 100.0) == 0.0);
}

TEST_CASE("call_price is convex and nonincreasing on the atom grid") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> atoms;
        std::vector<double> weights;
        const int n = 2 + static_cast<int>(ud(rng) * 6);
        double x = ud(rng) * 10.0;
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            atoms.push_back(x);
            x += 0.1 + ud(rng) * 5.0;
            weights.push_back(0.05 + ud(rng));
            total += weights.back();
        }
        for (auto& w : weights) w /= total;
        const auto m = DiscreteMeasure::make(atoms, weights);
        for (std::size_t j = 0; j + 1 < m.size(); ++j) {
            CHECK(call_price(m, m.atoms[j + 1]) <= call_price(m, m.atoms[j]) + 1e-12);
        }
        for (std::size_t j = 1; j + 1 < m.size(); ++j) {
            const double dl = m.atoms[j] - m.atoms[j - 1];
            const double dr = m.atoms[j + 1] - m.atoms[j];
            const double chord = call_price(m, m.atoms[j - 1]) * dr / (dl + dr) +
                                 call_price(m, m.atoms[j + 1]) * dl / (dl + dr);
            CHECK(call_price(m, m.atoms[j]) <= chord + 1e-12);
        }
    }
}

TEST_CASE("convex_order_leq") {
    const auto m = DiscreteMeasure::make({1.0, 4.0}, {0.5, 0.5});
    CHECK(convex_order_leq(m, m));

    const auto wide = DiscreteMeasure::make({-2.0, 2.0}, {0.5, 0.5});
    CHECK(convex_order_leq(coin(), wide));
    CHECK_FALSE(convex_order_leq(wide, coin()));  // call at 0: 1 vs 0.5

    // different means fail outright
    CHECK_FALSE(convex_order_leq(m, DiscreteMeasure::point_mass(3.0)));
}

TEST_CASE("quantize uniform") {
    const auto q2 = quantize(ContinuousLawSpec::uniform(-1.0, 1.0), 2);
    REQUIRE(q2.size() == 2);
    CHECK(q2.atoms[0] == doctest::Approx(-0.5));
    CHECK(q2.atoms[1] == doctest::Approx(0.5));
    CHECK(q2.weights[0] == doctest::Approx(0.5));

    const auto q4 = quantize(ContinuousLawSpec::uniform(-2.0, 2.0), 4);
    REQUIRE(q4.size() == 4);
    CHECK(q4.atoms[0] == doctest::Approx(-1.5));
    CHECK(q4.atoms[3] == doctest::Approx(1.5));
    CHECK(q4.weights[2] == doctest::Approx(0.25));

    const auto tp = quantize(ContinuousLawSpec::two_point(-1.0, 1.0), 17);
    CHECK(tp.atoms == std::vector<double>{-1.0, 1.0});

    CHECK_THROWS_AS(quantize(ContinuousLawSpec::uniform(0.0, 1.0), 0), std::invalid_argument);
}

TEST_CASE("quantized uniform is dominated in convex order by the exact law") {
    for (std::size_t n : {1u, 2u, 5u, 33u, 200u}) {
        const auto q = quantize(ContinuousLawSpec::uniform(-1.5, 2.5), n);
        CHECK(mean(q) == doctest::Approx(0.5));
        for (double k : q.atoms) {
            CHECK(call_price(q, k) <= uniform_call(-1.5, 2.5, k) + 1e-12);
        }
    }
}

TEST_CASE("binomial_marginal") {
    const auto one = binomial_marginal(100.0, 1);
    CHECK(one.atoms == std::vector<double>{99.0, 101.0});
    CHECK(one.weights[0] == doctest::Approx(0.5));

    const auto two = binomial_marginal(100.0, 2);
    CHECK(two.atoms == std::vector<double>{98.0, 100.0, 102.0});
    CHECK(two.weights[1] == doctest::Approx(0.5));
    CHECK(two.weights[2] == doctest::Approx(0.25));

    const auto zero = binomial_marginal(100.0, 0);
    CHECK(zero.size() == 1);
    CHECK(zero.atoms[0] == 100.0);

    for (int k = 1; k <= 6; ++k) {
        CHECK(mean(binomial_marginal(100.0, k)) == doctest::Approx(100.0));
        CHECK(convex_order_leq(binomial_marginal(100.0, k - 1), binomial_marginal(100.0, k),
                               1e-10));
    }
}

TEST_CASE("convex_interpolate") {
    const auto delta0 = DiscreteMeasure::point_mass(0.0);
    const RealMap down = [](double x) { return x - 1.0; };
    const RealMap up = [](double x) { return x + 1.0; };

    const auto half = convex_interpolate(delta0, down, up, 0.5);
    REQUIRE(half.size() == 2);
    CHECK(half.atoms[0] == doctest::Approx(-0.5));
    CHECK(half.atoms[1] == doctest::Approx(0.5));
    CHECK(half.weights[0] == doctest::Approx(0.5));

    const auto m = DiscreteMeasure::make({-1.0, 0.0, 2.0}, {0.25, 0.5, 0.25});
    const auto at0 = convex_interpolate(m, down, up, 0.0);
    REQUIRE(at0.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(at0.atoms[i] == doctest::Approx(m.atoms[i]));
        CHECK(at0.weights[i] == doctest::Approx(m.weights[i]));
    }

    // identity corridor keeps the measure fixed for every t
    const RealMap ident = [](double x) { return x; };
    const auto fixed = convex_interpolate(m, ident, ident, 0.7);
    CHECK(fixed.size() == m.size());

    const RealMap bad = [](double x) { return x - 1.0; };
    CHECK_THROWS_AS(convex_interpolate(m, ident, bad, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(convex_interpolate(m, down, up, 1.5), std::invalid_argument);
}

TEST_CASE("convex_interpolate preserves the mean and interpolates in convex order") {
    const auto m = DiscreteMeasure::make({-1.0, 0.5, 2.0}, {0.25, 0.5, 0.25});
    const RealMap down = [](double x) { return x - 0.5 - 0.1 * std::abs(x); };
    const RealMap up = [](double x) { return x + 1.0; };
    const auto at1 = convex_interpolate(m, down, up, 1.0);
    for (double t : {0.0, 0.1, 0.35, 0.8, 1.0}) {
        const auto mid = convex_interpolate(m, down, up, t);
        CHECK(mean(mid) == doctest::Approx(mean(m)).epsilon(1e-12));
        CHECK(convex_order_leq(m, mid, 1e-10));
        CHECK(convex_order_leq(mid, at1, 1e-10));
    }
}

TEST_CASE("mixture") {
    const auto m1 = DiscreteMeasure::point_mass(0.0);
    const auto m2 = coin();
    const auto mid = mixture(m1, m2, 0.5);
    REQUIRE(mid.size() == 3);
    CHECK(mid.atoms == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(mid.weights[0] == doctest::Approx(0.25));
    CHECK(mid.weights[1] == doctest::Approx(0.5));

    const auto at0 = mixture(m1, m2, 0.0);
    CHECK(at0.size() == 1);
    const auto at1 = mixture(m1, m2, 1.0);
    CHECK(at1.size() == 2);

    // mean interpolates; with equal means the mixture sits between in convex order
    const auto a = DiscreteMeasure::make({-1.0, 1.0}, {0.5, 0.5});
    const auto b = DiscreteMeasure::make({-3.0, 3.0}, {0.5, 0.5});
    for (double t : {0.2, 0.6}) {
        const auto mix = mixture(a, b, t);
        CHECK(mean(mix) == doctest::Approx((1.0 - t) * mean(a) + t * mean(b)));
        CHECK(convex_order_leq(a, mix, 1e-10));
        CHECK(convex_order_leq(mix, b, 1e-10));
    }
}

TEST_CASE("json round trip") {
    const auto m = DiscreteMeasure::make({-1.0, 0.25, 3.5}, {0.25, 0.5, 0.25});
    const auto j = to_json(m);
    CHECK(j.at("atoms").size() == 3);
    const auto back = measure_from_json(j);
    CHECK(back.atoms == m.atoms);
    CHECK(back.weights == m.weights);

    Json bad = {{"atoms", {0.0, 1.0}}, {"weights", {0.9, 0.3}}};
    CHECK_THROWS_AS(measure_from_json(bad), std::invalid_argument);
}
