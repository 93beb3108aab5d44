#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "riskbounds/errors.hpp"
#include "riskbounds/simplex.hpp"

using namespace riskbounds;

namespace {

// Independent reference: bisection on the Lagrange multiplier of the
// simplex projection.
std::vector<double> project_reference(std::vector<double> v, double z) {
    double lo = -1e6, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
        const double theta = 0.5 * (lo + hi);
        double s = 0.0;
        for (double x : v) s += std::max(x - theta, 0.0);
        if (s > z) lo = theta; else hi = theta;
    }
    const double theta = 0.5 * (lo + hi);
    for (double& x : v) x = std::max(x - theta, 0.0);
    return v;
}

double coord(const SimplexPoint& p, int i) { return i == 0 ? p.beta0 : p.betas[i - 1]; }

} // namespace

TEST_CASE("projection matches the frozen reference points") {
    SimplexConstraint c{2, 1.0, 0.0};
    auto p = project({-1.0, -2.0, -3.0}, c);
    CHECK(p.beta0 == doctest::Approx(1.0));
    CHECK(p.betas[0] == doctest::Approx(0.0));
    CHECK(p.betas[1] == doctest::Approx(0.0));

    auto q = project({-1.0, -1.0, -1.0}, c);
    CHECK(q.beta0 == doctest::Approx(1.0 / 3.0));
    CHECK(q.betas[0] == doctest::Approx(1.0 / 3.0));
    CHECK(q.betas[1] == doctest::Approx(1.0 / 3.0));

    auto r = project({0.2, 0.9, 0.4}, c);
    CHECK(r.beta0 == doctest::Approx(0.2 - 0.5 / 3.0));
    CHECK(r.betas[0] == doctest::Approx(0.9 - 0.5 / 3.0));
    CHECK(r.betas[1] == doctest::Approx(0.4 - 0.5 / 3.0));
}

TEST_CASE("projection respects the beta0 floor") {
    SimplexConstraint c{2, 1.0, 0.5};
    auto p = project({0.0, 10.0, 0.0}, c);
    CHECK(p.beta0 == doctest::Approx(0.5));
    CHECK(p.betas[0] == doctest::Approx(0.5));
    CHECK(p.betas[1] == doctest::Approx(0.0));
}

TEST_CASE("projection agrees with a multiplier bisection on random input") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    SimplexConstraint c{4, 0.8, 0.0};
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> raw(5);
        for (double& x : raw) x = u(rng);
        auto p = project(raw, c);
        auto ref = project_reference(raw, 0.8);
        double sum = p.beta0;
        CHECK(p.beta0 == doctest::Approx(ref[0]).epsilon(1e-7));
        for (int i = 0; i < 4; ++i) {
            CHECK(p.betas[i] == doctest::Approx(ref[i + 1]).epsilon(1e-7));
            sum += p.betas[i];
        }
        CHECK(sum == doctest::Approx(0.8).epsilon(1e-12));
    }
}

TEST_CASE("minimizer recovers a known quadratic optimum") {
    SimplexConstraint c{2, 1.0, 0.1};
    const std::vector<double> target{0.3, 0.5, 0.2};
    auto f = [&](const SimplexPoint& p) {
        double s = 0.0;
        for (int i = 0; i <= 2; ++i) {
            const double d = coord(p, i) - target[i];
            s += d * d;
        }
        return s;
    };
    auto res = minimize(f, c);
    CHECK(res.value == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(res.argpoint.beta0 == doctest::Approx(0.3).epsilon(1e-5));
    CHECK(res.argpoint.betas[0] == doctest::Approx(0.5).epsilon(1e-5));
    CHECK_FALSE(res.beta0_at_bound);
}

TEST_CASE("high-dimensional search still locates the optimum") {
    SimplexConstraint c{5, 1.0, 0.0};
    const std::vector<double> target{0.1, 0.3, 0.05, 0.25, 0.2, 0.1};
    auto f = [&](const SimplexPoint& p) {
        double s = 0.0;
        for (int i = 0; i <= 5; ++i) {
            const double d = coord(p, i) - target[i];
            s += d * d;
        }
        return s;
    };
    auto res = minimize(f, c);
    CHECK(res.value == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("results are deterministic for a fixed seed") {
    SimplexConstraint c{5, 1.0, 0.0};
    auto f = [](const SimplexPoint& p) {
        double s = std::sin(7.0 * p.beta0);
        for (std::size_t i = 0; i < p.betas.size(); ++i)
            s += std::cos((3.0 + i) * p.betas[i]);
        return s;
    };
    auto a = minimize(f, c);
    auto b = minimize(f, c);
    CHECK(a.value == b.value);
    CHECK(a.argpoint.beta0 == b.argpoint.beta0);
    CHECK(a.argpoint.betas == b.argpoint.betas);
}

TEST_CASE("boundary optima raise the beta0 flag") {
    SimplexConstraint c{2, 1.0, 0.25};
    auto res = minimize([](const SimplexPoint& p) { return p.beta0; }, c);
    CHECK(res.argpoint.beta0 == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(res.beta0_at_bound);
    auto res2 = maximize([](const SimplexPoint& p) { return p.beta0; }, c);
    CHECK(res2.argpoint.beta0 == doctest::Approx(1.0));
    CHECK(res2.beta0_at_bound);
    CHECK(res2.value == doctest::Approx(1.0));
}

TEST_CASE("feasible points always satisfy the mass constraint") {
    SimplexConstraint c{3, 0.6, 0.2};
    auto f = [&](const SimplexPoint& p) {
        double sum = p.beta0;
        for (double b : p.betas) sum += b;
        CHECK(sum == doctest::Approx(0.6).epsilon(1e-9));
        CHECK(p.beta0 >= 0.2 - 1e-12);
        for (double b : p.betas) CHECK(b >= -1e-15);
        return (p.beta0 - 0.4) * (p.beta0 - 0.4);
    };
    auto res = minimize(f, c);
    CHECK(res.argpoint.beta0 == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("batch evaluation matches pointwise evaluation") {
    auto f = [](const SimplexPoint& p) { return p.beta0 * 2.0 + p.betas[0]; };
    SimplexConstraint c{1, 1.0, 0.0};
    std::vector<SimplexPoint> pts{project({0.5, 0.5}, c), project({0.9, 0.1}, c)};
    auto vals = batch_evaluate(f, pts);
    REQUIRE(vals.size() == 2);
    CHECK(vals[0] == doctest::Approx(f(pts[0])));
    CHECK(vals[1] == doctest::Approx(f(pts[1])));
}

TEST_CASE("infeasible constraints are rejected") {
    CHECK_THROWS_AS(minimize([](const SimplexPoint&) { return 0.0; },
                             SimplexConstraint{0, 1.0, 0.0}),
                    InfeasibleConstraint);
    CHECK_THROWS_AS(minimize([](const SimplexPoint&) { return 0.0; },
                             SimplexConstraint{2, 1.5, 0.0}),
                    InfeasibleConstraint);
    CHECK_THROWS_AS(minimize([](const SimplexPoint&) { return 0.0; },
                             SimplexConstraint{2, 0.5, 0.7}),
                    InfeasibleConstraint);
    CHECK_THROWS_AS(project({0.0, 0.0}, SimplexConstraint{2, 1.0, 0.0}), ShapeMismatch);
}
