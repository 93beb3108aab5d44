#include <doctest.h>

#include <cmath>
#include <vector>

#include "riskbounds/distribution.hpp"
#include "riskbounds/errors.hpp"
#include "riskbounds/functionals.hpp"
#include "riskbounds/interval_set.hpp"

using namespace riskbounds;

namespace {

std::vector<Distribution> suite() {
    return {Distribution::uniform(0.0, 1.0),
            Distribution::exponential(1.0),
            Distribution::pareto(3.0),
            Distribution::normal(0.0, 1.0),
            Distribution::lognormal(0.0, 0.5),
            Distribution::triangular(0.0, 1.0, 2.0),
            Distribution::power_law(2.0)};
}

} // namespace

TEST_CASE("interval sets normalize, merge and reject bad endpoints") {
    IntervalSet I({{0.6, 0.9}, {0.1, 0.3}, {0.3, 0.4}, {0.5, 0.5}});
    REQUIRE(I.intervals().size() == 2);
    CHECK(I.intervals()[0].first == doctest::Approx(0.1));
    CHECK(I.intervals()[0].second == doctest::Approx(0.4));
    CHECK(I.total_length() == doctest::Approx(0.6));
    CHECK(I.lower() == doctest::Approx(0.1));
    CHECK(I.upper() == doctest::Approx(0.9));
    CHECK_FALSE(I.touches_one());
    CHECK(IntervalSet(0.5, 1.0).touches_one());
    CHECK_THROWS_AS(IntervalSet(-0.1, 0.5), InvalidProbability);
    CHECK_THROWS_AS(IntervalSet(0.2, 1.2), InvalidProbability);
    CHECK_THROWS_AS(IntervalSet().lower(), EmptyIntervalSet);
    CHECK_THROWS_AS(avg_quantile(Distribution::uniform(0, 1), IntervalSet()),
                    EmptyIntervalSet);
}

TEST_CASE("closed-form averaged quantiles match frozen values") {
    // Values fixed beforehand from the analytic antiderivatives.
    CHECK(avg_quantile(Distribution::uniform(0, 1), IntervalSet(0.9, 1.0)) ==
          doctest::Approx(0.95).epsilon(1e-12));
    CHECK(avg_quantile(Distribution::exponential(1.0), IntervalSet(0.5, 1.0)) ==
          doctest::Approx(1.6931471805599454).epsilon(1e-12));
    CHECK(avg_quantile(Distribution::exponential(1.0), IntervalSet(0.0, 0.5)) ==
          doctest::Approx(0.3068528194400547).epsilon(1e-12));
    CHECK(avg_quantile(Distribution::exponential(1.0),
                       IntervalSet({{0.25, 0.5}, {0.75, 0.9}})) ==
          doctest::Approx(0.9637576125985781).epsilon(1e-12));
    CHECK(avg_quantile(Distribution::pareto(2.0), IntervalSet(0.0, 0.75)) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(avg_quantile(Distribution::normal(0, 1), IntervalSet(0.5, 1.0)) ==
          doctest::Approx(0.7978845608028654).epsilon(1e-12));
    CHECK(avg_quantile(Distribution::lognormal(0, 1), IntervalSet(0.5, 1.0)) ==
          doctest::Approx(2.7742859576700094).epsilon(1e-10));
    CHECK(Distribution::lognormal(0, 1).mean() ==
          doctest::Approx(1.6487212707001282).epsilon(1e-12));
    CHECK(avg_quantile(Distribution::triangular(0, 1, 2), IntervalSet(0.0, 0.5)) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(Distribution::power_law(2.0).mean() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(Distribution::point_mass(3.5).mean() == doctest::Approx(3.5));
}

TEST_CASE("rvar uses the window [1-beta-alpha, 1-beta]") {
    CHECK(rvar(Distribution::exponential(1.0), 0.0, 0.5) ==
          doctest::Approx(1.6931471805599454));
    CHECK(rvar(Distribution::uniform(0, 1), 0.05, 0.05) == doctest::Approx(0.925));
    CHECK_THROWS_AS(rvar(Distribution::uniform(0, 1), 0.6, 0.5), InvalidProbability);
}

TEST_CASE("empirical quantiles and integrals are exact finite sums") {
    std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    auto d = Distribution::empirical(xs);
    CHECK(d.quantile_left(0.25) == 3.0);
    CHECK(d.quantile_left(0.2) == 2.0);
    CHECK(d.quantile_right(0.2) == 3.0);
    CHECK(d.quantile_left(1.0) == 10.0);
    CHECK(d.quantile_right(0.0) == 1.0);
    CHECK(d.quantile_integral(0.25) == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(avg_quantile(d, IntervalSet(0.0, 0.2)) == 1.5);
    CHECK(d.mean() == doctest::Approx(5.5));
    CHECK(d.cdf(3.0) == doctest::Approx(0.3));
    CHECK(d.cdf_left(3.0) == doctest::Approx(0.2));

    CHECK(empirical_quantile_left(xs, 0.25) == 3.0);
    CHECK(empirical_quantile_right(xs, 0.2) == 3.0);
    CHECK(empirical_avg_quantile(xs, IntervalSet(0.0, 0.2)) == 1.5);
}

TEST_CASE("tail transforms compose quantiles of the base distribution") {
    auto u = Distribution::uniform(0.0, 1.0);
    auto up = tail_upper(u, 0.5);
    CHECK(up.quantile_left(0.5) == doctest::Approx(0.75));
    CHECK(up.mean() == doctest::Approx(0.75));
    auto lo = tail_lower(Distribution::exponential(1.0), 0.5);
    CHECK(lo.mean() == doctest::Approx(1.0 - std::log(2.0)));

    for (const auto& d : suite()) {
        const double r = 0.3;
        auto t = tail_upper(d, r);
        for (double a : {0.1, 0.4}) {
            const double b = a + 0.3;
            const double lhs = avg_quantile(t, IntervalSet(a, b));
            const double rhs =
                avg_quantile(d, IntervalSet(r + (1 - r) * a, r + (1 - r) * b));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
        auto tl = tail_lower(d, 0.7);
        const double lhs = avg_quantile(tl, IntervalSet(0.2, 0.6));
        const double rhs = avg_quantile(d, IntervalSet(0.14, 0.42));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("negation mirrors the quantile function") {
    auto n = negate(Distribution::exponential(1.0));
    CHECK(n.quantile_left(0.5) == doctest::Approx(std::log(0.5)));
    CHECK(n.mean() == doctest::Approx(-1.0));
    for (const auto& d : suite()) {
        auto nd = negate(d);
        const double lhs = avg_quantile(nd, IntervalSet(0.2, 0.45));
        const double rhs = -avg_quantile(d, IntervalSet(0.55, 0.8));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("shift translates every functional") {
    for (const auto& d : suite()) {
        auto sd = shift(d, 2.5);
        IntervalSet I({{0.1, 0.3}, {0.6, 0.8}});
        CHECK(avg_quantile(sd, I) == doctest::Approx(avg_quantile(d, I) + 2.5).epsilon(1e-12));
        CHECK(sd.mean() == doctest::Approx(d.mean() + 2.5).epsilon(1e-12));
    }
}

TEST_CASE("window decomposition recovers the mean") {
    for (const auto& d : suite()) {
        for (double p : {0.1, 0.35, 0.5, 0.8}) {
            const double lhs = p * avg_quantile(d, IntervalSet(0.0, p)) +
                               (1 - p) * avg_quantile(d, IntervalSet(p, 1.0));
            CHECK(lhs == doctest::Approx(d.mean()).epsilon(1e-10));
        }
    }
}

TEST_CASE("window averages are monotone in the window location") {
    for (const auto& d : suite()) {
        double prev = avg_quantile(d, IntervalSet(0.0, 0.25));
        for (double a : {0.25, 0.5, 0.7}) {
            const double cur = avg_quantile(d, IntervalSet(a, a + 0.25));
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("quadrature agrees with the closed forms") {
    for (const auto& d : suite()) {
        for (const IntervalSet& I :
             {IntervalSet(0.1, 0.6), IntervalSet({{0.05, 0.2}, {0.7, 0.95}})}) {
            const double cf = avg_quantile(d, I);
            const double q = avg_quantile_quadrature(d, I, 1e-10);
            CHECK(q == doctest::Approx(cf).epsilon(1e-8));
        }
    }
}

TEST_CASE("iqd reads one-sided quantiles") {
    auto d = Distribution::empirical({1, 1, 2, 2});
    // at t = 0.5 the left quantile is 1 and the right quantile is 2
    CHECK(iqd(d, 0.5, 0.5) == doctest::Approx(1.0));
    CHECK(iqd(d, 0.5, 0.5, false, false) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(iqd(d, 0.0, 0.5), InvalidProbability);
}

TEST_CASE("probability level domains are enforced") {
    auto d = Distribution::uniform(0, 1);
    CHECK_THROWS_AS(d.quantile_left(0.0), InvalidProbability);
    CHECK_THROWS_AS(d.quantile_right(1.0), InvalidProbability);
    CHECK_THROWS_AS(d.quantile_integral(1.5), InvalidProbability);
    CHECK_THROWS_AS(Distribution::uniform(1, 0), InvalidParams);
    CHECK_THROWS_AS(Distribution::exponential(0.0), InvalidParams);
    CHECK_THROWS_AS(Distribution::empirical({}), InvalidParams);
}

TEST_CASE("heavy upper tails refuse integration up to one") {
    auto p = Distribution::pareto(0.8);
    CHECK_FALSE(p.mean_finite());
    CHECK_THROWS_AS(p.quantile_integral(1.0), NonIntegrableTail);
    CHECK_THROWS_AS(avg_quantile(p, IntervalSet(0.5, 1.0)), NonIntegrableTail);
    CHECK(avg_quantile(p, IntervalSet(0.5, 0.9)) > 0.0); // interior windows are fine
}

TEST_CASE("density direction spot check is a diagnostic only") {
    CHECK(density_direction_estimate(Distribution::exponential(1.0), 0.05, 0.95) ==
          Direction::decreasing);
    CHECK(density_direction_estimate(Distribution::power_law(2.0), 0.05, 0.95) ==
          Direction::increasing);
    CHECK(density_direction_estimate(Distribution::uniform(0, 1), 0.05, 0.95) ==
          Direction::none);
    CHECK(density_direction_estimate(Distribution::normal(0, 1), 0.05, 0.45) ==
          Direction::increasing);
}

TEST_CASE("declared tail metadata survives transforms") {
    TailMonotonicity t;
    t.upper = Direction::decreasing;
    t.upper_threshold = 0.8;
    t.lower = Direction::increasing;
    t.lower_threshold = 0.2;
    auto d = Distribution::exponential(1.0).with_tails(t);
    CHECK(d.tails().upper == Direction::decreasing);
    auto nd = negate(d);
    CHECK(nd.tails().lower == Direction::increasing);
    CHECK(nd.tails().lower_threshold == doctest::Approx(0.2));
    CHECK(nd.tails().upper == Direction::decreasing);
    CHECK(nd.tails().upper_threshold == doctest::Approx(0.8));
    auto td = tail_upper(d, 0.5);
    CHECK(td.tails().upper == Direction::decreasing);
    CHECK(td.tails().upper_threshold == doctest::Approx(0.6));
}

TEST_CASE("quantile continuity flag") {
    CHECK(Distribution::normal(0, 1).quantile_continuous());
    CHECK_FALSE(Distribution::empirical({1, 2}).quantile_continuous());
    CHECK(negate(Distribution::uniform(0, 1)).quantile_continuous());
}
