#include <doctest.h>

#include <cmath>
#include <vector>

#include "riskbounds/bounds.hpp"
#include "riskbounds/errors.hpp"
#include "riskbounds/functionals.hpp"

using namespace riskbounds;

namespace {

Distribution declared(Distribution d, Direction on_support) {
    TailMonotonicity t;
    t.on_support = on_support;
    return d.with_tails(t);
}

SearchConfig fast() {
    SearchConfig cfg;
    cfg.coarse_grid_resolution = 10;
    cfg.refine_rounds = 3;
    return cfg;
}

} // namespace

TEST_CASE("explicit rhs reproduces the single-uniform window values") {
    const auto u = Distribution::uniform(0.0, 1.0);
    // Full weight on the middle window: c = 0.
    CHECK(new_rvar_rhs({u}, 0.5, 0.5, {0.0}, {0.5}) == doctest::Approx(0.75).epsilon(1e-12));
    // Full weight on the wings: c = 1.
    CHECK(new_rvar_rhs({u}, 0.0, 0.5, {0.5}, {0.5}) == doctest::Approx(0.25).epsilon(1e-12));
    // Interpolated weight.
    const double v = new_rvar_rhs({u}, 0.25, 0.5, {0.25}, {0.25});
    const double c = (1.0 - 0.25 - 0.25) / 0.5;
    const double mid = avg_quantile(u, IntervalSet(0.5, 0.75));
    const double wing = avg_quantile(u, IntervalSet({{0.25, 0.5}, {0.75, 1.0}}));
    CHECK(v == doctest::Approx(c * wing + (1.0 - c) * mid).epsilon(1e-12));
}

TEST_CASE("explicit rhs rejects malformed splittings") {
    const auto u = Distribution::uniform(0.0, 1.0);
    CHECK_THROWS_AS(new_rvar_rhs({u}, 0.5, 0.5, {0.0, 0.0}, {0.5}), ShapeMismatch);
    CHECK_THROWS_AS(new_rvar_rhs({u}, 0.5, 0.5, {-0.1}, {0.5}), ConstraintViolation);
    CHECK_THROWS_AS(new_rvar_rhs({u}, 0.5, 0.5, {0.0}, {0.0}), ConstraintViolation);
    CHECK_THROWS_AS(new_rvar_rhs({u}, 0.5, 0.4, {0.45}, {0.1}), ConstraintViolation);
    CHECK_THROWS_AS(new_rvar_rhs({u}, 0.5, 0.5, {0.3}, {0.4}), ConstraintViolation);
    CHECK_THROWS_AS(new_rvar_rhs({u}, -0.1, 0.5, {0.0}, {0.5}), InvalidProbability);
    // Windows starting at zero need integrable marginals.
    CHECK_THROWS_AS(new_rvar_rhs({Distribution::pareto(0.8)}, 0.0, 0.5, {0.1}, {0.2}),
                    NonIntegrableTail);
}

TEST_CASE("simplified rhs matches its direct evaluation") {
    const auto e = Distribution::exponential(1.0);
    CHECK(simplified_rhs({e}, 0.0, 1.0, {1.0}) == doctest::Approx(1.0).epsilon(1e-12));
    const auto u = Distribution::uniform(0.0, 1.0);
    const double v = simplified_rhs({u, u}, 0.25, 0.5, {0.2, 0.3});
    const double p1 = avg_quantile(u, IntervalSet({{0.25, 0.45}, {0.7, 1.0}}));
    const double p2 = avg_quantile(u, IntervalSet({{0.25, 0.55}, {0.8, 1.0}}));
    CHECK(v == doctest::Approx(p1 + p2).epsilon(1e-12));
    CHECK_THROWS_AS(simplified_rhs({u, u}, 0.25, 0.5, {0.2, 0.2}), ConstraintViolation);
    CHECK_THROWS_AS(simplified_rhs({u, u}, 0.25, 0.5, {0.0, 0.5}), ConstraintViolation);
}

TEST_CASE("upper bound collapses to the comonotone tail average when the window reaches 1") {
    BoundProblem p{{Distribution::exponential(1.0), Distribution::exponential(1.0)}, 0.5, 0.5};
    auto res = upper_bound_rvar(p, fast());
    // The objective is constant over the feasible set here, so only the
    // value is pinned; the argpoint is a tie-break artifact.
    CHECK(res.value == doctest::Approx(2.0 * (1.0 + std::log(2.0))).epsilon(1e-9));
    auto ref = bllw_upper(p, fast());
    CHECK(ref.value == doctest::Approx(res.value).epsilon(1e-9));
}

TEST_CASE("lower bound for the left half of two exponentials hits the frozen optimum") {
    BoundProblem p{{Distribution::exponential(1.0), Distribution::exponential(1.0)}, 0.0, 0.5};
    auto res = lower_bound_rvar(p);
    CHECK(res.value == doctest::Approx(0.6137056388801094).epsilon(1e-6));
}

TEST_CASE("upper and lower bounds sandwich the comonotone value") {
    std::vector<Distribution> mus{Distribution::uniform(0.0, 2.0),
                                  Distribution::exponential(0.5),
                                  Distribution::lognormal(0.0, 0.5)};
    const double r = 0.3, s = 0.4;
    double como = 0.0;
    for (const auto& m : mus) como += avg_quantile(m, IntervalSet(r, r + s));
    BoundProblem p{mus, r, s};
    auto up = upper_bound_rvar(p, fast());
    auto lo = lower_bound_rvar(p, fast());
    CHECK(lo.value <= como + 1e-9);
    CHECK(como <= up.value + 1e-9);
    auto bu = bllw_upper(p, fast());
    auto bl = bllw_lower(p, fast());
    CHECK(lo.value <= bu.value + 1e-9);
    CHECK(bl.value <= up.value + 1e-9);
}

TEST_CASE("lower bound equals the reflected upper bound") {
    std::vector<Distribution> suite{Distribution::uniform(0.0, 1.0),
                                    Distribution::exponential(2.0),
                                    Distribution::normal(1.0, 0.5)};
    const double windows[][2] = {{0.1, 0.3}, {0.25, 0.5}, {0.0, 0.6}};
    for (const auto& w : windows) {
        const double r = w[0], s = w[1];
        BoundProblem p{suite, r, s};
        auto lo = lower_bound_rvar(p);
        std::vector<Distribution> neg;
        for (const auto& m : suite) neg.push_back(negate(m));
        BoundProblem q{neg, 1.0 - r - s, s};
        auto up = upper_bound_rvar(q);
        CHECK(lo.value == doctest::Approx(-up.value).epsilon(1e-8));
    }
}

TEST_CASE("threshold diagnostic separates convex and concave quantiles") {
    // Strictly convex quantile: the two-point average always wins, empty set.
    CHECK(c_n(Distribution::exponential(1.0), 2) == doctest::Approx(0.5).epsilon(1e-12));
    // Concave quantile: satisfied immediately.
    CHECK(c_n(Distribution::power_law(2.0), 2) < 1e-4);
    // Linear quantile: equality everywhere counts as satisfied.
    CHECK(c_n(Distribution::uniform(0.0, 1.0), 2) < 1e-4);
    CHECK_THROWS_AS(c_n(Distribution::uniform(0.0, 1.0), 0), InvalidParams);
}

TEST_CASE("homogeneous upper formula matches the optimized bound for an increasing density") {
    auto d = declared(Distribution::power_law(2.0), Direction::increasing);
    auto h = homo_upper(d, 2, 0.5, 0.25);
    CHECK(h.value == doctest::Approx(1.7176796824065907).epsilon(1e-12));
    CHECK((h.literal_ok || h.transformed_ok));
    BoundProblem p{{d, d}, 0.5, 0.25};
    auto res = upper_bound_rvar(p);
    CHECK(res.value == doctest::Approx(h.value).epsilon(1e-6));
    CHECK(res.sharp == Sharpness::certified_by_condition);
    CHECK(res.argpoint.beta0 == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(res.argpoint.betas[0] == doctest::Approx(0.125).epsilon(1e-4));
}

TEST_CASE("homogeneous lower formula matches the optimized bound for a decreasing density") {
    auto d = declared(Distribution::exponential(1.0), Direction::decreasing);
    auto h = homo_lower(d, 2, 0.25, 0.25);
    CHECK(h.value == doctest::Approx(0.6427096756172385).epsilon(1e-12));
    CHECK(h.transformed_ok);
    BoundProblem p{{d, d}, 0.25, 0.25};
    auto res = lower_bound_rvar(p);
    CHECK(res.value == doctest::Approx(h.value).epsilon(1e-6));
    CHECK(res.sharp == Sharpness::certified_by_condition);
}

TEST_CASE("homogeneous formulas require a declared monotone density") {
    CHECK_THROWS_AS(homo_upper(Distribution::power_law(2.0), 2, 0.5, 0.25), ConditionNotMet);
    CHECK_THROWS_AS(homo_lower(Distribution::exponential(1.0), 2, 0.25, 0.25), ConditionNotMet);
    // Wrong direction for the requested side.
    auto dec = declared(Distribution::exponential(1.0), Direction::decreasing);
    CHECK_THROWS_AS(homo_upper(dec, 2, 0.5, 0.25), ConditionNotMet);
    // Increasing density but a window too wide for the threshold condition.
    auto inc = declared(Distribution::power_law(2.0), Direction::increasing);
    CHECK_THROWS_AS(homo_lower(inc, 2, 0.05, 0.9), ConditionNotMet);
}

TEST_CASE("sharpness certificates follow the declared tails and the mass condition") {
    // Concentrated top mass beyond the r-quantile: interior mass is zero.
    auto top = Distribution::empirical({0.0, 1.0, 1.0, 1.0});
    BoundProblem p{{top, top}, 0.25, 0.5};
    auto up = upper_bound_rvar(p, fast());
    CHECK(up.sharp == Sharpness::certified_by_condition);
    auto bottom = Distribution::empirical({0.0, 0.0, 0.0, 1.0});
    BoundProblem pl{{bottom, bottom}, 0.25, 0.5};
    auto lo = lower_bound_rvar(pl, fast());
    CHECK(lo.sharp == Sharpness::certified_by_condition);
    // Continuous uniforms spread too much interior mass for the condition.
    BoundProblem pu{{Distribution::uniform(0.0, 1.0), Distribution::uniform(0.0, 1.0)}, 0.25,
                    0.5};
    CHECK(upper_bound_rvar(pu, fast()).sharp == Sharpness::unknown);
    // Unbounded support with no declaration: no certificate.
    BoundProblem q{{Distribution::lognormal(0.0, 1.0), Distribution::lognormal(0.0, 1.0)}, 0.25,
                   0.5};
    auto up2 = upper_bound_rvar(q, fast());
    CHECK(up2.sharp == Sharpness::unknown);
    TailMonotonicity t;
    t.upper = Direction::increasing;
    t.upper_threshold = 0.2;
    BoundProblem q2{{q.marginals[0].with_tails(t), q.marginals[1].with_tails(t)}, 0.25, 0.5};
    auto up3 = upper_bound_rvar(q2, fast());
    CHECK(up3.sharp == Sharpness::certified_by_condition);
}

TEST_CASE("oracle certification upgrades only uncertified bounds within tolerance") {
    BoundResult res;
    res.value = 1.0;
    certify_with_oracle(res, 0.9995, 1e-3);
    CHECK(res.sharp == Sharpness::certified_by_oracle);
    BoundResult far;
    far.value = 1.0;
    certify_with_oracle(far, 0.9, 1e-3);
    CHECK(far.sharp == Sharpness::unknown);
    BoundResult cond;
    cond.value = 1.0;
    cond.sharp = Sharpness::certified_by_condition;
    cond.sharp_note = "kept";
    certify_with_oracle(cond, 1.0, 1e-3);
    CHECK(cond.sharp == Sharpness::certified_by_condition);
    CHECK(cond.sharp_note == "kept");
}

TEST_CASE("inter-window difference decomposes exactly and picks formulas by declaration") {
    auto dec = declared(Distribution::exponential(1.0), Direction::decreasing);
    auto r1 = ird_sup({dec, dec}, 0.0, 0.5, 0.5, 1.0, fast());
    CHECK(r1.upper_formula == "bllw");
    CHECK(r1.lower_formula == "new");
    CHECK(r1.value == r1.upper_component.value - r1.lower_component.value);
    CHECK(r1.upper_component.sharp == Sharpness::certified_by_condition);
    CHECK(r1.lower_component.sharp == Sharpness::certified_by_condition);

    auto inc = declared(Distribution::power_law(2.0), Direction::increasing);
    auto r2 = ird_sup({inc, inc}, 0.1, 0.4, 0.6, 0.9, fast());
    CHECK(r2.upper_formula == "new");
    CHECK(r2.lower_formula == "bllw");
    CHECK(r2.value == r2.upper_component.value - r2.lower_component.value);

    auto plain = Distribution::lognormal(0.0, 1.0);
    auto r3 = ird_sup({plain, plain}, 0.1, 0.4, 0.6, 0.9, fast());
    CHECK(r3.upper_formula == "min(new,bllw)");
    CHECK(r3.lower_formula == "max(new,bllw)");
    CHECK(r3.value == r3.upper_component.value - r3.lower_component.value);
    CHECK(r3.upper_component.sharp == Sharpness::unknown);

    CHECK_THROWS_AS(ird_sup({plain}, 0.5, 0.4, 0.6, 0.9, fast()), InvalidProbability);
}

TEST_CASE("worst-case quantile spread of two uniforms") {
    const auto u = Distribution::uniform(0.0, 1.0);
    auto res = quantile_diff_sup({u, u}, 0.25, 0.75, fast());
    CHECK(res.sup_term == doctest::Approx(1.75).epsilon(1e-9));
    CHECK(res.inf_term == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(res.value == doctest::Approx(1.5).epsilon(1e-9));
    CHECK_THROWS_AS(quantile_diff_sup({u}, 0.0, 0.5, fast()), InvalidProbability);
    CHECK_THROWS_AS(quantile_diff_sup({u}, 0.6, 0.5, fast()), InvalidProbability);
}

TEST_CASE("quantile spread bounds the one-sided quantiles of any single distribution") {
    const auto e = Distribution::exponential(1.0);
    auto res = quantile_diff_sup({e}, 0.25, 0.75, fast());
    CHECK(res.sup_term >= e.quantile_right(0.75) - 1e-9);
    CHECK(res.inf_term <= e.quantile_left(0.25) + 1e-9);
}
