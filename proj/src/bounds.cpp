#include "riskbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskbounds/errors.hpp"
#include "riskbounds/functionals.hpp"

namespace riskbounds {

namespace {

constexpr double kTiny = 1e-12;
// Below this window length an RVaR average is replaced by the one-sided
// quantile it converges to.
constexpr double kQuantileLimit = 1e-7;

void check_window(const std::vector<Distribution>& mus, double r, double s) {
    if (mus.empty()) throw InvalidParams("at least one marginal required");
    if (!(r >= 0.0 && s > 0.0 && r + s <= 1.0 + kTiny))
        throw InvalidProbability("window requires r >= 0, s > 0, r + s <= 1");
}

void require_finite_means(const std::vector<Distribution>& mus, const char* why) {
    for (const auto& m : mus)
        if (!m.mean_finite())
            throw NonIntegrableTail(std::string(why) + ": " + m.describe());
}

double inf_guard(double sign) {
    return sign * std::numeric_limits<double>::infinity();
}

// Interval-set average that tolerates degenerate pieces.
double r_over(const Distribution& d, std::vector<std::pair<double, double>> ivs) {
    IntervalSet I(std::move(ivs));
    if (I.empty()) return 0.0;
    return avg_quantile(d, I);
}

} // namespace

double new_rvar_rhs(const std::vector<Distribution>& mus, double r, double s,
                    const std::vector<double>& alphas, const std::vector<double>& betas) {
    check_window(mus, r, s);
    const std::size_t n = mus.size();
    if (alphas.size() != n || betas.size() != n)
        throw ShapeMismatch("alphas and betas must match the number of marginals");
    double alpha_sum = 0.0, beta_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alphas[i] < -kTiny) throw ConstraintViolation("alpha_i must be >= 0");
        if (!(betas[i] > 0.0)) throw ConstraintViolation("beta_i must be > 0");
        alpha_sum += alphas[i];
        beta_max = std::max(beta_max, betas[i]);
    }
    if (alpha_sum > s + kTiny) throw ConstraintViolation("sum of alphas must not exceed s");
    if (alpha_sum + beta_max > 1.0 - r + kTiny)
        throw ConstraintViolation("sum of alphas plus max beta must not exceed 1 - r");
    if (r <= 0.0) require_finite_means(mus, "window starting at 0 requires finite means");

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = (1.0 - r - betas[i]) / s;
        const double mid = r_over(mus[i], {{r + alphas[i], r + alphas[i] + betas[i]}});
        double wing = 0.0;
        if (std::fabs(c) > kTiny)
            wing = r_over(mus[i], {{r, r + alphas[i]}, {r + alphas[i] + betas[i], 1.0}});
        total += c * wing + (1.0 - c) * mid;
    }
    return total;
}

double simplified_rhs(const std::vector<Distribution>& mus, double r, double s,
                      const std::vector<double>& alphas) {
    check_window(mus, r, s);
    const std::size_t n = mus.size();
    if (alphas.size() != n) throw ShapeMismatch("one alpha per marginal required");
    double alpha_sum = 0.0;
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0 - r + kTiny))
            throw ConstraintViolation("alpha_i must lie in (0, 1 - r)");
        alpha_sum += a;
    }
    if (std::fabs(alpha_sum - s) > 1e-9)
        throw ConstraintViolation("alphas must sum to s");
    if (r <= 0.0) require_finite_means(mus, "window starting at 0 requires finite means");

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += r_over(mus[i], {{r, r + alphas[i]}, {1.0 - s + alphas[i], 1.0}});
    return total;
}

namespace {

BoundResult run_upper_new(const BoundProblem& p, const SearchConfig& cfg) {
    const double r = p.r, s = p.s;
    const auto& mus = p.marginals;
    SimplexConstraint c;
    c.n = static_cast<int>(mus.size());
    c.scale = 1.0 - r;
    c.beta0_min = std::max(1.0 - r - s, 0.0);

    auto objective = [&](const SimplexPoint& pt) {
        const double b0 = pt.beta0;
        const double coef = std::clamp((1.0 - r - b0) / s, 0.0, 1.0);
        double total = 0.0;
        try {
            for (std::size_t i = 0; i < mus.size(); ++i) {
                const double bi = pt.betas[i];
                const double mid = r_over(mus[i], {{r + bi, r + bi + b0}});
                double wing = 0.0;
                if (coef > kTiny)
                    wing = r_over(mus[i], {{r, r + bi}, {r + bi + b0, 1.0}});
                total += coef * wing + (1.0 - coef) * mid;
            }
        } catch (const NonIntegrableTail&) {
            return inf_guard(+1.0);
        }
        return total;
    };

    OptResult opt = minimize(objective, c, cfg);
    BoundResult res;
    res.value = opt.value;
    res.argpoint = opt.argpoint;
    res.beta0_at_bound = opt.beta0_at_bound;
    res.evaluations = opt.evaluations;
    return res;
}

BoundResult run_lower_new(const BoundProblem& p, const SearchConfig& cfg) {
    const double r = p.r, s = p.s;
    const auto& mus = p.marginals;
    SimplexConstraint c;
    c.n = static_cast<int>(mus.size());
    c.scale = r + s;
    c.beta0_min = r;

    auto objective = [&](const SimplexPoint& pt) {
        const double b0 = pt.beta0;
        const double coef = std::clamp((r + s - b0) / s, 0.0, 1.0);
        double total = 0.0;
        try {
            for (std::size_t i = 0; i < mus.size(); ++i) {
                const double bi = pt.betas[i];
                const double mid = r_over(mus[i], {{r + s - bi - b0, r + s - bi}});
                double wing = 0.0;
                if (coef > kTiny)
                    wing = r_over(mus[i], {{0.0, r + s - bi - b0}, {r + s - bi, r + s}});
                total += coef * wing + (1.0 - coef) * mid;
            }
        } catch (const NonIntegrableTail&) {
            return inf_guard(-1.0);
        }
        return total;
    };

    OptResult opt = maximize(objective, c, cfg);
    BoundResult res;
    res.value = opt.value;
    res.argpoint = opt.argpoint;
    res.beta0_at_bound = opt.beta0_at_bound;
    res.evaluations = opt.evaluations;
    return res;
}

bool all_upper_increasing(const std::vector<Distribution>& mus, double r) {
    for (const auto& m : mus) {
        const auto& t = m.tails();
        const bool on_support = t.on_support == Direction::increasing;
        const bool beyond = t.upper == Direction::increasing && t.upper_threshold <= r + kTiny;
        if (!on_support && !beyond) return false;
    }
    return true;
}

bool all_upper_decreasing(const std::vector<Distribution>& mus, double r) {
    for (const auto& m : mus) {
        const auto& t = m.tails();
        const bool on_support = t.on_support == Direction::decreasing;
        const bool beyond = t.upper == Direction::decreasing && t.upper_threshold <= r + kTiny;
        if (!on_support && !beyond) return false;
    }
    return true;
}

bool all_lower_decreasing(const std::vector<Distribution>& mus, double level) {
    for (const auto& m : mus) {
        const auto& t = m.tails();
        const bool on_support = t.on_support == Direction::decreasing;
        const bool below = t.lower == Direction::decreasing && t.lower_threshold >= level - kTiny;
        if (!on_support && !below) return false;
    }
    return true;
}

bool all_lower_increasing(const std::vector<Distribution>& mus, double level) {
    for (const auto& m : mus) {
        const auto& t = m.tails();
        const bool on_support = t.on_support == Direction::increasing;
        const bool below = t.lower == Direction::increasing && t.lower_threshold >= level - kTiny;
        if (!on_support && !below) return false;
    }
    return true;
}

bool upper_mass_condition(const std::vector<Distribution>& mus, double r) {
    double total = 0.0;
    for (const auto& m : mus) {
        const double q1 = m.quantile_left(1.0);
        if (!std::isfinite(q1)) return false;
        const double qr = m.quantile_right(r);
        total += m.cdf_left(q1) - m.cdf_left(qr);
    }
    return total <= 1.0 - r + kTiny;
}

bool lower_mass_condition(const std::vector<Distribution>& mus, double level) {
    double total = 0.0;
    for (const auto& m : mus) {
        const double q0 = m.quantile_right(0.0);
        if (!std::isfinite(q0)) return false;
        const double ql = m.quantile_left(level);
        total += m.cdf(ql) - m.cdf(q0);
    }
    return total <= level + kTiny;
}

} // namespace

BoundResult upper_bound_rvar(const BoundProblem& p, const SearchConfig& cfg) {
    check_window(p.marginals, p.r, p.s);
    if (p.r <= 0.0)
        require_finite_means(p.marginals, "window starting at 0 requires finite means");
    BoundResult res = run_upper_new(p, cfg);
    if (all_upper_increasing(p.marginals, p.r)) {
        res.sharp = Sharpness::certified_by_condition;
        res.sharp_note = "declared increasing density beyond the r-quantile";
    } else if (upper_mass_condition(p.marginals, p.r)) {
        res.sharp = Sharpness::certified_by_condition;
        res.sharp_note = "interior mass beyond the r-quantiles does not exceed 1 - r";
    }
    return res;
}

BoundResult lower_bound_rvar(const BoundProblem& p, const SearchConfig& cfg) {
    check_window(p.marginals, p.r, p.s);
    BoundResult res = run_lower_new(p, cfg);
    if (all_lower_decreasing(p.marginals, p.r + p.s)) {
        res.sharp = Sharpness::certified_by_condition;
        res.sharp_note = "declared decreasing density below the (r+s)-quantile";
    } else if (lower_mass_condition(p.marginals, p.r + p.s)) {
        res.sharp = Sharpness::certified_by_condition;
        res.sharp_note = "interior mass below the (r+s)-quantiles does not exceed r + s";
    }
    return res;
}

BoundResult bllw_upper(const BoundProblem& p, const SearchConfig& cfg) {
    check_window(p.marginals, p.r, p.s);
    const double r = p.r, s = p.s;
    const auto& mus = p.marginals;
    SimplexConstraint c;
    c.n = static_cast<int>(mus.size());
    c.scale = 1.0 - r;
    c.beta0_min = s;

    auto objective = [&](const SimplexPoint& pt) {
        double total = 0.0;
        try {
            for (std::size_t i = 0; i < mus.size(); ++i)
                total += r_over(mus[i], {{1.0 - pt.betas[i] - pt.beta0, 1.0 - pt.betas[i]}});
        } catch (const NonIntegrableTail&) {
            return inf_guard(+1.0);
        }
        return total;
    };
    OptResult opt = minimize(objective, c, cfg);
    BoundResult res;
    res.value = opt.value;
    res.argpoint = opt.argpoint;
    res.beta0_at_bound = opt.beta0_at_bound;
    res.evaluations = opt.evaluations;
    return res;
}

BoundResult bllw_lower(const BoundProblem& p, const SearchConfig& cfg) {
    check_window(p.marginals, p.r, p.s);
    const double r = p.r, s = p.s;
    const auto& mus = p.marginals;
    SimplexConstraint c;
    c.n = static_cast<int>(mus.size());
    c.scale = r + s;
    c.beta0_min = s;

    auto objective = [&](const SimplexPoint& pt) {
        double total = 0.0;
        try {
            for (std::size_t i = 0; i < mus.size(); ++i)
                total += r_over(mus[i], {{pt.betas[i], pt.betas[i] + pt.beta0}});
        } catch (const NonIntegrableTail&) {
            return inf_guard(-1.0);
        }
        return total;
    };
    OptResult opt = maximize(objective, c, cfg);
    BoundResult res;
    res.value = opt.value;
    res.argpoint = opt.argpoint;
    res.beta0_at_bound = opt.beta0_at_bound;
    res.evaluations = opt.evaluations;
    return res;
}

double c_n(const Distribution& d, int n, int grid) {
    if (n < 1) throw InvalidParams("c_n requires n >= 1");
    if (grid < 8) grid = 8;
    const double cap = 1.0 / n;

    auto satisfied = [&](double x) {
        const double a = (n - 1) * x, b = 1.0 - x;
        if (!(a < b)) return false;
        const double lhs =
            ((n - 1) * d.quantile_left(std::max(a, kTiny)) + d.quantile_left(b)) / n;
        const double rhs = avg_quantile(d, IntervalSet(a, b));
        return lhs <= rhs + 1e-12 * (1.0 + std::fabs(rhs));
    };

    double prev = 0.0;
    for (int k = 1; k <= grid; ++k) {
        const double x = cap * k / (grid + 1);
        if (satisfied(x)) {
            // Refine the switch point between the last failing grid point
            // and the first success.
            double lo = prev, hi = x;
            for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= 0.0) break;
                if (satisfied(mid)) hi = mid; else lo = mid;
            }
            return hi;
        }
        prev = x;
    }
    return cap; // convention for an empty set
}

HomoResult homo_upper(const Distribution& d, int n, double r, double s) {
    check_window({d}, r, s);
    if (n < 1) throw InvalidParams("homo_upper requires n >= 1");
    if (d.tails().on_support != Direction::increasing)
        throw ConditionNotMet("homo_upper requires a declared increasing density on the support");
    HomoResult res;
    res.cn_literal = c_n(d, n);
    res.cn_transformed = c_n(tail_lower(negate(d), 1.0 - r), n);
    const double p = s / (1.0 - r);
    res.literal_ok = p <= n * res.cn_literal + kTiny;
    res.transformed_ok = p <= n * res.cn_transformed + kTiny;
    if (!res.literal_ok && !res.transformed_ok)
        throw ConditionNotMet("homo_upper threshold condition fails in both readings");
    res.value = n * r_over(d, {{r, r + s / n}, {1.0 - s + s / n, 1.0}});
    return res;
}

HomoResult homo_lower(const Distribution& d, int n, double r, double s) {
    check_window({d}, r, s);
    if (n < 1) throw InvalidParams("homo_lower requires n >= 1");
    if (d.tails().on_support != Direction::decreasing)
        throw ConditionNotMet("homo_lower requires a declared decreasing density on the support");
    HomoResult res;
    res.cn_literal = c_n(negate(d), n);
    res.cn_transformed = c_n(tail_lower(d, r + s), n);
    const double p = s / (r + s);
    res.literal_ok = p <= n * res.cn_literal + kTiny;
    res.transformed_ok = p <= n * res.cn_transformed + kTiny;
    if (!res.literal_ok && !res.transformed_ok)
        throw ConditionNotMet("homo_lower threshold condition fails in both readings");
    const double w = (n - 1.0) * s / n;
    res.value = n * r_over(d, {{0.0, w}, {r + w, r + s}});
    return res;
}

IrdResult ird_sup(const std::vector<Distribution>& mus, double r1, double s1, double r2,
                  double s2, const SearchConfig& cfg) {
    if (!(0.0 <= r1 && r1 < s1 && s1 <= r2 && r2 < s2 && s2 <= 1.0))
        throw InvalidProbability("ird_sup requires 0 <= r1 < s1 <= r2 < s2 <= 1");
    if (mus.empty()) throw InvalidParams("at least one marginal required");

    IrdResult res;
    BoundProblem up{mus, r2, s2 - r2};
    if (all_upper_decreasing(mus, r2)) {
        res.upper_component = bllw_upper(up, cfg);
        res.upper_component.sharp = Sharpness::certified_by_condition;
        res.upper_component.sharp_note = "declared decreasing density beyond the r2-quantile";
        res.upper_formula = "bllw";
    } else if (all_upper_increasing(mus, r2)) {
        res.upper_component = upper_bound_rvar(up, cfg);
        res.upper_formula = "new";
    } else {
        BoundResult a = upper_bound_rvar(up, cfg);
        BoundResult b = bllw_upper(up, cfg);
        res.upper_component = a.value <= b.value ? a : b;
        res.upper_component.sharp = Sharpness::unknown;
        res.upper_component.sharp_note.clear();
        res.upper_formula = "min(new,bllw)";
    }

    BoundProblem low{mus, r1, s1 - r1};
    if (all_lower_increasing(mus, s1)) {
        res.lower_component = bllw_lower(low, cfg);
        res.lower_component.sharp = Sharpness::certified_by_condition;
        res.lower_component.sharp_note = "declared increasing density below the s1-quantile";
        res.lower_formula = "bllw";
    } else if (all_lower_decreasing(mus, s1)) {
        res.lower_component = lower_bound_rvar(low, cfg);
        res.lower_formula = "new";
    } else {
        BoundResult a = lower_bound_rvar(low, cfg);
        BoundResult b = bllw_lower(low, cfg);
        res.lower_component = a.value >= b.value ? a : b;
        res.lower_component.sharp = Sharpness::unknown;
        res.lower_component.sharp_note.clear();
        res.lower_formula = "max(new,bllw)";
    }

    res.value = res.upper_component.value - res.lower_component.value;
    return res;
}

QdiffResult quantile_diff_sup(const std::vector<Distribution>& mus, double r, double s,
                              const SearchConfig& cfg) {
    if (!(r > 0.0 && r <= s && s < 1.0))
        throw InvalidProbability("quantile_diff_sup requires 0 < r <= s < 1");
    if (mus.empty()) throw InvalidParams("at least one marginal required");
    const int n = static_cast<int>(mus.size());

    SimplexConstraint cu;
    cu.n = n;
    cu.scale = 1.0 - s;
    cu.beta0_min = 0.0;
    auto sup_obj = [&](const SimplexPoint& pt) {
        double total = 0.0;
        try {
            for (int i = 0; i < n; ++i) {
                const double b = 1.0 - pt.betas[i];
                if (pt.beta0 < kQuantileLimit)
                    total += mus[i].quantile_left(b); // limit of the shrinking window
                else
                    total += r_over(mus[i], {{b - pt.beta0, b}});
            }
        } catch (const NonIntegrableTail&) {
            return inf_guard(+1.0);
        }
        return total;
    };
    OptResult osup = minimize(sup_obj, cu, cfg);

    SimplexConstraint cl;
    cl.n = n;
    cl.scale = r;
    cl.beta0_min = 0.0;
    auto inf_obj = [&](const SimplexPoint& pt) {
        double total = 0.0;
        try {
            for (int i = 0; i < n; ++i) {
                const double a = pt.betas[i];
                if (pt.beta0 < kQuantileLimit)
                    total += a < 1.0 ? mus[i].quantile_right(a)
                                     : mus[i].quantile_left(1.0);
                else
                    total += r_over(mus[i], {{a, a + pt.beta0}});
            }
        } catch (const NonIntegrableTail&) {
            return inf_guard(-1.0);
        }
        return total;
    };
    OptResult oinf = maximize(inf_obj, cl, cfg);

    QdiffResult res;
    res.sup_term = osup.value;
    res.inf_term = oinf.value;
    res.sup_arg = osup.argpoint;
    res.inf_arg = oinf.argpoint;
    res.value = res.sup_term - res.inf_term;
    return res;
}

void certify_with_oracle(BoundResult& res, double oracle_value, double tol) {
    if (res.sharp == Sharpness::certified_by_condition) return;
    if (std::fabs(res.value - oracle_value) <= tol) {
        res.sharp = Sharpness::certified_by_oracle;
        res.sharp_note = "coupling search reached the bound within tolerance";
    }
}

} // namespace riskbounds
