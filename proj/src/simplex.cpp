#include "riskbounds/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "riskbounds/errors.hpp"

namespace riskbounds {

namespace {

// beta0 = 0 is outside the admissible set; evaluation happens on a closure
// shifted by this floor, which stands in for the one-sided limit.
constexpr double kBeta0Floor = 1e-9;

void check_constraint(const SimplexConstraint& c) {
    if (c.n < 1) throw InfeasibleConstraint("need at least one beta coordinate");
    if (!(c.scale > 0.0 && c.scale <= 1.0))
        throw InfeasibleConstraint("scale must lie in (0,1]");
    if (!(c.beta0_min >= 0.0 && c.beta0_min <= c.scale))
        throw InfeasibleConstraint("beta0_min must lie in [0, scale]");
}

double beta0_low(const SimplexConstraint& c) {
    return std::min(std::max(c.beta0_min, kBeta0Floor), c.scale);
}

// Projection of v onto {x >= 0, sum x = z} by the sort-and-threshold rule.
std::vector<double> project_unit(std::vector<double> v, double z) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    std::size_t rho = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        const double th = (css - z) / static_cast<double>(i + 1);
        if (u[i] - th > 0.0) {
            rho = i;
            theta = th;
        }
    }
    (void)rho;
    for (double& x : v) x = std::max(x - theta, 0.0);
    return v;
}

bool lex_less(const SimplexPoint& a, const SimplexPoint& b) {
    if (a.beta0 != b.beta0) return a.beta0 < b.beta0;
    return a.betas < b.betas;
}

struct Tracker {
    double best = std::numeric_limits<double>::infinity();
    SimplexPoint arg;
    std::size_t evals = 0;

    void consider(const SimplexObjective& f, const SimplexPoint& p) {
        const double v = f(p);
        ++evals;
        if (v < best || (v == best && lex_less(p, arg))) {
            best = v;
            arg = p;
        }
    }
};

SimplexPoint make_point(const SimplexConstraint& c, double beta0,
                        std::vector<double> betas) {
    SimplexPoint p;
    p.scale = c.scale;
    p.beta0 = beta0;
    p.betas = std::move(betas);
    return p;
}

void coarse_grid(const SimplexObjective& f, const SimplexConstraint& c, int G,
                 Tracker& tr) {
    const double lo = beta0_low(c);
    for (int g = 0; g <= G; ++g) {
        const double beta0 = lo + (c.scale - lo) * g / G;
        const double rem = c.scale - beta0;
        if (c.n == 1) {
            tr.consider(f, make_point(c, beta0, {rem}));
        } else if (c.n == 2) {
            for (int i = 0; i <= G; ++i) {
                const double b1 = rem * i / G;
                tr.consider(f, make_point(c, beta0, {b1, rem - b1}));
            }
        } else {
            for (int i = 0; i <= G; ++i) {
                for (int j = 0; j + i <= G; ++j) {
                    const double b1 = rem * i / G;
                    const double b2 = rem * j / G;
                    tr.consider(f, make_point(c, beta0, {b1, b2, rem - b1 - b2}));
                }
            }
        }
    }
}

void lhs_sample(const SimplexObjective& f, const SimplexConstraint& c, int count,
                std::mt19937_64& rng, Tracker& tr) {
    const int dim = c.n + 1;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::vector<int>> strata(dim);
    for (auto& s : strata) {
        s.resize(count);
        std::iota(s.begin(), s.end(), 0);
        std::shuffle(s.begin(), s.end(), rng);
    }
    for (int k = 0; k < count; ++k) {
        std::vector<double> raw(dim);
        for (int d = 0; d < dim; ++d)
            raw[d] = c.scale * (strata[d][k] + unif(rng)) / count;
        tr.consider(f, project(raw, c));
    }
}

void refine_round(const SimplexObjective& f, const SimplexConstraint& c, double radius,
                  int count, std::mt19937_64& rng, Tracker& tr) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const SimplexPoint center = tr.arg;
    for (int k = 0; k < count; ++k) {
        std::vector<double> raw(c.n + 1);
        raw[0] = center.beta0 + radius * unif(rng);
        for (int i = 0; i < c.n; ++i) raw[i + 1] = center.betas[i] + radius * unif(rng);
        tr.consider(f, project(raw, c));
    }
}

void coordinate_polish(const SimplexObjective& f, const SimplexConstraint& c,
                       double start_step, double tol, Tracker& tr) {
    const double lo = beta0_low(c);
    double step = start_step;
    while (step > tol) {
        bool improved = false;
        const SimplexPoint base = tr.arg;
        const double before = tr.best;
        auto coords = [&](const SimplexPoint& p, int i) {
            return i == 0 ? p.beta0 : p.betas[i - 1];
        };
        for (int i = 0; i <= c.n; ++i) {
            for (int j = 0; j <= c.n; ++j) {
                if (i == j) continue;
                const double move = std::min(step, coords(base, i) - (i == 0 ? lo : 0.0));
                if (move <= 0.0) continue;
                SimplexPoint p = base;
                if (i == 0) p.beta0 -= move; else p.betas[i - 1] -= move;
                if (j == 0) p.beta0 += move; else p.betas[j - 1] += move;
                tr.consider(f, p);
            }
        }
        improved = tr.best < before;
        if (!improved) step *= 0.5;
    }
}

} // namespace

SimplexPoint project(const std::vector<double>& raw, const SimplexConstraint& c) {
    check_constraint(c);
    if (static_cast<int>(raw.size()) != c.n + 1)
        throw ShapeMismatch("projection input must have n + 1 coordinates");
    const double lo = beta0_low(c);
    // Shift beta0 by its lower bound, project onto the plain simplex of the
    // remaining mass, shift back.
    std::vector<double> v(raw);
    v[0] -= lo;
    const double rem = c.scale - lo;
    if (rem <= 0.0) {
        SimplexPoint p = make_point(c, c.scale, std::vector<double>(c.n, 0.0));
        return p;
    }
    v = project_unit(std::move(v), rem);
    SimplexPoint p;
    p.scale = c.scale;
    p.beta0 = v[0] + lo;
    p.betas.assign(v.begin() + 1, v.end());
    return p;
}

std::vector<double> batch_evaluate(const SimplexObjective& f,
                                   const std::vector<SimplexPoint>& pts) {
    std::vector<double> out(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = f(pts[i]);
    return out;
}

OptResult minimize(const SimplexObjective& f, const SimplexConstraint& c,
                   const SearchConfig& cfg) {
    check_constraint(c);
    std::mt19937_64 rng(cfg.seed);
    Tracker tr;
    const double lo = beta0_low(c);

    // Vertices first: beta0 at either end, full mass on a single coordinate.
    tr.consider(f, make_point(c, c.scale, std::vector<double>(c.n, 0.0)));
    for (int i = 0; i < c.n; ++i) {
        std::vector<double> b(c.n, 0.0);
        b[i] = c.scale - lo;
        tr.consider(f, make_point(c, lo, b));
    }
    tr.consider(f, make_point(c, (lo + c.scale) / 2,
                              std::vector<double>(c.n, (c.scale - lo) / (2 * c.n))));

    if (c.n <= 3) {
        coarse_grid(f, c, std::max(2, cfg.coarse_grid_resolution), tr);
    } else {
        lhs_sample(f, c, std::max(16, cfg.lhs_samples), rng, tr);
    }

    double radius = c.scale / std::max(2, cfg.coarse_grid_resolution);
    const int per_round = c.n <= 3 ? 256 : 512;
    for (int round = 0; round < cfg.refine_rounds; ++round) {
        refine_round(f, c, radius, per_round, rng, tr);
        radius *= 0.35;
    }

    coordinate_polish(f, c, std::max(radius, 64.0 * cfg.tol), cfg.tol, tr);

    OptResult res;
    res.argpoint = tr.arg;
    res.value = tr.best;
    res.evaluations = tr.evals;
    const double edge = std::max(16.0 * cfg.tol, 1e-7 * c.scale);
    res.beta0_at_bound =
        tr.arg.beta0 <= lo + edge || tr.arg.beta0 >= c.scale - edge;
    return res;
}

OptResult maximize(const SimplexObjective& f, const SimplexConstraint& c,
                   const SearchConfig& cfg) {
    OptResult res = minimize([&f](const SimplexPoint& p) { return -f(p); }, c, cfg);
    res.value = -res.value;
    return res;
}

} // namespace riskbounds
