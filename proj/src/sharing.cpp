#include "riskbounds/sharing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "riskbounds/errors.hpp"
#include "riskbounds/functionals.hpp"
#include "riskbounds/interval_set.hpp"

namespace riskbounds {

namespace {

struct Sizes {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<std::size_t> k; // m * beta_i
    std::size_t k_total = 0;    // m * beta
    double beta = 0.0;
};

Sizes validate(const SharingProblem& p) {
    Sizes sz;
    sz.m = p.total.size();
    sz.n = p.betas.size();
    if (sz.m == 0) throw InvalidParams("sample of the total risk is empty");
    if (sz.n == 0) throw InvalidParams("at least one agent required");
    for (double v : p.total)
        if (!std::isfinite(v)) throw InvalidParams("sample values must be finite");
    for (double b : p.betas) {
        if (!(b > 0.0)) throw InvalidParams("beta_i must be > 0");
        const double kb = b * static_cast<double>(sz.m);
        const double rk = std::nearbyint(kb);
        if (std::fabs(kb - rk) > 1e-9)
            throw NonIntegralMass("m * beta_i must be an integer");
        sz.k.push_back(static_cast<std::size_t>(rk));
        sz.k_total += static_cast<std::size_t>(rk);
        sz.beta += b;
    }
    if (!(sz.beta < 1.0 - 1e-12))
        throw InvalidParams("sum of betas must be < 1");
    return sz;
}

// Atom indices ordered by (value, index); the first k are the low region.
std::vector<std::size_t> value_order(const std::vector<double>& xs) {
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (xs[a] != xs[b]) return xs[a] < xs[b];
        return a < b;
    });
    return idx;
}

double avg_lowest(const std::vector<double>& xs, std::size_t k) {
    std::vector<double> s(xs);
    std::sort(s.begin(), s.end());
    return std::accumulate(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
           static_cast<double>(k);
}

double avg_window(const std::vector<double>& xs, double a, double b) {
    std::vector<double> s(xs);
    std::sort(s.begin(), s.end());
    return empirical_avg_quantile(s, IntervalSet(a, b));
}

Allocation build_blocks(const SharingProblem& p, const Sizes& sz, double t) {
    const std::size_t m = sz.m, n = sz.n;
    Allocation a;
    a.t = t;
    a.parts.assign(n, std::vector<double>(m, 0.0));
    const auto order = value_order(p.total);
    std::vector<int> owner(m, -1); // agent whose low block holds this atom; -1 off A
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < sz.k[i]; ++c) owner[order[pos++]] = static_cast<int>(i);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (owner[j] < 0)
                a.parts[i][j] = p.total[j] / static_cast<double>(n);
            else if (owner[j] == static_cast<int>(i))
                a.parts[i][j] = p.total[j] - t;
            else
                a.parts[i][j] = t / static_cast<double>(n - 1);
        }
    }
    return a;
}

} // namespace

double inf_convolution(const SharingProblem& p) {
    const Sizes sz = validate(p);
    return avg_lowest(p.total, sz.k_total);
}

Allocation optimal_allocation(const SharingProblem& p, double t) {
    const Sizes sz = validate(p);
    if (sz.n == 1) {
        Allocation a;
        a.t = t;
        a.parts = {p.total};
        return a;
    }
    const double top = *std::max_element(p.total.begin(), p.total.end());
    if (t < std::max(0.0, top) - 1e-12)
        throw ConstraintViolation("t must be at least max(0, max of the sample)");
    return build_blocks(p, sz, t);
}

double evaluate_allocation(const SharingProblem& p, const Allocation& a) {
    const Sizes sz = validate(p);
    if (a.parts.size() != sz.n) throw ShapeMismatch("one part per agent required");
    for (const auto& part : a.parts)
        if (part.size() != sz.m) throw ShapeMismatch("part size must match the sample");
    for (std::size_t j = 0; j < sz.m; ++j) {
        double s = 0.0;
        for (const auto& part : a.parts) s += part[j];
        if (std::fabs(s - p.total[j]) > 1e-9 * (1.0 + std::fabs(p.total[j])))
            throw ShapeMismatch("allocation does not sum to the total");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < sz.n; ++i) {
        std::vector<double> s(a.parts[i]);
        std::sort(s.begin(), s.end());
        IntervalSet I({{0.0, p.betas[i]}, {1.0 - sz.beta + p.betas[i], 1.0}});
        total += empirical_avg_quantile(s, I);
    }
    return total;
}

SequenceResult allocation_sequence(const SharingProblem& p, double m_param) {
    const Sizes sz = validate(p);
    if (sz.n < 2) throw InvalidParams("the approximating sequence needs n >= 2 agents");
    std::vector<double> sorted(p.total);
    std::sort(sorted.begin(), sorted.end());
    double thresh = empirical_quantile_left(sorted, sz.beta);
    for (std::size_t i = 0; i < sz.n; ++i)
        thresh = std::max(thresh,
                          empirical_quantile_left(sorted, 1.0 - sz.beta + p.betas[i]));
    thresh = std::max(thresh, 0.0);
    if (m_param < thresh - 1e-12)
        throw ConstraintViolation("m_param is below the quantile threshold of the construction");

    SequenceResult res;
    res.alloc = build_blocks(p, sz, m_param);
    res.exposure = evaluate_allocation(p, res.alloc);
    const double n = static_cast<double>(sz.n);
    res.a_m = n * m_param / (n - 1.0);
    double sl = 0.0;
    std::size_t exceed = 0;
    for (double x : p.total)
        if (x > res.a_m) {
            sl += x - res.a_m;
            ++exceed;
        }
    res.stop_loss = sl / (static_cast<double>(sz.m) * sz.beta);
    res.identity_gap = res.exposure - inf_convolution(p) - res.stop_loss;
    const std::size_t min_high =
        sz.k_total - *std::max_element(sz.k.begin(), sz.k.end());
    if (exceed > min_high)
        res.note = "atoms above a_m exceed the smallest high block; identity not guaranteed";
    return res;
}

namespace {

struct MustMay {
    std::vector<char> must_low, may_low, must_high, may_high;
};

// Value-based rank freedom of a part: which atoms can sit among the k lowest
// (resp. h highest) ranks under some tie resolution.
MustMay rank_freedom(const std::vector<double>& part, std::size_t k, std::size_t h) {
    const std::size_t m = part.size();
    std::vector<double> sorted(part);
    std::sort(sorted.begin(), sorted.end());
    MustMay f;
    f.must_low.assign(m, 0);
    f.may_low.assign(m, 0);
    f.must_high.assign(m, 0);
    f.may_high.assign(m, 0);
    const double vl = k > 0 ? sorted[k - 1] : -std::numeric_limits<double>::infinity();
    const double vh = h > 0 ? sorted[m - h] : std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
        if (k > 0) {
            if (part[j] < vl) f.must_low[j] = 1;
            if (part[j] <= vl) f.may_low[j] = 1;
        }
        if (h > 0) {
            if (part[j] > vh) f.must_high[j] = 1;
            if (part[j] >= vh) f.may_high[j] = 1;
        }
    }
    return f;
}

bool split_feasible(const MustMay& f, const std::vector<char>& in_e, std::size_t k,
                    std::size_t h) {
    std::size_t only_low = 0, only_high = 0, total = 0;
    for (std::size_t j = 0; j < in_e.size(); ++j) {
        if (!in_e[j]) {
            if (f.must_low[j] || f.must_high[j]) return false;
            continue;
        }
        const bool cl = f.may_low[j], ch = f.may_high[j];
        if (!cl && !ch) return false;
        if (cl && !ch) ++only_low;
        if (ch && !cl) ++only_high;
        ++total;
    }
    return total == k + h && only_low <= k && only_high <= h;
}

// Exact bipartite assignment of the low-region atoms to agents' low blocks
// with capacities k_i, via augmenting paths.
bool partition_exists(const std::vector<std::vector<char>>& allowed,
                      const std::vector<std::size_t>& caps, std::size_t& covered) {
    const std::size_t atoms = allowed.size();
    const std::size_t agents = caps.size();
    std::vector<std::vector<std::size_t>> assigned(agents);
    std::vector<int> atom_agent(atoms, -1);

    std::vector<char> visited(agents);
    std::function<bool(std::size_t)> try_assign = [&](std::size_t a) -> bool {
        for (std::size_t i = 0; i < agents; ++i) {
            if (!allowed[a][i] || visited[i]) continue;
            visited[i] = 1;
            if (assigned[i].size() < caps[i]) {
                assigned[i].push_back(a);
                atom_agent[a] = static_cast<int>(i);
                return true;
            }
            for (std::size_t& other : assigned[i]) {
                if (try_assign(other)) {
                    other = a;
                    atom_agent[a] = static_cast<int>(i);
                    return true;
                }
            }
        }
        return false;
    };

    covered = 0;
    for (std::size_t a = 0; a < atoms; ++a) {
        std::fill(visited.begin(), visited.end(), 0);
        if (try_assign(a)) ++covered;
    }
    return covered == atoms;
}

} // namespace

DependenceReport verify_dependence(const SharingProblem& p, const Allocation& a,
                                   std::uint64_t max_search) {
    const Sizes sz = validate(p);
    if (a.parts.size() != sz.n) throw ShapeMismatch("one part per agent required");
    const std::size_t m = sz.m, k = sz.k_total;
    if (static_cast<double>(m) * static_cast<double>(sz.n) > 1e7)
        throw InstanceTooLarge("dependence check limited to m * n <= 1e7");

    DependenceReport rep;

    const MustMay fx = rank_freedom(p.total, k, 0);
    std::vector<MustMay> fp;
    fp.reserve(sz.n);
    for (std::size_t i = 0; i < sz.n; ++i)
        fp.push_back(rank_freedom(a.parts[i], sz.k[i], k - sz.k[i]));

    std::vector<char> must(m, 0), may(m, 1);
    for (std::size_t j = 0; j < m; ++j) {
        if (fx.must_low[j]) must[j] = 1;
        if (!fx.may_low[j]) may[j] = 0;
        for (std::size_t i = 0; i < sz.n; ++i) {
            if (fp[i].must_low[j] || fp[i].must_high[j]) must[j] = 1;
            if (!fp[i].may_low[j] && !fp[i].may_high[j]) may[j] = 0;
        }
    }
    std::size_t must_count = 0, may_count = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (must[j] && !may[j]) {
            rep.note = "a forced atom is excluded by another margin";
            return rep;
        }
        must_count += must[j];
        may_count += may[j];
    }
    if (must_count > k || may_count < k) {
        rep.note = "no common event of the right mass exists";
        return rep;
    }

    // Candidate events: the forced atoms plus fillers from the flexible pool.
    std::vector<std::size_t> pool;
    for (std::size_t j = 0; j < m; ++j)
        if (may[j] && !must[j]) pool.push_back(j);
    std::mt19937_64 rng(12345);
    std::vector<char> in_e(m, 0);
    bool found = false;
    for (std::uint64_t attempt = 0; attempt < std::max<std::uint64_t>(max_search, 1);
         ++attempt) {
        std::fill(in_e.begin(), in_e.end(), 0);
        for (std::size_t j = 0; j < m; ++j) in_e[j] = must[j];
        std::vector<std::size_t> fill(pool);
        if (attempt > 0) std::shuffle(fill.begin(), fill.end(), rng);
        for (std::size_t c = 0; c < k - must_count; ++c) in_e[fill[c]] = 1;
        bool ok = true;
        for (std::size_t i = 0; i < sz.n && ok; ++i)
            ok = split_feasible(fp[i], in_e, sz.k[i], k - sz.k[i]);
        if (ok) {
            found = true;
            break;
        }
        if (pool.size() <= k - must_count) break; // only one candidate event
    }
    if (!found) {
        rep.note = "no tie resolution satisfied every agent within the search budget";
        return rep;
    }
    rep.holds = true;

    // Case split: can the agents' low blocks partition the common event?
    std::vector<std::size_t> atoms;
    for (std::size_t j = 0; j < m; ++j)
        if (in_e[j]) atoms.push_back(j);
    std::vector<std::vector<char>> allowed(atoms.size(), std::vector<char>(sz.n, 0));
    for (std::size_t ai = 0; ai < atoms.size(); ++ai) {
        const std::size_t j = atoms[ai];
        for (std::size_t i = 0; i < sz.n; ++i) {
            // Atom j may enter agent i's low block only if its value allows a
            // low rank and it is not forced into the high block. Atoms that
            // cannot take a high rank for agent i must go to its low block.
            allowed[ai][i] = fp[i].may_low[j] && !fp[i].must_high[j];
        }
        for (std::size_t i = 0; i < sz.n; ++i) {
            if (in_e[j] && !fp[i].may_high[j]) {
                // forced to agent i's low block
                for (std::size_t o = 0; o < sz.n; ++o)
                    if (o != i) allowed[ai][o] = 0;
            }
        }
    }
    std::size_t covered = 0;
    if (partition_exists(allowed, sz.k, covered)) {
        rep.case_id = 1;
        return rep;
    }
    rep.theta = static_cast<double>(atoms.size() - covered) / static_cast<double>(m);
    // The remaining mass must be flat: the total and every part constant
    // across the off-event region.
    auto constant_outside = [&](const std::vector<double>& xs) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t j = 0; j < m; ++j) {
            if (in_e[j]) continue;
            lo = std::min(lo, xs[j]);
            hi = std::max(hi, xs[j]);
        }
        return hi - lo <= 1e-9 * (1.0 + std::fabs(hi));
    };
    bool flat = constant_outside(p.total);
    for (std::size_t i = 0; i < sz.n && flat; ++i) flat = constant_outside(a.parts[i]);
    if (flat) {
        rep.case_id = 2;
    } else {
        rep.note = "holds, but the boundary structure matches neither case cleanly";
    }
    return rep;
}

double distortion_g(double s, const DistortionParams& prm) {
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidProbability("g is defined on [0,1]");
    if (!(prm.lambda >= 0.0 && prm.lambda <= 1.0))
        throw InvalidParams("lambda must lie in [0,1]");
    if (!(prm.beta > 0.0 && prm.beta < 1.0 && prm.beta_i > 0.0 && prm.beta_i <= prm.beta))
        throw InvalidParams("need 0 < beta_i <= beta < 1");
    const double w = (1.0 - prm.lambda) / prm.beta;
    double kink;
    if (s <= 1.0 - prm.beta_i)
        kink = std::min(s, prm.beta - prm.beta_i);
    else
        kink = s - 1.0 + prm.beta;
    return prm.lambda * s + w * kink;
}

double distortion_value(const Distribution& d, const DistortionParams& prm) {
    // g is piecewise linear with kinks at beta - beta_i and 1 - beta_i; on
    // each piece, integrating q_{1-s} dg(s) reduces to the piece's slope
    // times an averaged quantile.
    const double p1 = prm.beta - prm.beta_i;
    const double p2 = 1.0 - prm.beta_i;
    double pts[4] = {0.0, p1, p2, 1.0};
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double s1 = pts[k], s2 = pts[k + 1];
        if (s2 - s1 <= 1e-15) continue;
        const double slope = (distortion_g(s2, prm) - distortion_g(s1, prm)) / (s2 - s1);
        total += slope * (d.quantile_integral(1.0 - s1) - d.quantile_integral(1.0 - s2));
    }
    return total;
}

double distortion_value_identity(const Distribution& d, const DistortionParams& prm) {
    distortion_g(0.0, prm); // parameter validation
    IntervalSet I({{0.0, prm.beta_i}, {1.0 - prm.beta + prm.beta_i, 1.0}});
    return prm.lambda * d.mean() + (1.0 - prm.lambda) * avg_quantile(d, I);
}

DualResult dual_sup(const SharingProblem& p, double t) {
    const Sizes sz = validate(p);
    DualResult res;
    res.value = avg_window(p.total, sz.beta, 1.0);
    const double mean =
        std::accumulate(p.total.begin(), p.total.end(), 0.0) / static_cast<double>(sz.m);
    res.identity_value = (mean - sz.beta * inf_convolution(p)) / (1.0 - sz.beta);
    res.alloc = optimal_allocation(p, t);
    double av = 0.0;
    for (std::size_t i = 0; i < sz.n; ++i)
        av += avg_window(res.alloc.parts[i], p.betas[i], 1.0 - sz.beta + p.betas[i]);
    res.alloc_value = av;
    return res;
}

} // namespace riskbounds
