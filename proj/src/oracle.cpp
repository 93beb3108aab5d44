#include "riskbounds/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "riskbounds/errors.hpp"
#include "riskbounds/functionals.hpp"
#include "riskbounds/interval_set.hpp"

namespace riskbounds {

std::vector<double> DiscreteCoupling::row_sums() const {
    std::vector<double> sums(rows(), 0.0);
    for (const auto& col : columns)
        for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += col[j];
    return sums;
}

DiscreteCoupling discretize(const std::vector<Distribution>& mus, std::size_t m) {
    if (mus.empty()) throw InvalidParams("at least one marginal required");
    if (m < 1) throw InvalidParams("discretization needs at least one atom");
    DiscreteCoupling c;
    c.columns.resize(mus.size());
    for (std::size_t i = 0; i < mus.size(); ++i) {
        c.columns[i].resize(m);
        for (std::size_t j = 0; j < m; ++j)
            c.columns[i][j] = mus[i].quantile_left((j + 0.5) / static_cast<double>(m));
    }
    return c;
}

namespace {

using Matrix = std::vector<std::vector<double>>;

std::vector<double> matrix_row_sums(const Matrix& cols) {
    std::vector<double> sums(cols.front().size(), 0.0);
    for (const auto& col : cols)
        for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += col[j];
    return sums;
}

// Within the given rows, reorder column `ci` antithetically to the sum of
// the other columns.
void antithetic_pass(Matrix& cols, std::vector<double>& sums, std::size_t ci,
                     const std::vector<std::size_t>& rows) {
    auto& col = cols[ci];
    std::vector<std::size_t> order(rows);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double oa = sums[a] - col[a], ob = sums[b] - col[b];
        if (oa != ob) return oa > ob;
        return a < b;
    });
    std::vector<double> vals;
    vals.reserve(rows.size());
    for (std::size_t j : rows) vals.push_back(col[j]);
    std::sort(vals.begin(), vals.end());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t j = order[k];
        sums[j] -= col[j];
        col[j] = vals[k];
        sums[j] += col[j];
    }
}

// Sum of the k smallest row sums.
double bottom_k_sum(const std::vector<double>& sums, std::size_t k) {
    std::vector<double> s(sums);
    std::sort(s.begin(), s.end());
    return std::accumulate(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
}

std::vector<std::size_t> top_rows(const std::vector<double>& sums, std::size_t count) {
    std::vector<std::size_t> idx(sums.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (sums[a] != sums[b]) return sums[a] > sums[b];
        return a < b;
    });
    idx.resize(count);
    return idx;
}

// Rearranges `cols` in place to (approximately) maximize the sum of the k
// smallest row sums. Alternates whole-matrix flattening passes with passes
// restricted to the rows currently above the k-th smallest sum, and keeps
// the best arrangement seen. Returns the number of sweeps spent.
int block_ra_max_bottom_k(Matrix& cols, std::size_t k, const RAConfig& cfg,
                          double& best_obj) {
    const std::size_t mrows = cols.front().size();
    std::vector<double> sums = matrix_row_sums(cols);
    Matrix best = cols;
    best_obj = bottom_k_sum(sums, k);
    if (k >= mrows || cols.size() < 2) return 0;

    std::vector<std::size_t> all(mrows);
    std::iota(all.begin(), all.end(), 0);
    int stalls = 0;
    int sweep = 0;
    for (; sweep < cfg.max_sweeps; ++sweep) {
        for (std::size_t ci = 0; ci < cols.size(); ++ci)
            antithetic_pass(cols, sums, ci, all);
        double obj = bottom_k_sum(sums, k);
        bool improved = obj > best_obj + cfg.tol;
        if (improved) {
            best_obj = obj;
            best = cols;
        }
        const auto active = top_rows(sums, mrows - k);
        for (std::size_t ci = 0; ci < cols.size(); ++ci)
            antithetic_pass(cols, sums, ci, active);
        obj = bottom_k_sum(sums, k);
        if (obj > best_obj + cfg.tol) {
            best_obj = obj;
            best = cols;
            improved = true;
        }
        stalls = improved ? 0 : stalls + 1;
        if (stalls >= 2) break;
    }
    cols = best;
    return sweep + 1;
}

void shuffle_tail_columns(Matrix& cols, std::mt19937_64& rng) {
    for (std::size_t ci = 1; ci < cols.size(); ++ci)
        std::shuffle(cols[ci].begin(), cols[ci].end(), rng);
}

// Flattens the block rows: repeated antithetic passes over all columns until
// the spread of the block row sums stops shrinking.
void flatten_rows(Matrix& cols, const std::vector<std::size_t>& rows, const RAConfig& cfg) {
    if (cols.size() < 2 || rows.size() < 2) return;
    std::vector<double> sums = matrix_row_sums(cols);
    auto spread = [&]() {
        double lo = sums[rows.front()], hi = lo;
        for (std::size_t j : rows) {
            lo = std::min(lo, sums[j]);
            hi = std::max(hi, sums[j]);
        }
        return hi - lo;
    };
    double prev = spread();
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        for (std::size_t ci = 0; ci < cols.size(); ++ci)
            antithetic_pass(cols, sums, ci, rows);
        const double cur = spread();
        if (cur >= prev - cfg.tol) break;
        prev = cur;
    }
}

void check_ra_window(const std::vector<Distribution>& mus, double r, double s) {
    if (mus.empty()) throw InvalidParams("at least one marginal required");
    if (!(r >= 0.0 && s > 0.0 && r + s <= 1.0 + 1e-12))
        throw InvalidProbability("window requires r >= 0, s > 0, r + s <= 1");
}

} // namespace

OracleResult ra_sup_rvar(const std::vector<Distribution>& mus, double r, double s,
                         const RAConfig& cfg) {
    check_ra_window(mus, r, s);
    const std::size_t m = cfg.m;
    DiscreteCoupling full = discretize(mus, m);
    const auto k_r = static_cast<std::size_t>(std::llround(r * static_cast<double>(m)));
    const auto k_rs = static_cast<std::size_t>(
        std::min<long long>(std::llround((r + s) * static_cast<double>(m)),
                            static_cast<long long>(m)));
    const std::size_t mt = m - k_r;      // tail block size
    const std::size_t k = k_rs - k_r;    // rows of the tail inside the window

    Matrix tail(mus.size());
    for (std::size_t i = 0; i < mus.size(); ++i)
        tail[i].assign(full.columns[i].begin() + static_cast<std::ptrdiff_t>(k_r),
                       full.columns[i].end());

    std::mt19937_64 rng(cfg.seed);
    Matrix best_tail = tail;
    double best_obj = -std::numeric_limits<double>::infinity();
    int best_sweeps = 0;
    const int total_starts = 2 + std::max(0, cfg.restarts);
    for (int rep = 0; rep < total_starts; ++rep) {
        Matrix work = tail; // columns sorted ascending: comonotone start
        if (rep == 1 && mt > 1) {
            for (std::size_t ci = 1; ci < work.size(); ++ci)
                std::reverse(work[ci].begin(), work[ci].end());
        } else if (rep >= 2) {
            shuffle_tail_columns(work, rng);
        }
        double obj = 0.0;
        const int sweeps = block_ra_max_bottom_k(work, std::min(k, mt), cfg, obj);
        if (obj > best_obj) {
            best_obj = obj;
            best_tail = work;
            best_sweeps = sweeps;
        }
    }

    OracleResult res;
    res.coupling = full;
    for (std::size_t i = 0; i < mus.size(); ++i)
        std::copy(best_tail[i].begin(), best_tail[i].end(),
                  res.coupling.columns[i].begin() + static_cast<std::ptrdiff_t>(k_r));
    res.value = evaluate_rvar(res.coupling, r, s);
    res.sweeps_used = best_sweeps;
    return res;
}

OracleResult ra_inf_rvar(const std::vector<Distribution>& mus, double r, double s,
                         const RAConfig& cfg) {
    check_ra_window(mus, r, s);
    std::vector<Distribution> negs;
    negs.reserve(mus.size());
    for (const auto& d : mus) negs.push_back(negate(d));
    OracleResult mirrored = ra_sup_rvar(negs, 1.0 - r - s, s, cfg);

    OracleResult res;
    res.coupling.columns.resize(mirrored.coupling.columns.size());
    for (std::size_t i = 0; i < mirrored.coupling.columns.size(); ++i) {
        auto& col = res.coupling.columns[i];
        const auto& src = mirrored.coupling.columns[i];
        col.resize(src.size());
        for (std::size_t j = 0; j < src.size(); ++j) col[j] = -src[src.size() - 1 - j];
    }
    res.value = evaluate_rvar(res.coupling, r, s);
    res.sweeps_used = mirrored.sweeps_used;
    return res;
}

double evaluate_functional(const std::vector<double>& sorted_sums, const Functional& f) {
    switch (f.type) {
        case Functional::Type::rvar:
            return empirical_avg_quantile(sorted_sums, IntervalSet(f.r, f.r + f.s));
        case Functional::Type::quantile_left:
            return empirical_quantile_left(sorted_sums, f.t);
        case Functional::Type::quantile_right:
            return empirical_quantile_right(sorted_sums, f.t);
    }
    throw InvalidParams("unknown functional");
}

ExhaustiveResult exhaustive_extreme(const std::vector<Distribution>& mus, std::size_t m,
                                    const Functional& f, ExtremeKind kind) {
    if (mus.size() < 1) throw InvalidParams("at least one marginal required");
    const std::size_t n = mus.size();
    double count = 1.0;
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t v = 2; v <= m; ++v) {
            count *= static_cast<double>(v);
            if (count > 1e7) throw InstanceTooLarge("more than 1e7 couplings to enumerate");
        }

    DiscreteCoupling base = discretize(mus, m);
    std::vector<std::vector<std::size_t>> perms(n);
    for (auto& p : perms) {
        p.resize(m);
        std::iota(p.begin(), p.end(), 0);
    }

    const double sign = kind == ExtremeKind::sup ? 1.0 : -1.0;
    ExhaustiveResult res;
    res.value = -std::numeric_limits<double>::infinity();
    std::vector<double> sums(m);

    // Odometer over the permutations of columns 2..n.
    bool done = false;
    while (!done) {
        for (std::size_t j = 0; j < m; ++j) {
            double s = base.columns[0][j];
            for (std::size_t i = 1; i < n; ++i) s += base.columns[i][perms[i][j]];
            sums[j] = s;
        }
        std::vector<double> sorted(sums);
        std::sort(sorted.begin(), sorted.end());
        const double v = sign * evaluate_functional(sorted, f);
        ++res.couplings_checked;
        if (v > res.value) {
            res.value = v;
            res.coupling.columns.assign(n, {});
            for (std::size_t i = 0; i < n; ++i) {
                res.coupling.columns[i].resize(m);
                for (std::size_t j = 0; j < m; ++j)
                    res.coupling.columns[i][j] =
                        i == 0 ? base.columns[0][j] : base.columns[i][perms[i][j]];
            }
        }
        done = true;
        for (std::size_t i = 1; i < n; ++i) {
            if (std::next_permutation(perms[i].begin(), perms[i].end())) {
                done = false;
                break;
            }
        }
    }
    res.value *= sign;
    return res;
}

DiscreteCoupling corner_coupling(const std::vector<Distribution>& mus, double r, double s,
                                 const CornerSpec& spec, std::size_t m, const RAConfig& cfg) {
    if (mus.empty()) throw InvalidParams("at least one marginal required");
    if (!(r > 0.0 && r <= s && s < 1.0))
        throw InvalidProbability("corner coupling requires 0 < r <= s < 1");
    DiscreteCoupling c = discretize(mus, m);
    const auto k_r = static_cast<std::size_t>(std::llround(r * static_cast<double>(m)));
    const auto k_s = static_cast<std::size_t>(std::llround(s * static_cast<double>(m)));

    auto apply = [&](std::size_t lo, std::size_t hi, TailCoupling kind) {
        if (hi - lo < 2) return;
        if (kind == TailCoupling::comonotone) return;
        if (kind == TailCoupling::antithetic) {
            for (std::size_t ci = 1; ci < c.columns.size(); ++ci)
                std::reverse(c.columns[ci].begin() + static_cast<std::ptrdiff_t>(lo),
                             c.columns[ci].begin() + static_cast<std::ptrdiff_t>(hi));
            return;
        }
        std::vector<std::size_t> rows(hi - lo);
        std::iota(rows.begin(), rows.end(), lo);
        flatten_rows(c.columns, rows, cfg);
    };

    apply(0, k_r, spec.lower);
    apply(k_s, m, spec.upper);
    return c;
}

double evaluate_rvar(const DiscreteCoupling& c, double r, double s) {
    std::vector<double> sums = c.row_sums();
    std::sort(sums.begin(), sums.end());
    return empirical_avg_quantile(sums, IntervalSet(r, r + s));
}

double evaluate_ird(const DiscreteCoupling& c, double r1, double s1, double r2, double s2) {
    std::vector<double> sums = c.row_sums();
    std::sort(sums.begin(), sums.end());
    return empirical_avg_quantile(sums, IntervalSet(r2, s2)) -
           empirical_avg_quantile(sums, IntervalSet(r1, s1));
}

bool blocks_disjoint(const DiscreteCoupling& c, std::size_t k_lower, std::size_t k_upper) {
    const std::vector<double> sums = c.row_sums();
    if (k_lower == 0 || k_upper >= sums.size()) return true;
    double max_low = -std::numeric_limits<double>::infinity();
    double min_high = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k_lower; ++j) max_low = std::max(max_low, sums[j]);
    for (std::size_t j = k_upper; j < sums.size(); ++j) min_high = std::min(min_high, sums[j]);
    return max_low <= min_high + 1e-12;
}

void export_csv(const DiscreteCoupling& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    for (std::size_t i = 0; i < c.columns.size(); ++i)
        out << (i ? "," : "") << "x" << (i + 1);
    out << "\n";
    out.precision(17);
    for (std::size_t j = 0; j < c.rows(); ++j) {
        for (std::size_t i = 0; i < c.columns.size(); ++i)
            out << (i ? "," : "") << c.columns[i][j];
        out << "\n";
    }
}

} // namespace riskbounds
