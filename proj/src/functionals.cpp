#include "riskbounds/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "riskbounds/errors.hpp"

namespace riskbounds {

double avg_quantile(const Distribution& d, const IntervalSet& I) {
    if (I.empty()) throw EmptyIntervalSet("avg_quantile requires a nonempty interval set");
    if (const auto* xs = d.sorted_samples()) return empirical_avg_quantile(*xs, I);
    double acc = 0.0;
    for (const auto& [a, b] : I.intervals())
        acc += d.quantile_integral(b) - d.quantile_integral(a);
    return acc / I.total_length();
}

double rvar(const Distribution& d, double beta, double alpha) {
    if (!(beta >= 0.0 && alpha > 0.0 && beta + alpha <= 1.0))
        throw InvalidProbability("rvar requires beta >= 0, alpha > 0, beta + alpha <= 1");
    return avg_quantile(d, IntervalSet(1.0 - beta - alpha, 1.0 - beta));
}

double iqd(const Distribution& d, double r, double s, bool upper_right, bool lower_left) {
    if (!(r > 0.0 && r <= s && s < 1.0))
        throw InvalidProbability("iqd requires 0 < r <= s < 1");
    const double hi = upper_right ? d.quantile_right(s) : d.quantile_left(s);
    const double lo = lower_left ? d.quantile_left(r) : d.quantile_right(r);
    return hi - lo;
}

namespace {

double adaptive_simpson(const Distribution& d, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = d.quantile_left(lm), frm = d.quantile_left(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(d, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(d, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double quad_piece(const Distribution& d, double a, double b, double tol, double eps_end) {
    a = std::max(a, eps_end);
    b = std::min(b, 1.0 - eps_end);
    if (b <= a) return 0.0;
    const double fa = d.quantile_left(a), fb = d.quantile_left(b);
    const double m = 0.5 * (a + b);
    const double fm = d.quantile_left(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double scale = std::max(1.0, std::fabs(whole));
    return adaptive_simpson(d, a, b, fa, fm, fb, whole, tol * scale, 48);
}

} // namespace

double avg_quantile_quadrature(const Distribution& d, const IntervalSet& I, double tol,
                               double eps_end) {
    if (I.empty()) throw EmptyIntervalSet("quadrature requires a nonempty interval set");
    double acc = 0.0;
    for (const auto& [a, b] : I.intervals()) acc += quad_piece(d, a, b, tol, eps_end);
    return acc / I.total_length();
}

double empirical_quantile_left(const std::vector<double>& sorted, double t) {
    const auto m = static_cast<double>(sorted.size());
    auto k = static_cast<std::size_t>(std::ceil(t * m - 1e-9));
    k = std::clamp<std::size_t>(k, 1, sorted.size());
    return sorted[k - 1];
}

double empirical_quantile_right(const std::vector<double>& sorted, double t) {
    const auto m = static_cast<double>(sorted.size());
    auto k = static_cast<std::size_t>(std::floor(t * m + 1e-9));
    k = std::min(k, sorted.size() - 1);
    return sorted[k];
}

namespace {

// Partial sum over the sorted atoms measured in atom units: full atoms plus a
// fractional share of the next one. Snapping t*m to the nearest integer keeps
// atom-aligned windows exact.
struct AtomSum {
    double sum;
    double count;
};

AtomSum atom_partial_sum(const std::vector<double>& sorted, double t) {
    if (sorted.empty()) throw InvalidParams("empty sample");
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidProbability("t must lie in [0,1]");
    const auto m = static_cast<double>(sorted.size());
    double tm = t * m;
    const double rtm = std::nearbyint(tm);
    if (std::fabs(tm - rtm) <= 1e-9) tm = rtm;
    auto full = static_cast<std::size_t>(std::floor(tm));
    full = std::min(full, sorted.size());
    double s = 0.0;
    for (std::size_t k = 0; k < full; ++k) s += sorted[k];
    if (full < sorted.size() && tm > static_cast<double>(full))
        s += (tm - static_cast<double>(full)) * sorted[full];
    return {s, tm};
}

} // namespace

double empirical_quantile_integral(const std::vector<double>& sorted, double t) {
    const AtomSum ps = atom_partial_sum(sorted, t);
    return ps.sum / static_cast<double>(sorted.size());
}

double empirical_avg_quantile(const std::vector<double>& sorted, const IntervalSet& I) {
    if (I.empty()) throw EmptyIntervalSet("empty interval set");
    double acc = 0.0, len = 0.0;
    for (const auto& [a, b] : I.intervals()) {
        const AtomSum hi = atom_partial_sum(sorted, b);
        const AtomSum lo = atom_partial_sum(sorted, a);
        acc += hi.sum - lo.sum;
        len += hi.count - lo.count;
    }
    return acc / len;
}

} // namespace riskbounds
