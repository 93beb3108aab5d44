#pragma once

#include <string>
#include <vector>

#include "riskbounds/distribution.hpp"
#include "riskbounds/simplex.hpp"

namespace riskbounds {

// Aggregation window [r, r+s] for the sum of the given marginals under
// unknown dependence.
struct BoundProblem {
    std::vector<Distribution> marginals;
    double r = 0.0;
    double s = 1.0;
};

enum class Sharpness { unknown, certified_by_condition, certified_by_oracle };

struct BoundResult {
    double value = 0.0;
    SimplexPoint argpoint;
    Sharpness sharp = Sharpness::unknown;
    std::string sharp_note;
    bool beta0_at_bound = false;
    std::size_t evaluations = 0;
};

// Right-hand side of the generalized RVaR inequality for explicit
// (alpha_i, beta_i) splittings. Zero-length window pieces contribute zero.
double new_rvar_rhs(const std::vector<Distribution>& mus, double r, double s,
                    const std::vector<double>& alphas, const std::vector<double>& betas);

// Simplified form: alpha_i in (0, 1-r) with sum(alpha) = s.
double simplified_rhs(const std::vector<Distribution>& mus, double r, double s,
                      const std::vector<double>& alphas);

// Optimized dependence-uncertainty bounds on R_{[r,r+s]} of the sum.
BoundResult upper_bound_rvar(const BoundProblem& p, const SearchConfig& cfg = {});
BoundResult lower_bound_rvar(const BoundProblem& p, const SearchConfig& cfg = {});

// Reference convolution bounds (tail-window form).
BoundResult bllw_upper(const BoundProblem& p, const SearchConfig& cfg = {});
BoundResult bllw_lower(const BoundProblem& p, const SearchConfig& cfg = {});

// Smallest x in (0, 1/n) where the two-point quantile average at
// ((n-1)x, 1-x) drops below the interval average; 1/n when no x qualifies.
double c_n(const Distribution& d, int n, int grid = 20000);

struct HomoResult {
    double value = 0.0;
    double cn_literal = 0.0;     // c_n of the distribution as stated
    double cn_transformed = 0.0; // c_n of the reflected conditional tail
    bool literal_ok = false;
    bool transformed_ok = false;
};

// Closed-form bounds for n identical marginals with monotone density on the
// support. The threshold condition is checked both as literally stated and
// on the reflected conditional tail; either passing admits the formula.
HomoResult homo_upper(const Distribution& d, int n, double r, double s);
HomoResult homo_lower(const Distribution& d, int n, double r, double s);

struct IrdResult {
    double value = 0.0;
    BoundResult upper_component; // bound for R_{[r2,s2]}
    BoundResult lower_component; // bound for R_{[r1,s1]}
    std::string upper_formula;   // "new", "bllw", or "min(new,bllw)"
    std::string lower_formula;   // "new", "bllw", or "max(new,bllw)"
};

// Worst-case inter-RVaR difference R_{[r2,s2]} - R_{[r1,s1]} of the sum,
// 0 <= r1 < s1 <= r2 < s2 <= 1. Decomposes exactly into an upper bound for
// the upper window minus a lower bound for the lower window; the component
// formulas are picked from the declared density directions.
IrdResult ird_sup(const std::vector<Distribution>& mus, double r1, double s1,
                  double r2, double s2, const SearchConfig& cfg = {});

struct QdiffResult {
    double value = 0.0;
    double sup_term = 0.0;
    double inf_term = 0.0;
    SimplexPoint sup_arg;
    SimplexPoint inf_arg;
};

// Worst-case inter-quantile difference q_s^+ - q_r^- of the sum, 0 < r <= s < 1.
QdiffResult quantile_diff_sup(const std::vector<Distribution>& mus, double r, double s,
                              const SearchConfig& cfg = {});

// Upgrades the sharpness flag when an independent coupling search comes
// within tol of the bound.
void certify_with_oracle(BoundResult& res, double oracle_value, double tol = 5e-3);

} // namespace riskbounds
