#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskbounds/distribution.hpp"

namespace riskbounds {

// Equal-weight coupling of discretized marginals. Column i holds the m-point
// midpoint quantile grid of marginal i in some row order; row j across the
// columns is one joint atom with weight 1/m.
struct DiscreteCoupling {
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    std::vector<double> row_sums() const;
};

struct RAConfig {
    std::size_t m = 1000;
    int max_sweeps = 200;
    double tol = 1e-9;
    int restarts = 5;
    std::uint64_t seed = 42;
};

struct OracleResult {
    double value = 0.0;
    DiscreteCoupling coupling;
    int sweeps_used = 0; // sweeps of the best restart
};

// Comonotone midpoint discretization: columns[i][j] = q^-_{(j+1/2)/m}(mu_i).
DiscreteCoupling discretize(const std::vector<Distribution>& mus, std::size_t m);

// Rearrangement search for extreme R_{[r,r+s]} of the sum. Rows below level r
// stay comonotone; the tail block is swept column by column, each column made
// antithetic to the sum of the others within the active probability block.
OracleResult ra_sup_rvar(const std::vector<Distribution>& mus, double r, double s,
                         const RAConfig& cfg = {});
OracleResult ra_inf_rvar(const std::vector<Distribution>& mus, double r, double s,
                         const RAConfig& cfg = {});

struct Functional {
    enum class Type { rvar, quantile_left, quantile_right };
    Type type = Type::rvar;
    double r = 0.0;
    double s = 1.0; // window length for rvar
    double t = 0.5; // level for quantile functionals
};

enum class ExtremeKind { sup, inf };

struct ExhaustiveResult {
    double value = 0.0;
    DiscreteCoupling coupling;
    std::uint64_t couplings_checked = 0;
};

// Full enumeration over all row permutations of columns 2..n. Rejects
// instances with more than 1e7 couplings.
ExhaustiveResult exhaustive_extreme(const std::vector<Distribution>& mus, std::size_t m,
                                    const Functional& f, ExtremeKind kind);

enum class TailCoupling { comonotone, antithetic, ra };

struct CornerSpec {
    TailCoupling lower = TailCoupling::comonotone;
    TailCoupling upper = TailCoupling::comonotone;
};

// Three-block construction for 0 < r <= s < 1: the lower block carries the
// mass below r, the middle block (r,s] is comonotone, the upper block the
// mass above s. Tail blocks are coupled per spec; `ra` flattens the block
// sums by antithetic column sweeps.
DiscreteCoupling corner_coupling(const std::vector<Distribution>& mus, double r, double s,
                                 const CornerSpec& spec, std::size_t m = 1000,
                                 const RAConfig& cfg = {});

// Functionals of a coupling's sum.
double evaluate_rvar(const DiscreteCoupling& c, double r, double s);
double evaluate_ird(const DiscreteCoupling& c, double r1, double s1, double r2, double s2);
double evaluate_functional(const std::vector<double>& sorted_sums, const Functional& f);

// True when every row sum of the first k rows is at most every row sum from
// row k_upper on.
bool blocks_disjoint(const DiscreteCoupling& c, std::size_t k_lower, std::size_t k_upper);

void export_csv(const DiscreteCoupling& c, const std::string& path);

} // namespace riskbounds
