#pragma once

#include <vector>

#include "riskbounds/distribution.hpp"
#include "riskbounds/interval_set.hpp"

namespace riskbounds {

// Average of the left quantile over an interval set:
//   R_I(mu) = (1/|I|) * integral_I q_t^-(mu) dt.
// Uses the closed-form quantile antiderivative of the distribution.
double avg_quantile(const Distribution& d, const IntervalSet& I);

// Range value at risk: RVaR_{beta,alpha} = R_{[1-beta-alpha, 1-beta]}.
double rvar(const Distribution& d, double beta, double alpha);

// Inter-quantile difference q_s - q_r with one-sided variants. The defaults
// give the upper-minus-lower reading q_s^+ - q_r^-.
double iqd(const Distribution& d, double r, double s, bool upper_right = true,
           bool lower_left = true);

// Cross-check path: adaptive Simpson quadrature of the quantile over I.
// Integration is clipped to [eps_end, 1 - eps_end] whenever the quantile is
// unbounded at the touched endpoint.
double avg_quantile_quadrature(const Distribution& d, const IntervalSet& I,
                               double tol = 1e-8, double eps_end = 1e-9);

// Exact functionals of an equal-weight sample. `sorted` must be ascending.
double empirical_quantile_left(const std::vector<double>& sorted, double t);
double empirical_quantile_right(const std::vector<double>& sorted, double t);
double empirical_quantile_integral(const std::vector<double>& sorted, double t);
double empirical_avg_quantile(const std::vector<double>& sorted, const IntervalSet& I);

} // namespace riskbounds
