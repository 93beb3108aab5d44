#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskbounds/distribution.hpp"

namespace riskbounds {

// Discrete risk-sharing instance: an equal-weight sample of the total risk X
// and tail weights beta_i > 0 with beta = sum(beta_i) < 1. Each m * beta_i
// must be an integer so that the agent windows [0,beta_i] u [1-beta+beta_i,1]
// align with the atoms.
struct SharingProblem {
    std::vector<double> total;
    std::vector<double> betas;
};

struct Allocation {
    std::vector<std::vector<double>> parts; // parts[i][j]; sums to total[j] over i
    double t = 0.0;                         // constant used in the construction
};

struct DistortionParams {
    double lambda = 0.0;
    double beta = 0.0;
    double beta_i = 0.0;
};

// Smallest achievable aggregate exposure: R_{[0,beta]}(X).
double inf_convolution(const SharingProblem& p);

// The extremal allocation: X - t on a block A_i of the lowest m*beta atoms,
// X/n off the low region, t/(n-1) on the rest of the low region. Requires
// t >= max(0, max X).
Allocation optimal_allocation(const SharingProblem& p, double t);

// Aggregate exposure sum_i R_{[0,beta_i] u [1-beta+beta_i,1]}(X_i) of any
// allocation summing to the total.
double evaluate_allocation(const SharingProblem& p, const Allocation& a);

struct SequenceResult {
    Allocation alloc;
    double exposure = 0.0;  // aggregate exposure of the allocation
    double stop_loss = 0.0; // (1/beta) * mean((X - a_m)^+)
    double a_m = 0.0;       // n * m_param / (n - 1)
    double identity_gap = 0.0; // exposure - inf_convolution - stop_loss
    std::string note;
};

// The approximating sequence: same construction with t = m_param, which may
// sit below the essential supremum. Its exposure exceeds the inf-convolution
// by exactly the scaled stop-loss premium at a_m.
SequenceResult allocation_sequence(const SharingProblem& p, double m_param);

struct DependenceReport {
    bool holds = false;
    int case_id = 0;  // 1: low blocks cover the low region; 2: boundary tie case
    double theta = 0.0;
    std::string note;
};

// Checks the extremal dependence condition: some tie resolution of the ranks
// makes the event {X in its lowest beta mass} coincide with every agent's
// window event.
DependenceReport verify_dependence(const SharingProblem& p, const Allocation& a,
                                   std::uint64_t max_search = 10000);

// Distortion function of the averaged-quantile preference.
double distortion_g(double s, const DistortionParams& prm);

// rho_g(X) by direct quantile integration against g.
double distortion_value(const Distribution& d, const DistortionParams& prm);

// Same number through the identity lambda * E[X] + (1 - lambda) * R_I(X).
double distortion_value_identity(const Distribution& d, const DistortionParams& prm);

struct DualResult {
    double value = 0.0;          // R_{[beta,1]}(X)
    double identity_value = 0.0; // (E[X] - beta * R_{[0,beta]}(X)) / (1 - beta)
    Allocation alloc;
    double alloc_value = 0.0;    // sum_i R_{[beta_i, 1-beta+beta_i]} of the allocation
};

// The companion sup problem over the complementary windows.
DualResult dual_sup(const SharingProblem& p, double t);

} // namespace riskbounds
