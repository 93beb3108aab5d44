#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace riskbounds {

// Point of the scaled approximate simplex: beta0 + sum(betas) = scale with
// beta0 > 0 and betas >= 0.
struct SimplexPoint {
    double beta0 = 0.0;
    std::vector<double> betas;
    double scale = 1.0;
};

struct SimplexConstraint {
    int n = 1;            // number of beta_i coordinates
    double scale = 1.0;   // total mass
    double beta0_min = 0.0;
};

struct SearchConfig {
    int coarse_grid_resolution = 12; // per-axis levels for n <= 3
    int lhs_samples = 5000;          // Latin hypercube samples for n > 3
    int refine_rounds = 4;
    double tol = 1e-8;               // coordinate polish step floor
    std::uint64_t seed = 1;
};

struct OptResult {
    SimplexPoint argpoint;
    double value = 0.0;
    bool beta0_at_bound = false; // optimum sits at the closure of the beta0 range
    std::size_t evaluations = 0;
};

using SimplexObjective = std::function<double(const SimplexPoint&)>;

// Derivative-free minimization: coarse exploration (grid for n <= 3, Latin
// hypercube otherwise), shrinking local refinement rounds, then pairwise
// mass-transfer polish. Deterministic for a fixed seed; ties break
// lexicographically on (value, beta0, betas).
OptResult minimize(const SimplexObjective& f, const SimplexConstraint& c,
                   const SearchConfig& cfg = {});
OptResult maximize(const SimplexObjective& f, const SimplexConstraint& c,
                   const SearchConfig& cfg = {});

// Evaluates the objective over a list of points (sequentially; points are
// independent so callers may shard the list across threads).
std::vector<double> batch_evaluate(const SimplexObjective& f,
                                   const std::vector<SimplexPoint>& pts);

// Euclidean projection of a raw vector (beta0 first, then betas) onto the
// constraint set.
SimplexPoint project(const std::vector<double>& raw, const SimplexConstraint& c);

} // namespace riskbounds
