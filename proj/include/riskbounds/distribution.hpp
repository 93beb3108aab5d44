#pragma once

#include <memory>
#include <string>
#include <vector>

namespace riskbounds {

enum class Direction { none, increasing, decreasing };

// User-declared density monotonicity. Nothing here is ever inferred from
// data; bound selection and sharpness certification trust these declarations.
// `upper` describes the density on [q_p, ess sup) with p = upper_threshold,
// `lower` the density on (ess inf, q_p] with p = lower_threshold, and
// `on_support` the density on the whole support.
struct TailMonotonicity {
    Direction upper = Direction::none;
    double upper_threshold = 1.0;
    Direction lower = Direction::none;
    double lower_threshold = 0.0;
    Direction on_support = Direction::none;
};

namespace detail {
class DistImpl;
}

// Immutable one-dimensional distribution described through its quantile
// function. Parametric families carry closed-form quantile antiderivatives;
// empirical samples use exact finite sums.
class Distribution {
public:
    // Left quantile q_t^- for t in (0,1].
    double quantile_left(double t) const;
    // Right quantile q_t^+ for t in [0,1).
    double quantile_right(double t) const;
    // Integral of the left quantile over [0,t], t in [0,1].
    double quantile_integral(double t) const;
    double mean() const { return quantile_integral(1.0); }
    bool mean_finite() const;
    double cdf(double x) const;      // P(X <= x)
    double cdf_left(double x) const; // P(X < x)
    bool quantile_continuous() const;
    // Sorted sample vector when the distribution is empirical, else nullptr.
    const std::vector<double>* sorted_samples() const;
    const TailMonotonicity& tails() const;
    Distribution with_tails(TailMonotonicity t) const;
    std::string describe() const;

    static Distribution uniform(double a, double b);
    static Distribution exponential(double rate);
    static Distribution pareto(double alpha, double scale = 1.0);
    static Distribution normal(double mu, double sigma);
    static Distribution lognormal(double mu, double sigma);
    static Distribution triangular(double a, double c, double b);
    static Distribution power_law(double k); // F(x) = x^k on [0,1]
    static Distribution point_mass(double c);
    static Distribution empirical(std::vector<double> values);

    friend Distribution negate(const Distribution& d);
    friend Distribution tail_upper(const Distribution& d, double r);
    friend Distribution tail_lower(const Distribution& d, double r);
    friend Distribution shift(const Distribution& d, double c);

private:
    explicit Distribution(std::shared_ptr<const detail::DistImpl> impl);
    std::shared_ptr<const detail::DistImpl> impl_;
};

// Law of the conditional upper tail beyond level r: quantile u -> q^-_{r+(1-r)u}.
Distribution tail_upper(const Distribution& d, double r);
// Law of the conditional lower tail below level r: quantile u -> q^-_{ru}.
Distribution tail_lower(const Distribution& d, double r);
Distribution negate(const Distribution& d);
Distribution shift(const Distribution& d, double c);

// Finite-difference spot check of the declared density direction on the
// quantile range (t0,t1). Diagnostic only; returns none when the sampled
// curvature is mixed or flat.
Direction density_direction_estimate(const Distribution& d, double t0, double t1,
                                     int samples = 33);

} // namespace riskbounds
