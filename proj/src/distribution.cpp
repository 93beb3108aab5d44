#include "riskbounds/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "riskbounds/errors.hpp"

namespace riskbounds {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_prob_left(double t) {
    if (!(t > 0.0 && t <= 1.0))
        throw InvalidProbability("left quantile requires t in (0,1]");
}

void check_prob_right(double t) {
    if (!(t >= 0.0 && t < 1.0))
        throw InvalidProbability("right quantile requires t in [0,1)");
}

void check_prob_closed(double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw InvalidProbability("probability level must lie in [0,1]");
}

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Wichura's PPND16 rational approximation, accurate to ~1e-16.
double norm_icdf(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                  3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

} // namespace

namespace detail {

class DistImpl {
public:
    virtual ~DistImpl() = default;
    virtual double ql(double t) const = 0;
    virtual double qr(double t) const = 0;
    virtual double Q(double t) const = 0; // integral of ql over [0,t]
    virtual double cdf(double x) const = 0;
    virtual double cdf_left(double x) const = 0;
    virtual bool mean_finite() const { return true; }
    virtual bool quantile_continuous() const { return true; }
    virtual const std::vector<double>* sorted() const { return nullptr; }
    virtual std::string describe() const = 0;

    TailMonotonicity tails;
};

namespace {

class UniformImpl : public DistImpl {
public:
    UniformImpl(double a, double b) : a_(a), b_(b) {
        if (!(a < b)) throw InvalidParams("uniform requires a < b");
    }
    double ql(double t) const override { return a_ + (b_ - a_) * t; }
    double qr(double t) const override { return ql(t); }
    double Q(double t) const override { return a_ * t + 0.5 * (b_ - a_) * t * t; }
    double cdf(double x) const override {
        return std::clamp((x - a_) / (b_ - a_), 0.0, 1.0);
    }
    double cdf_left(double x) const override { return cdf(x); }
    std::string describe() const override {
        std::ostringstream os;
        os << "uniform(" << a_ << "," << b_ << ")";
        return os.str();
    }

private:
    double a_, b_;
};

class ExponentialImpl : public DistImpl {
public:
    explicit ExponentialImpl(double rate) : rate_(rate) {
        if (!(rate > 0.0)) throw InvalidParams("exponential requires rate > 0");
    }
    double ql(double t) const override {
        if (t >= 1.0) return std::numeric_limits<double>::infinity();
        return -std::log1p(-t) / rate_;
    }
    double qr(double t) const override { return ql(t); }
    double Q(double t) const override {
        if (t >= 1.0) return 1.0 / rate_;
        return ((1.0 - t) * std::log1p(-t) + t) / rate_;
    }
    double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x); }
    double cdf_left(double x) const override { return cdf(x); }
    std::string describe() const override {
        std::ostringstream os;
        os << "exponential(" << rate_ << ")";
        return os.str();
    }

private:
    double rate_;
};

class ParetoImpl : public DistImpl {
public:
    ParetoImpl(double alpha, double scale) : alpha_(alpha), xm_(scale) {
        if (!(alpha > 0.0) || !(scale > 0.0))
            throw InvalidParams("pareto requires alpha > 0 and scale > 0");
    }
    double ql(double t) const override {
        if (t >= 1.0) return std::numeric_limits<double>::infinity();
        return xm_ * std::pow(1.0 - t, -1.0 / alpha_);
    }
    double qr(double t) const override { return ql(t); }
    double Q(double t) const override {
        if (t >= 1.0 && alpha_ <= 1.0)
            throw NonIntegrableTail("pareto with alpha <= 1 has no finite mean");
        const double e = 1.0 - 1.0 / alpha_;
        if (t >= 1.0) return xm_ / e;
        return xm_ * (1.0 - std::pow(1.0 - t, e)) / e;
    }
    bool mean_finite() const override { return alpha_ > 1.0; }
    double cdf(double x) const override {
        return x <= xm_ ? 0.0 : 1.0 - std::pow(xm_ / x, alpha_);
    }
    double cdf_left(double x) const override { return cdf(x); }
    std::string describe() const override {
        std::ostringstream os;
        os << "pareto(" << alpha_ << "," << xm_ << ")";
        return os.str();
    }

private:
    double alpha_, xm_;
};

class NormalImpl : public DistImpl {
public:
    NormalImpl(double mu, double sigma) : mu_(mu), sigma_(sigma) {
        if (!(sigma > 0.0)) throw InvalidParams("normal requires sigma > 0");
    }
    double ql(double t) const override { return mu_ + sigma_ * norm_icdf(t); }
    double qr(double t) const override { return ql(t); }
    double Q(double t) const override {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return mu_;
        return mu_ * t - sigma_ * norm_pdf(norm_icdf(t));
    }
    double cdf(double x) const override { return norm_cdf((x - mu_) / sigma_); }
    double cdf_left(double x) const override { return cdf(x); }
    std::string describe() const override {
        std::ostringstream os;
        os << "normal(" << mu_ << "," << sigma_ << ")";
        return os.str();
    }

private:
    double mu_, sigma_;
};

class LognormalImpl : public DistImpl {
public:
    LognormalImpl(double mu, double sigma) : mu_(mu), sigma_(sigma) {
        if (!(sigma > 0.0)) throw InvalidParams("lognormal requires sigma > 0");
    }
    double ql(double t) const override {
        if (t >= 1.0) return std::numeric_limits<double>::infinity();
        return std::exp(mu_ + sigma_ * norm_icdf(t));
    }
    double qr(double t) const override { return ql(t); }
    double Q(double t) const override {
        if (t <= 0.0) return 0.0;
        const double m = std::exp(mu_ + 0.5 * sigma_ * sigma_);
        if (t >= 1.0) return m;
        return m * norm_cdf(norm_icdf(t) - sigma_);
    }
    double cdf(double x) const override {
        return x <= 0.0 ? 0.0 : norm_cdf((std::log(x) - mu_) / sigma_);
    }
    double cdf_left(double x) const override { return cdf(x); }
    std::string describe() const override {
        std::ostringstream os;
        os << "lognormal(" << mu_ << "," << sigma_ << ")";
        return os.str();
    }

private:
    double mu_, sigma_;
};

class TriangularImpl : public DistImpl {
public:
    TriangularImpl(double a, double c, double b) : a_(a), c_(c), b_(b) {
        if (!(a < b) || !(a <= c && c <= b))
            throw InvalidParams("triangular requires a <= c <= b, a < b");
        p_ = (c_ - a_) / (b_ - a_);
    }
    double ql(double t) const override {
        if (t <= p_) return a_ + std::sqrt(t * (b_ - a_) * (c_ - a_));
        return b_ - std::sqrt((1.0 - t) * (b_ - a_) * (b_ - c_));
    }
    double qr(double t) const override { return ql(t); }
    double Q(double t) const override {
        const double kl = std::sqrt((b_ - a_) * (c_ - a_));
        const double kr = std::sqrt((b_ - a_) * (b_ - c_));
        if (t <= p_) return a_ * t + (2.0 / 3.0) * kl * std::pow(t, 1.5);
        const double at_p = a_ * p_ + (2.0 / 3.0) * kl * std::pow(p_, 1.5);
        return at_p + b_ * (t - p_) +
               (2.0 / 3.0) * kr * (std::pow(1.0 - t, 1.5) - std::pow(1.0 - p_, 1.5));
    }
    double cdf(double x) const override {
        if (x <= a_) return 0.0;
        if (x >= b_) return 1.0;
        if (x <= c_) return (x - a_) * (x - a_) / ((b_ - a_) * (c_ - a_));
        return 1.0 - (b_ - x) * (b_ - x) / ((b_ - a_) * (b_ - c_));
    }
    double cdf_left(double x) const override { return cdf(x); }
    std::string describe() const override {
        std::ostringstream os;
        os << "triangular(" << a_ << "," << c_ << "," << b_ << ")";
        return os.str();
    }

private:
    double a_, c_, b_, p_;
};

class PowerLawImpl : public DistImpl {
public:
    explicit PowerLawImpl(double k) : k_(k) {
        if (!(k > 0.0)) throw InvalidParams("power law requires k > 0");
    }
    double ql(double t) const override { return std::pow(t, 1.0 / k_); }
    double qr(double t) const override { return ql(t); }
    double Q(double t) const override {
        const double e = 1.0 + 1.0 / k_;
        return std::pow(t, e) / e;
    }
    double cdf(double x) const override {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return std::pow(x, k_);
    }
    double cdf_left(double x) const override { return cdf(x); }
    std::string describe() const override {
        std::ostringstream os;
        os << "power_law(" << k_ << ")";
        return os.str();
    }

private:
    double k_;
};

class PointMassImpl : public DistImpl {
public:
    explicit PointMassImpl(double c) : c_(c) {
        if (!std::isfinite(c)) throw InvalidParams("point mass requires a finite atom");
    }
    double ql(double) const override { return c_; }
    double qr(double) const override { return c_; }
    double Q(double t) const override { return c_ * t; }
    double cdf(double x) const override { return x >= c_ ? 1.0 : 0.0; }
    double cdf_left(double x) const override { return x > c_ ? 1.0 : 0.0; }
    std::string describe() const override {
        std::ostringstream os;
        os << "point_mass(" << c_ << ")";
        return os.str();
    }

private:
    double c_;
};

class EmpiricalImpl : public DistImpl {
public:
    explicit EmpiricalImpl(std::vector<double> values) : xs_(std::move(values)) {
        if (xs_.empty()) throw InvalidParams("empirical requires at least one value");
        for (double v : xs_)
            if (!std::isfinite(v)) throw InvalidParams("empirical values must be finite");
        std::sort(xs_.begin(), xs_.end());
    }
    double ql(double t) const override {
        const std::size_t m = xs_.size();
        std::size_t k = static_cast<std::size_t>(std::ceil(t * static_cast<double>(m) - 1e-12));
        k = std::clamp<std::size_t>(k, 1, m);
        return xs_[k - 1];
    }
    double qr(double t) const override {
        const std::size_t m = xs_.size();
        auto k = static_cast<std::size_t>(std::floor(t * static_cast<double>(m) + 1e-12));
        k = std::min(k, m - 1);
        return xs_[k];
    }
    double Q(double t) const override {
        const std::size_t m = xs_.size();
        const double tm = t * static_cast<double>(m);
        auto full = static_cast<std::size_t>(std::floor(tm + 1e-12));
        full = std::min(full, m);
        double s = 0.0;
        for (std::size_t k = 0; k < full; ++k) s += xs_[k];
        s /= static_cast<double>(m);
        if (full < m) s += (tm - static_cast<double>(full)) / static_cast<double>(m) * xs_[full];
        return s;
    }
    double cdf(double x) const override {
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        return static_cast<double>(it - xs_.begin()) / static_cast<double>(xs_.size());
    }
    double cdf_left(double x) const override {
        auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
        return static_cast<double>(it - xs_.begin()) / static_cast<double>(xs_.size());
    }
    bool quantile_continuous() const override { return xs_.front() == xs_.back(); }
    const std::vector<double>* sorted() const override { return &xs_; }
    std::string describe() const override {
        std::ostringstream os;
        os << "empirical(m=" << xs_.size() << ")";
        return os.str();
    }

private:
    std::vector<double> xs_;
};

class NegateImpl : public DistImpl {
public:
    explicit NegateImpl(std::shared_ptr<const DistImpl> base) : base_(std::move(base)) {
        tails.upper = base_->tails.lower == Direction::none
                          ? Direction::none
                          : (base_->tails.lower == Direction::increasing ? Direction::decreasing
                                                                         : Direction::increasing);
        tails.upper_threshold = 1.0 - base_->tails.lower_threshold;
        tails.lower = base_->tails.upper == Direction::none
                          ? Direction::none
                          : (base_->tails.upper == Direction::increasing ? Direction::decreasing
                                                                         : Direction::increasing);
        tails.lower_threshold = 1.0 - base_->tails.upper_threshold;
        if (base_->tails.on_support == Direction::increasing)
            tails.on_support = Direction::decreasing;
        else if (base_->tails.on_support == Direction::decreasing)
            tails.on_support = Direction::increasing;
    }
    double ql(double t) const override { return -base_->qr(1.0 - t); }
    double qr(double t) const override { return -base_->ql(1.0 - t); }
    double Q(double t) const override {
        if (t <= 0.0) return 0.0;
        return base_->Q(1.0 - t) - base_->Q(1.0);
    }
    double cdf(double x) const override { return 1.0 - base_->cdf_left(-x); }
    double cdf_left(double x) const override { return 1.0 - base_->cdf(-x); }
    bool mean_finite() const override { return base_->mean_finite(); }
    bool quantile_continuous() const override { return base_->quantile_continuous(); }
    std::string describe() const override { return "negate(" + base_->describe() + ")"; }

private:
    std::shared_ptr<const DistImpl> base_;
};

class TailUpperImpl : public DistImpl {
public:
    TailUpperImpl(std::shared_ptr<const DistImpl> base, double r)
        : base_(std::move(base)), r_(r) {
        if (!(r >= 0.0 && r < 1.0))
            throw InvalidProbability("upper tail transform requires r in [0,1)");
        tails.upper = base_->tails.upper;
        tails.upper_threshold =
            std::clamp((base_->tails.upper_threshold - r_) / (1.0 - r_), 0.0, 1.0);
    }
    double ql(double t) const override { return base_->ql(r_ + (1.0 - r_) * t); }
    double qr(double t) const override { return base_->qr(r_ + (1.0 - r_) * t); }
    double Q(double t) const override {
        return (base_->Q(r_ + (1.0 - r_) * t) - base_->Q(r_)) / (1.0 - r_);
    }
    double cdf(double x) const override {
        return (std::clamp(base_->cdf(x), r_, 1.0) - r_) / (1.0 - r_);
    }
    double cdf_left(double x) const override {
        return (std::clamp(base_->cdf_left(x), r_, 1.0) - r_) / (1.0 - r_);
    }
    bool mean_finite() const override { return base_->mean_finite(); }
    bool quantile_continuous() const override { return base_->quantile_continuous(); }
    std::string describe() const override {
        std::ostringstream os;
        os << "tail_upper(" << base_->describe() << "," << r_ << ")";
        return os.str();
    }

private:
    std::shared_ptr<const DistImpl> base_;
    double r_;
};

class TailLowerImpl : public DistImpl {
public:
    TailLowerImpl(std::shared_ptr<const DistImpl> base, double r)
        : base_(std::move(base)), r_(r) {
        if (!(r > 0.0 && r <= 1.0))
            throw InvalidProbability("lower tail transform requires r in (0,1]");
        tails.lower = base_->tails.lower;
        tails.lower_threshold = std::clamp(base_->tails.lower_threshold / r_, 0.0, 1.0);
    }
    double ql(double t) const override { return base_->ql(r_ * t); }
    double qr(double t) const override { return base_->qr(r_ * t); }
    double Q(double t) const override { return base_->Q(r_ * t) / r_; }
    double cdf(double x) const override { return std::min(base_->cdf(x), r_) / r_; }
    double cdf_left(double x) const override { return std::min(base_->cdf_left(x), r_) / r_; }
    bool quantile_continuous() const override { return base_->quantile_continuous(); }
    std::string describe() const override {
        std::ostringstream os;
        os << "tail_lower(" << base_->describe() << "," << r_ << ")";
        return os.str();
    }

private:
    std::shared_ptr<const DistImpl> base_;
    double r_;
};

class ShiftImpl : public DistImpl {
public:
    ShiftImpl(std::shared_ptr<const DistImpl> base, double c) : base_(std::move(base)), c_(c) {
        if (!std::isfinite(c)) throw InvalidParams("shift requires a finite offset");
        tails = base_->tails;
    }
    double ql(double t) const override { return base_->ql(t) + c_; }
    double qr(double t) const override { return base_->qr(t) + c_; }
    double Q(double t) const override { return base_->Q(t) + c_ * t; }
    double cdf(double x) const override { return base_->cdf(x - c_); }
    double cdf_left(double x) const override { return base_->cdf_left(x - c_); }
    bool mean_finite() const override { return base_->mean_finite(); }
    bool quantile_continuous() const override { return base_->quantile_continuous(); }
    std::string describe() const override {
        std::ostringstream os;
        os << "shift(" << base_->describe() << "," << c_ << ")";
        return os.str();
    }

private:
    std::shared_ptr<const DistImpl> base_;
    double c_;
};

class RetaggedImpl : public DistImpl {
public:
    RetaggedImpl(std::shared_ptr<const DistImpl> base, TailMonotonicity t)
        : base_(std::move(base)) {
        tails = t;
    }
    double ql(double t) const override { return base_->ql(t); }
    double qr(double t) const override { return base_->qr(t); }
    double Q(double t) const override { return base_->Q(t); }
    double cdf(double x) const override { return base_->cdf(x); }
    double cdf_left(double x) const override { return base_->cdf_left(x); }
    bool mean_finite() const override { return base_->mean_finite(); }
    bool quantile_continuous() const override { return base_->quantile_continuous(); }
    std::string describe() const override { return base_->describe(); }

private:
    std::shared_ptr<const DistImpl> base_;
};

} // namespace

} // namespace detail

Distribution::Distribution(std::shared_ptr<const detail::DistImpl> impl)
    : impl_(std::move(impl)) {}

double Distribution::quantile_left(double t) const {
    check_prob_left(t);
    return impl_->ql(t);
}

double Distribution::quantile_right(double t) const {
    check_prob_right(t);
    return impl_->qr(t);
}

double Distribution::quantile_integral(double t) const {
    check_prob_closed(t);
    if (t >= 1.0 && !impl_->mean_finite())
        throw NonIntegrableTail("quantile integral diverges at t = 1: " + impl_->describe());
    return impl_->Q(t);
}

bool Distribution::mean_finite() const { return impl_->mean_finite(); }
double Distribution::cdf(double x) const { return impl_->cdf(x); }
double Distribution::cdf_left(double x) const { return impl_->cdf_left(x); }
bool Distribution::quantile_continuous() const { return impl_->quantile_continuous(); }
const std::vector<double>* Distribution::sorted_samples() const { return impl_->sorted(); }
const TailMonotonicity& Distribution::tails() const { return impl_->tails; }
std::string Distribution::describe() const { return impl_->describe(); }

Distribution Distribution::with_tails(TailMonotonicity t) const {
    return Distribution(std::make_shared<detail::RetaggedImpl>(impl_, t));
}

Distribution Distribution::uniform(double a, double b) {
    return Distribution(std::make_shared<detail::UniformImpl>(a, b));
}
Distribution Distribution::exponential(double rate) {
    return Distribution(std::make_shared<detail::ExponentialImpl>(rate));
}
Distribution Distribution::pareto(double alpha, double scale) {
    return Distribution(std::make_shared<detail::ParetoImpl>(alpha, scale));
}
Distribution Distribution::normal(double mu, double sigma) {
    return Distribution(std::make_shared<detail::NormalImpl>(mu, sigma));
}
Distribution Distribution::lognormal(double mu, double sigma) {
    return Distribution(std::make_shared<detail::LognormalImpl>(mu, sigma));
}
Distribution Distribution::triangular(double a, double c, double b) {
    return Distribution(std::make_shared<detail::TriangularImpl>(a, c, b));
}
Distribution Distribution::power_law(double k) {
    return Distribution(std::make_shared<detail::PowerLawImpl>(k));
}
Distribution Distribution::point_mass(double c) {
    return Distribution(std::make_shared<detail::PointMassImpl>(c));
}
Distribution Distribution::empirical(std::vector<double> values) {
    return Distribution(std::make_shared<detail::EmpiricalImpl>(std::move(values)));
}

Distribution negate(const Distribution& d) {
    return Distribution(std::make_shared<detail::NegateImpl>(d.impl_));
}
Distribution tail_upper(const Distribution& d, double r) {
    return Distribution(std::make_shared<detail::TailUpperImpl>(d.impl_, r));
}
Distribution tail_lower(const Distribution& d, double r) {
    return Distribution(std::make_shared<detail::TailLowerImpl>(d.impl_, r));
}
Distribution shift(const Distribution& d, double c) {
    return Distribution(std::make_shared<detail::ShiftImpl>(d.impl_, c));
}

Direction density_direction_estimate(const Distribution& d, double t0, double t1,
                                     int samples) {
    if (!(t0 > 0.0 && t1 < 1.0 && t0 < t1))
        throw InvalidProbability("density estimate requires 0 < t0 < t1 < 1");
    if (samples < 5) samples = 5;
    // Density increasing <=> quantile concave; probe the sign of second
    // differences of the quantile on an even grid.
    int concave = 0, convex = 0;
    const double h = (t1 - t0) / (samples - 1);
    for (int i = 1; i + 1 < samples; ++i) {
        const double t = t0 + i * h;
        const double d2 = d.quantile_left(t - h) - 2.0 * d.quantile_left(t) +
                          d.quantile_left(t + h);
        if (d2 < -1e-12) ++concave;
        else if (d2 > 1e-12) ++convex;
    }
    const int inner = samples - 2;
    if (concave > 0 && convex == 0 && concave >= inner / 2) return Direction::increasing;
    if (convex > 0 && concave == 0 && convex >= inner / 2) return Direction::decreasing;
    return Direction::none;
}

} // namespace riskbounds
