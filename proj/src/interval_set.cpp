#include "riskbounds/interval_set.hpp"

#include <algorithm>
#include <cmath>

#include "riskbounds/errors.hpp"

namespace riskbounds {

namespace {
constexpr double kDegenerate = 1e-14;
}

IntervalSet::IntervalSet(std::vector<std::pair<double, double>> intervals)
    : ivs_(std::move(intervals)) {
    normalize();
}

IntervalSet::IntervalSet(double a, double b) : ivs_{{a, b}} {
    normalize();
}

void IntervalSet::normalize() {
    for (auto& [a, b] : ivs_) {
        if (!std::isfinite(a) || !std::isfinite(b) || a < -kDegenerate ||
            b > 1.0 + kDegenerate || a > b + kDegenerate) {
            throw InvalidProbability("interval endpoints must satisfy 0 <= a <= b <= 1");
        }
        a = std::clamp(a, 0.0, 1.0);
        b = std::clamp(b, 0.0, 1.0);
    }
    std::erase_if(ivs_, [](const auto& iv) { return iv.second - iv.first <= kDegenerate; });
    std::sort(ivs_.begin(), ivs_.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& iv : ivs_) {
        if (!merged.empty() && iv.first <= merged.back().second + kDegenerate) {
            merged.back().second = std::max(merged.back().second, iv.second);
        } else {
            merged.push_back(iv);
        }
    }
    ivs_ = std::move(merged);
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
    std::vector<std::pair<double, double>> all = ivs_;
    all.insert(all.end(), other.ivs_.begin(), other.ivs_.end());
    return IntervalSet(std::move(all));
}

double IntervalSet::total_length() const {
    double s = 0.0;
    for (const auto& [a, b] : ivs_) s += b - a;
    return s;
}

double IntervalSet::lower() const {
    if (ivs_.empty()) throw EmptyIntervalSet("lower() on empty interval set");
    return ivs_.front().first;
}

double IntervalSet::upper() const {
    if (ivs_.empty()) throw EmptyIntervalSet("upper() on empty interval set");
    return ivs_.back().second;
}

bool IntervalSet::touches_one(double eps) const {
    return !ivs_.empty() && ivs_.back().second >= 1.0 - eps;
}

bool IntervalSet::touches_zero(double eps) const {
    return !ivs_.empty() && ivs_.front().first <= eps;
}

} // namespace riskbounds
