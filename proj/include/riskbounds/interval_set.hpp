#pragma once

#include <utility>
#include <vector>

namespace riskbounds {

// A finite union of disjoint closed subintervals of [0,1] with positive
// length, kept sorted. Intervals that touch are merged on construction;
// zero-length pieces are dropped.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<std::pair<double, double>> intervals);
    IntervalSet(double a, double b);

    // Union-with-merge of two sets.
    IntervalSet unite(const IntervalSet& other) const;

    const std::vector<std::pair<double, double>>& intervals() const { return ivs_; }
    bool empty() const { return ivs_.empty(); }
    double total_length() const;
    double lower() const; // leftmost endpoint; throws if empty
    double upper() const; // rightmost endpoint; throws if empty
    bool touches_one(double eps = 0.0) const;
    bool touches_zero(double eps = 0.0) const;

private:
    std::vector<std::pair<double, double>> ivs_;
    void normalize();
};

} // namespace riskbounds
