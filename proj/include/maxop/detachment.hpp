#pragma once

#include <map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "maxop/pwl.hpp"
#include "maxop/scalespace.hpp"

namespace maxop {

/// Open interval; endpoints may be +-infinity.
struct Interval {
    double lo;
    double hi;
    bool operator==(const Interval&) const = default;
};

/// Sorted disjoint open intervals.
struct IntervalSet {
    std::vector<Interval> intervals;

    bool empty() const { return intervals.empty(); }
    bool contains(double x) const;
    /// Total length, unbounded pieces clipped to [clip_lo, clip_hi].
    double measure(double clip_lo, double clip_hi) const;
};

/// Maximal open intervals where ustar - u exceeds delta, with endpoints
/// located by linear interpolation of the sampled difference between grid
/// points. Unbounded rays are produced when the condition holds at a grid
/// boundary. Requires delta > profile.err so the certification error cannot
/// flip the classification.
IntervalSet detachment_set(const MaximalProfile& profile, const PiecewiseLinearFn& u, double delta);

/// The detachment set split relative to the breakpoints a_1 < ... < a_{N+1}
/// of a step function: d1 collects the intervals containing at least one
/// breakpoint, d2[i] the intervals inside the i-th gap (gap 0 is (-inf,a_1),
/// gap N+1 is (a_{N+1},inf)).
struct DetachmentDecomposition {
    IntervalSet d1;
    std::map<int, IntervalSet> d2;
    std::vector<double> breakpoints;
};

DetachmentDecomposition decompose(const IntervalSet& D, const StepFunction& v);

void to_json(nlohmann::json& j, const IntervalSet& s);
void to_json(nlohmann::json& j, const DetachmentDecomposition& d);

}  // namespace maxop
