#include "maxop/detachment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace maxop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool IntervalSet::contains(double x) const {
    for (const Interval& iv : intervals)
        if (x > iv.lo && x < iv.hi) return true;
    return false;
}

double IntervalSet::measure(double clip_lo, double clip_hi) const {
    double m = 0.0;
    for (const Interval& iv : intervals) {
        double lo = std::max(iv.lo, clip_lo);
        double hi = std::min(iv.hi, clip_hi);
        if (hi > lo) m += hi - lo;
    }
    return m;
}

IntervalSet detachment_set(const MaximalProfile& profile, const PiecewiseLinearFn& u,
                           double delta) {
    if (!(delta > profile.err))
        throw std::invalid_argument("detachment_set: delta must exceed the profile error bound");
    const auto& g = profile.grid;
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) s[i] = profile.ustar[i] - u(g[i]);

    IntervalSet out;
    std::size_t i = 0;
    while (i < g.size()) {
        if (!(s[i] > delta)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < g.size() && s[j + 1] > delta) ++j;
        double lo, hi;
        if (i == 0) {
            lo = -kInf;
        } else {
            // crossing of s = delta on [g[i-1], g[i]]
            lo = g[i - 1] + (delta - s[i - 1]) * (g[i] - g[i - 1]) / (s[i] - s[i - 1]);
        }
        if (j + 1 == g.size()) {
            hi = kInf;
        } else {
            hi = g[j] + (delta - s[j]) * (g[j + 1] - g[j]) / (s[j + 1] - s[j]);
        }
        out.intervals.push_back({lo, hi});
        i = j + 1;
    }
    return out;
}

DetachmentDecomposition decompose(const IntervalSet& D, const StepFunction& v) {
    DetachmentDecomposition dec;
    dec.breakpoints = v.points();
    const auto& a = dec.breakpoints;
    for (const Interval& iv : D.intervals) {
        // First breakpoint strictly inside (lo, hi)?
        auto it = std::upper_bound(a.begin(), a.end(), iv.lo);
        if (it != a.end() && *it < iv.hi) {
            dec.d1.intervals.push_back(iv);
            continue;
        }
        // Fully inside one gap: gap index = number of points <= lo.
        int gap = static_cast<int>(it - a.begin());
        dec.d2[gap].intervals.push_back(iv);
    }
    return dec;
}

void to_json(nlohmann::json& j, const IntervalSet& s) {
    j = nlohmann::json::array();
    for (const Interval& iv : s.intervals) j.push_back({iv.lo, iv.hi});
}

void to_json(nlohmann::json& j, const DetachmentDecomposition& d) {
    nlohmann::json d2 = nlohmann::json::object();
    for (const auto& [gap, set] : d.d2) {
        nlohmann::json arr;
        to_json(arr, set);
        d2[std::to_string(gap)] = arr;
    }
    nlohmann::json d1;
    to_json(d1, d.d1);
    j = nlohmann::json{{"d1", d1}, {"d2", d2}, {"breakpoints", d.breakpoints}};
}

}  // namespace maxop
