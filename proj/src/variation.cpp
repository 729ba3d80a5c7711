#include "maxop/variation.hpp"

#include <algorithm>
#include <cmath>

namespace maxop {

Partition::Partition(std::vector<double> pts) : points(std::move(pts)) {
    if (points.empty()) throw std::invalid_argument("Partition: need at least one point");
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (!(points[i] < points[i + 1]))
            throw std::invalid_argument("Partition: points must be strictly increasing");
}

double var_over_partition(std::span<const double> values) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) s += std::abs(values[i + 1] - values[i]);
    return s;
}

double var_over_partition(const std::function<double(double)>& w, const Partition& p) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < p.points.size(); ++i)
        s += std::abs(w(p.points[i + 1]) - w(p.points[i]));
    return s;
}

double total_variation(const PiecewiseLinearFn& f, double a, double b) {
    const auto& bp = f.breakpoints();
    const auto& v = f.values();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        double lo = std::max(bp[i], a);
        double hi = std::min(bp[i + 1], b);
        if (hi <= lo) continue;
        s += std::abs((v[i + 1] - v[i]) / (bp[i + 1] - bp[i])) * (hi - lo);
    }
    return s;
}

double total_variation(const PiecewiseLinearFn& f) {
    return total_variation(f, f.support_left(), f.support_right());
}

Partition extremal_partition(std::span<const double> grid, std::span<const double> values,
                             double a, double b, double eps) {
    if (eps < 0.0) throw std::invalid_argument("extremal_partition: eps must be >= 0");
    if (grid.size() != values.size())
        throw std::invalid_argument("extremal_partition: grid/values size mismatch");

    // Restrict to [a, b] and drop plateau repeats (keep the first point).
    std::vector<double> xs, ws;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < a || grid[i] > b) continue;
        if (!ws.empty() && values[i] == ws.back()) continue;
        xs.push_back(grid[i]);
        ws.push_back(values[i]);
    }
    if (xs.size() < 2) {
        if (xs.size() == 1) return Partition({xs[0]});
        throw partition_error("extremal_partition: fewer than two samples in range", 0.0);
    }

    double sampled_tv = var_over_partition(ws);

    std::vector<double> pts{xs.front()};
    std::vector<double> pvs{ws.front()};
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
        double d1 = ws[i] - ws[i - 1];
        double d2 = ws[i + 1] - ws[i];
        if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) {
            pts.push_back(xs[i]);
            pvs.push_back(ws[i]);
        }
    }
    pts.push_back(xs.back());
    pvs.push_back(ws.back());

    double achieved = var_over_partition(pvs);
    if (achieved < sampled_tv - eps - 1e-12 * (1.0 + sampled_tv))
        throw partition_error("extremal_partition: cannot certify eps", achieved);
    return Partition(std::move(pts));
}

namespace {

// All x in the open interval (lo, hi) with u(x) == level, solved exactly on
// the linear segments. Flat-at-level segments contribute their first covered
// point.
std::vector<double> level_crossings(const PiecewiseLinearFn& u, double level, double lo,
                                    double hi) {
    const auto& b = u.breakpoints();
    const auto& v = u.values();
    std::vector<double> xs;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        double d0 = v[i] - level;
        double d1 = v[i + 1] - level;
        if (d0 * d1 > 0.0) continue;
        double x;
        if (v[i] == v[i + 1]) {
            if (d0 != 0.0) continue;
            x = std::max(b[i], std::nextafter(lo, hi));
        } else {
            x = b[i] + (level - v[i]) * (b[i + 1] - b[i]) / (v[i + 1] - v[i]);
        }
        if (x > lo && x < hi && (xs.empty() || x != xs.back())) xs.push_back(x);
    }
    return xs;
}

double closest_to(const std::vector<double>& xs, double target) {
    double best = xs.front();
    for (double x : xs)
        if (std::abs(x - target) < std::abs(best - target)) best = x;
    return best;
}

}  // namespace

Partition transfer_partition(const PiecewiseLinearFn& u, const MaximalProfile& profile,
                             const Partition& Pi, double cell_lo, double cell_hi) {
    if (!(cell_lo < cell_hi)) throw std::invalid_argument("transfer_partition: bad cell");
    const std::size_t m = Pi.size();  // interior point count, n_i = m + 1
    if (m <= 1) return Pi;            // n_i <= 2: by convention
    for (double p : Pi.points)
        if (!(p > cell_lo && p < cell_hi))
            throw std::invalid_argument("transfer_partition: Pi must lie inside the cell");

    const double err = profile.err;
    // Positions pos[0..m+1] and u* levels L[0..m+1] including cell endpoints.
    std::vector<double> pos{cell_lo};
    pos.insert(pos.end(), Pi.points.begin(), Pi.points.end());
    pos.push_back(cell_hi);
    std::vector<double> L(pos.size());
    for (std::size_t k = 0; k < pos.size(); ++k) L[k] = profile.interpolate(pos[k]);

    double lmax = *std::max_element(L.begin(), L.end());
    double lmin = *std::min_element(L.begin(), L.end());
    if (lmax - lmin <= 2.0 * err) return Pi;  // flat cell: both identity sides are 0

    std::vector<int> kind(pos.size(), 0);  // +1 max, -1 min, interior only
    for (std::size_t k = 1; k <= m; ++k) {
        if (L[k] > L[k - 1] && L[k] > L[k + 1]) kind[k] = 1;
        else if (L[k] < L[k - 1] && L[k] < L[k + 1]) kind[k] = -1;
        else
            throw std::invalid_argument(
                "transfer_partition: Pi values do not alternate strictly");
    }

    std::vector<double> star(pos.size(), 0.0);
    // Maxima first: wide brackets around the extremum.
    for (std::size_t k = 1; k <= m; ++k) {
        if (kind[k] != 1) continue;
        double lo = pos[k - 1], hi = pos[k + 1];
        auto xs = level_crossings(u, L[k], lo, hi);
        if (xs.empty()) {
            double umax = u(lo);
            const auto& bks = u.breakpoints();
            for (double bx : bks)
                if (bx > lo && bx < hi) umax = std::max(umax, u(bx));
            umax = std::max(umax, u(hi));
            if (std::abs(umax - L[k]) <= 2.0 * err)
                throw transfer_inconclusive("transfer_partition: max level within profile error");
            throw transfer_error("transfer_partition: no level touch for local max", (int)k, lo, hi);
        }
        star[k] = closest_to(xs, pos[k]);
    }
    // Minima second, bracketed against the starred neighbor whose exact level
    // supplies the sign change.
    for (std::size_t k = 1; k <= m; ++k) {
        if (kind[k] != -1) continue;
        double lo, hi;
        double neighbor_level;
        if (k < m) {
            lo = pos[k];
            hi = star[k + 1];
            neighbor_level = L[k + 1];
        } else {
            lo = star[k - 1];
            hi = pos[k];
            neighbor_level = L[k - 1];
        }
        if (neighbor_level - L[k] < 2.0 * err)
            throw transfer_inconclusive("transfer_partition: min margin within profile error");
        if (!(lo < hi)) throw transfer_error("transfer_partition: empty bracket", (int)k, lo, hi);
        auto xs = level_crossings(u, L[k], lo, hi);
        if (xs.empty()) {
            // the open bracket may exclude an exact endpoint solution
            if (u(lo) == L[k]) xs.push_back(std::nextafter(lo, hi));
            else if (u(hi) == L[k]) xs.push_back(std::nextafter(hi, lo));
            else
                throw transfer_error("transfer_partition: no crossing for local min", (int)k, lo, hi);
        }
        star[k] = closest_to(xs, pos[k]);
    }

    std::vector<double> out(star.begin() + 1, star.begin() + 1 + m);
    for (std::size_t k = 0; k + 1 < out.size(); ++k)
        if (!(out[k] < out[k + 1]))
            throw transfer_error("transfer_partition: starred points out of order", (int)k + 1,
                                 out[k], out[k + 1]);
    return Partition(std::move(out));
}

}  // namespace maxop
