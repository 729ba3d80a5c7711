#include "maxop/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace maxop {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_strictly_increasing(const std::vector<double>& v, const char* what) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (!(v[i] < v[i + 1]))
            throw std::invalid_argument(std::string(what) + ": not strictly increasing");
    }
}

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
}

// Merge of the two breakpoint sets, exact-equality dedup.
std::vector<double> merged_breakpoints(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g) {
    std::vector<double> m;
    m.reserve(f.size() + g.size());
    std::merge(f.breakpoints().begin(), f.breakpoints().end(),
               g.breakpoints().begin(), g.breakpoints().end(), std::back_inserter(m));
    m.erase(std::unique(m.begin(), m.end()), m.end());
    return m;
}

}  // namespace

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<double> breakpoints, std::vector<double> values)
    : bp_(std::move(breakpoints)), val_(std::move(values)) {
    require(bp_.size() >= 2, "PiecewiseLinearFn: need at least two breakpoints");
    require(bp_.size() == val_.size(), "PiecewiseLinearFn: breakpoints/values size mismatch");
    check_finite(bp_, "breakpoints");
    check_finite(val_, "values");
    check_strictly_increasing(bp_, "breakpoints");
    require(val_.front() == 0.0 && val_.back() == 0.0,
            "PiecewiseLinearFn: first and last values must be exactly 0 (compact support)");
}

double PiecewiseLinearFn::min_gap() const {
    double g = bp_[1] - bp_[0];
    for (std::size_t i = 1; i + 1 < bp_.size(); ++i) g = std::min(g, bp_[i + 1] - bp_[i]);
    return g;
}

double PiecewiseLinearFn::operator()(double x) const {
    if (x <= bp_.front() || x >= bp_.back()) return 0.0;
    // First breakpoint strictly greater than x.
    auto it = std::upper_bound(bp_.begin(), bp_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - bp_.begin()) - 1;
    if (bp_[i] == x) return val_[i];
    double t = (x - bp_[i]) / (bp_[i + 1] - bp_[i]);
    return val_[i] + t * (val_[i + 1] - val_[i]);
}

StepFunction::StepFunction(std::vector<double> points, std::vector<double> levels)
    : pts_(std::move(points)), lev_(std::move(levels)) {
    require(!pts_.empty(), "StepFunction: need at least one point");
    require(lev_.size() == pts_.size() + 1, "StepFunction: levels must have points+1 entries");
    check_finite(pts_, "points");
    check_finite(lev_, "levels");
    check_strictly_increasing(pts_, "points");
    require(lev_.front() == 0.0 && lev_.back() == 0.0,
            "StepFunction: exterior levels must be exactly 0 (integrability)");
}

double StepFunction::operator()(double x) const {
    auto it = std::upper_bound(pts_.begin(), pts_.end(), x);
    return lev_[static_cast<std::size_t>(it - pts_.begin())];
}

double eval(const PiecewiseLinearFn& f, double x) { return f(x); }

StepFunction derivative(const PiecewiseLinearFn& f) {
    const auto& b = f.breakpoints();
    const auto& v = f.values();
    std::vector<double> levels(b.size() + 1, 0.0);
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
        levels[i + 1] = (v[i + 1] - v[i]) / (b[i + 1] - b[i]);
    return StepFunction(b, std::move(levels));
}

double norm_l1(const PiecewiseLinearFn& f) {
    PiecewiseLinearFn a = abs_part(f);
    const auto& b = a.breakpoints();
    const auto& v = a.values();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
        s += 0.5 * (v[i] + v[i + 1]) * (b[i + 1] - b[i]);
    return s;
}

double norm_l1(const StepFunction& s) {
    const auto& p = s.points();
    const auto& l = s.levels();
    double acc = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) acc += std::abs(l[i]) * (p[i] - p[i - 1]);
    return acc;
}

double norm_w11(const PiecewiseLinearFn& f) { return norm_l1(f) + norm_l1(derivative(f)); }

PiecewiseLinearFn abs_part(const PiecewiseLinearFn& f) {
    const auto& b = f.breakpoints();
    const auto& v = f.values();
    std::vector<double> nb, nv;
    nb.reserve(b.size());
    nv.reserve(v.size());
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        nb.push_back(b[i]);
        nv.push_back(std::abs(v[i]));
        if (v[i] * v[i + 1] < 0.0) {
            // Exact linear-segment root; sign change implies v[i] != v[i+1].
            double x = b[i] - v[i] * (b[i + 1] - b[i]) / (v[i + 1] - v[i]);
            if (x > b[i] && x < b[i + 1]) {
                nb.push_back(x);
                nv.push_back(0.0);
            }
        }
    }
    nb.push_back(b.back());
    nv.push_back(std::abs(v.back()));
    return PiecewiseLinearFn(std::move(nb), std::move(nv));
}

PiecewiseLinearFn add(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g) {
    std::vector<double> m = merged_breakpoints(f, g);
    std::vector<double> v(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) v[i] = f(m[i]) + g(m[i]);
    return PiecewiseLinearFn(std::move(m), std::move(v));
}

PiecewiseLinearFn scale(const PiecewiseLinearFn& f, double lambda) {
    require(std::isfinite(lambda), "scale: non-finite factor");
    std::vector<double> v(f.values());
    for (double& x : v) x = lambda * x + 0.0;  // +0.0 normalizes -0
    return PiecewiseLinearFn(f.breakpoints(), std::move(v));
}

PiecewiseLinearFn translate(const PiecewiseLinearFn& f, double a) {
    require(std::isfinite(a), "translate: non-finite shift");
    std::vector<double> b(f.breakpoints());
    for (double& x : b) x += a;
    return PiecewiseLinearFn(std::move(b), f.values());
}

double l1_diff(const StepFunction& a, const StepFunction& b) {
    std::vector<double> m;
    m.reserve(a.points().size() + b.points().size());
    std::merge(a.points().begin(), a.points().end(), b.points().begin(), b.points().end(),
               std::back_inserter(m));
    m.erase(std::unique(m.begin(), m.end()), m.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        double mid = 0.5 * (m[i] + m[i + 1]);
        s += std::abs(a(mid) - b(mid)) * (m[i + 1] - m[i]);
    }
    return s;
}

double sup_diff(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g) {
    std::vector<double> m = merged_breakpoints(f, g);
    double s = 0.0;
    for (double x : m) s = std::max(s, std::abs(f(x) - g(x)));
    return s;
}

double tail_variation_right(const PiecewiseLinearFn& f, double x0) {
    const auto& b = f.breakpoints();
    const auto& v = f.values();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        double lo = std::max(b[i], x0);
        double hi = b[i + 1];
        if (hi <= lo) continue;
        double slope = (v[i + 1] - v[i]) / (b[i + 1] - b[i]);
        s += std::abs(slope) * (hi - lo);
    }
    return s;
}

double tail_variation_left(const PiecewiseLinearFn& f, double x0) {
    const auto& b = f.breakpoints();
    const auto& v = f.values();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        double lo = b[i];
        double hi = std::min(b[i + 1], x0);
        if (hi <= lo) continue;
        double slope = (v[i + 1] - v[i]) / (b[i + 1] - b[i]);
        s += std::abs(slope) * (hi - lo);
    }
    return s;
}

StepFunction simple_approx(const StepFunction& df, double eps) {
    require(eps >= 0.0, "simple_approx: eps must be >= 0");
    const auto& p = df.points();
    const auto& l = df.levels();
    if (eps == 0.0 || p.size() <= 2) return df;

    double total_len = p.back() - p.front();
    double tau = eps / total_len;

    // Greedy run merging over interior pieces with an exact error budget.
    std::vector<double> np{p.front()};
    std::vector<double> nl{0.0};
    double budget = eps;
    std::size_t i = 1;  // interior level index: l[i] lives on (p[i-1], p[i])
    while (i < p.size()) {
        double run_first = l[i];
        double wsum = l[i] * (p[i] - p[i - 1]);
        double len = p[i] - p[i - 1];
        std::vector<std::pair<double, double>> run{{l[i], p[i] - p[i - 1]}};  // (level, len)
        std::size_t j = i + 1;
        while (j < p.size() && std::abs(l[j] - run_first) <= tau) {
            // Exact projected error with the candidate piece merged in.
            double nw = wsum + l[j] * (p[j] - p[j - 1]);
            double nlen = len + (p[j] - p[j - 1]);
            double avg = nw / nlen;
            double err = std::abs(l[j] - avg) * (p[j] - p[j - 1]);
            for (auto& [lev, ln] : run) err += std::abs(lev - avg) * ln;
            // Error already spent on previous runs plus this run's projection.
            if (err > budget) break;
            run.push_back({l[j], p[j] - p[j - 1]});
            wsum = nw;
            len = nlen;
            ++j;
        }
        double merged = wsum / len;
        double spent = 0.0;
        for (auto& [lev, ln] : run) spent += std::abs(lev - merged) * ln;
        budget -= spent;
        np.push_back(p[j - 1]);
        nl.push_back(merged);
        i = j;
    }
    nl.push_back(0.0);
    return StepFunction(std::move(np), std::move(nl));
}

void to_json(nlohmann::json& j, const PiecewiseLinearFn& f) {
    j = nlohmann::json{{"breakpoints", f.breakpoints()}, {"values", f.values()}};
}

PiecewiseLinearFn pwl_from_json(const nlohmann::json& j) {
    return PiecewiseLinearFn(j.at("breakpoints").get<std::vector<double>>(),
                             j.at("values").get<std::vector<double>>());
}

}  // namespace maxop
