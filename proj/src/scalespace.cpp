#include "maxop/scalespace.hpp"

#include <algorithm>
#include <cmath>

#include "maxop/parallel.hpp"

namespace maxop {

ExtensionEvaluator::ExtensionEvaluator(const PiecewiseLinearFn& u, const KernelSpec& k)
    : absfn_(abs_part(u)), kernel_(k) {
    const auto& b = absfn_.breakpoints();
    const auto& v = absfn_.values();
    segments_.reserve(b.size() - 1);
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        double len = b[i + 1] - b[i];
        Segment s{b[i], b[i + 1], v[i], (v[i + 1] - v[i]) / len};
        l1 += 0.5 * (v[i] + v[i + 1]) * len;
        if (v[i] != 0.0 || v[i + 1] != 0.0) segments_.push_back(s);
    }
    l1_ = l1;
}

double ExtensionEvaluator::operator()(double x, double t) const {
    if (!(t > 0.0)) throw std::domain_error("ExtensionEvaluator: t must be > 0");
    double acc = 0.0;
    double inv_t = 1.0 / t;
    for (const Segment& s : segments_) {
        double z0 = (x - s.y0) * inv_t;  // upper z limit
        double z1 = (x - s.y1) * inv_t;  // lower z limit, z1 < z0
        double zmax = std::max(std::abs(z0), std::abs(z1));
        if (z0 - z1 < 1e-9 * zmax) {
            // Far micro-segment: midpoint value suffices at full precision.
            double ymid = 0.5 * (s.y0 + s.y1);
            double wmid = s.v0 + s.slope * (ymid - s.y0);
            acc += wmid * kernel_((x - ymid) * inv_t) * inv_t * (s.y1 - s.y0);
            continue;
        }
        double mass = kernel_.mass_between(z1, z0);
        double mom = kernel_.moment_between(z1, z0);
        acc += (s.v0 + s.slope * (x - s.y0)) * mass - s.slope * t * mom;
    }
    return acc;
}

double extension(const PiecewiseLinearFn& u, const KernelSpec& k, double x, double t, double tol) {
    if (!(t > 0.0)) throw std::domain_error("extension: t must be > 0");
    if (!(tol > 0.0)) throw std::domain_error("extension: tol must be > 0");
    return ExtensionEvaluator(u, k)(x, t);
}

namespace {

struct Candidate {
    double value;
    double t;
};

// Golden-section maximization of ev(x, e^lt) over [la, lb] until the value
// spread over the four probe points is <= tol.
Candidate refine_bracket(const ExtensionEvaluator& ev, double x, double la, double lb, double tol,
                         int max_iter) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto g = [&](double lt) { return ev(x, std::exp(lt)); };
    double lc = lb - gr * (lb - la);
    double ld = la + gr * (lb - la);
    double fa = g(la), fb = g(lb), fc = g(lc), fd = g(ld);
    for (int it = 0; it < max_iter; ++it) {
        double hi = std::max(std::max(fa, fb), std::max(fc, fd));
        double lo = std::min(std::min(fa, fb), std::min(fc, fd));
        if (hi - lo <= tol || lb - la < 1e-12 * std::max(1.0, std::abs(la))) {
            double lt = fc >= fd ? lc : ld;
            double v = std::max(fc, fd);
            if (fa > v) { v = fa; lt = la; }
            if (fb > v) { v = fb; lt = lb; }
            return {v, std::exp(lt)};
        }
        if (fc >= fd) {
            lb = ld; fb = fd;
            ld = lc; fd = fc;
            lc = lb - gr * (lb - la);
            fc = g(lc);
        } else {
            la = lc; fa = fc;
            lc = ld; fc = fd;
            ld = la + gr * (lb - la);
            fd = g(ld);
        }
    }
    double hi = std::max(std::max(fa, fb), std::max(fc, fd));
    double lo = std::min(std::min(fa, fb), std::min(fc, fd));
    throw certification_error("maximal_at: refinement budget exhausted", hi, hi - lo);
}

}  // namespace

MaximalResult maximal_at(const ExtensionEvaluator& ev, double x, const ScaleSearchOptions& opts) {
    if (!(opts.tol > 0.0)) throw std::domain_error("maximal_at: tol must be > 0");
    if (!(opts.ladder_ratio > 1.0 && opts.ladder_ratio <= 1.25))
        throw std::domain_error("maximal_at: ladder_ratio must be in (1, 1.25]");

    double endpoint = ev.boundary_value(x);
    if (ev.l1() == 0.0) return {endpoint, 0.0};

    double t_lo = opts.t_min > 0.0 ? opts.t_min : ev.abs_fn().min_gap() / 10.0;

    // Geometric ladder up to the decay cutoff: beyond the first t with
    // phi(0)||u||_1/t below the running best no scale can improve the sup.
    std::vector<double> ts, vs;
    ts.reserve(256);
    vs.reserve(256);
    double best = endpoint;
    double t = t_lo;
    bool cut = false;
    for (int i = 0; i < opts.max_ladder; ++i) {
        double v = ev(x, t);
        ts.push_back(t);
        vs.push_back(v);
        best = std::max(best, v);
        if (sup_decay_bound(ev.kernel(), t, ev.l1()) < best) {
            cut = true;
            break;
        }
        t *= opts.ladder_ratio;
    }
    if (!cut)
        throw certification_error("maximal_at: ladder budget exhausted before decay cutoff", best,
                                  sup_decay_bound(ev.kernel(), ts.back(), ev.l1()));

    // Refine around every ladder local maximum; a single refinement around
    // the best rung could miss the global sup when u~(x, .) is multi-modal.
    std::size_t n = ts.size();
    MaximalResult result{endpoint, 0.0};
    auto consider = [&result](const Candidate& c) {
        if (c.value > result.value) result = {c.value, c.t};
    };
    for (std::size_t i = 0; i < n; ++i) {
        bool left_ok = (i == 0) || vs[i] >= vs[i - 1];
        bool right_ok = (i + 1 == n) || vs[i] >= vs[i + 1];
        if (!(left_ok && right_ok)) continue;
        if (i > 0 && vs[i] == vs[i - 1]) continue;  // one refinement per plateau
        double lo = (i == 0) ? ts[0] / opts.ladder_ratio : ts[i - 1];
        double hi = (i + 1 == n) ? ts[n - 1] * opts.ladder_ratio : ts[i + 1];
        consider(refine_bracket(ev, x, std::log(lo), std::log(hi), opts.tol,
                                opts.max_refine_iterations));
    }
    return result;
}

MaximalResult maximal_at(const PiecewiseLinearFn& u, const KernelSpec& k, double x, double tol) {
    ScaleSearchOptions opts;
    opts.tol = tol;
    return maximal_at(ExtensionEvaluator(u, k), x, opts);
}

double MaximalProfile::interpolate(double x) const {
    if (x <= grid.front()) return ustar.front();
    if (x >= grid.back()) return ustar.back();
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    if (grid[i] == x) return ustar[i];
    double w = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return ustar[i] + w * (ustar[i + 1] - ustar[i]);
}

MaximalProfile maximal_profile(const PiecewiseLinearFn& u, const KernelSpec& k,
                               const std::vector<double>& grid, double tol) {
    if (grid.size() < 2) throw std::invalid_argument("maximal_profile: need >= 2 grid points");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("maximal_profile: grid must be strictly increasing");
    if (!(tol > 0.0)) throw std::domain_error("maximal_profile: tol must be > 0");

    ExtensionEvaluator ev(u, k);
    double grid_res = grid[1] - grid[0];
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) grid_res = std::min(grid_res, grid[i + 1] - grid[i]);

    ScaleSearchOptions opts;
    opts.tol = tol;
    opts.t_min = std::min(grid_res, ev.abs_fn().min_gap()) / 10.0;

    MaximalProfile p{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size()), tol, k};
    parallel_for(grid.size(), [&](std::size_t i) {
        try {
            MaximalResult r = maximal_at(ev, grid[i], opts);
            p.ustar[i] = r.value;
            p.tstar[i] = r.t_at;
        } catch (const certification_error& e) {
            throw certification_error(
                "maximal_profile: certification failed at x=" + std::to_string(grid[i]), e.best(),
                e.gap());
        }
    });
    return p;
}

}  // namespace maxop
