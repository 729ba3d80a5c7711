#include "maxop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace maxop::oracle {

namespace {

double simpson_panel(const PiecewiseLinearFn& u_abs, const KernelSpec& k, double x, double t,
                     double zlo, double zhi, int m) {
    // Composite Simpson of g(z) = |u|(x - t z) phi(z) over [zlo, zhi].
    double h = (zhi - zlo) / m;
    auto g = [&](double z) { return u_abs(x - t * z) * k(z); };
    double s = g(zlo) + g(zhi);
    for (int i = 1; i < m; ++i) s += g(zlo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

double dense_extension(const PiecewiseLinearFn& u_abs, const KernelSpec& k, double x, double t,
                       int subintervals) {
    if (!(t > 0.0)) throw std::domain_error("dense_extension: t must be > 0");
    if (subintervals < 2 || subintervals % 2) throw std::invalid_argument("dense_extension: subintervals must be even and >= 2");

    double zlo = (x - u_abs.support_right()) / t;
    double zhi = (x - u_abs.support_left()) / t;
    if (!(zlo < zhi)) return 0.0;

    // Panel boundaries: breakpoint images plus dyadic |z| levels plus 0.
    std::vector<double> cuts{zlo, zhi};
    for (double b : u_abs.breakpoints()) {
        double z = (x - b) / t;
        if (z > zlo && z < zhi) cuts.push_back(z);
    }
    if (zlo < 0.0 && zhi > 0.0) cuts.push_back(0.0);
    double zmax = std::max(std::abs(zlo), std::abs(zhi));
    for (double d = 0.125; d < zmax; d *= 2.0) {
        if (d > zlo && d < zhi) cuts.push_back(d);
        if (-d > zlo && -d < zhi) cuts.push_back(-d);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return b - a < 1e-13 * (1.0 + std::abs(a)); }),
               cuts.end());

    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += simpson_panel(u_abs, k, x, t, cuts[i], cuts[i + 1], subintervals);
    return acc;
}

MaximalResult dense_maximal(const PiecewiseLinearFn& u, const KernelSpec& k, double x,
                            const Options& opts) {
    PiecewiseLinearFn a = abs_part(u);
    double l1 = norm_l1(u);
    double best = a(x);
    double t_best = 0.0;
    if (l1 == 0.0) return {best, t_best};

    double t_lo = opts.t_lo > 0.0 ? opts.t_lo : a.min_gap() / 10.0;

    // Coarse doubling to locate the decay cutoff.
    double t_hi = t_lo;
    double coarse_best = best;
    for (int i = 0; i < 200; ++i) {
        coarse_best = std::max(coarse_best, dense_extension(a, k, x, t_hi, 8));
        if (k.phi0() * l1 / t_hi < coarse_best) break;
        t_hi *= 2.0;
    }

    // Dense log-spaced ladder over [t_lo, t_hi].
    double llo = std::log(t_lo);
    double lhi = std::log(t_hi);
    for (int i = 0; i <= opts.ladder; ++i) {
        double t = std::exp(llo + (lhi - llo) * i / opts.ladder);
        double v = dense_extension(a, k, x, t, opts.subintervals);
        if (v > best) {
            best = v;
            t_best = t;
        }
    }
    return {best, t_best};
}

}  // namespace maxop::oracle
