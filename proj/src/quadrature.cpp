#include "maxop/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace maxop {

namespace {

struct SimpsonState {
    const std::function<double(double)>& f;
    bool converged = true;
    double worst_residual = 0.0;
};

double simpson_rec(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = st.f(lm);
    double frm = st.f(rm);
    double h = b - a;
    double left = (h / 12.0) * (fa + 4.0 * flm + fm);
    double right = (h / 12.0) * (fm + 4.0 * frm + fb);
    double resid = left + right - whole;
    if (std::abs(resid) <= 15.0 * tol || h < 1e-300) return left + right + resid / 15.0;
    if (depth <= 0) {
        st.converged = false;
        st.worst_residual = std::max(st.worst_residual, std::abs(resid) / 15.0);
        return left + right + resid / 15.0;
    }
    return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double simpson_interval(SimpsonState& st, double a, double b, double tol, int max_depth) {
    double fa = st.f(a);
    double fb = st.f(b);
    double m = 0.5 * (a + b);
    double fm = st.f(m);
    double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    return simpson_rec(st, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    SimpsonState st{f};
    double v = simpson_interval(st, a, b, tol, max_depth);
    if (!st.converged)
        throw quadrature_error("adaptive_simpson: depth limit reached", v, st.worst_residual);
    return v;
}

double adaptive_simpson_panels(const std::function<double(double)>& f,
                               const std::vector<double>& boundaries, double tol, int max_depth) {
    if (boundaries.size() < 2) throw std::invalid_argument("adaptive_simpson_panels: need >= 2 boundaries");
    SimpsonState st{f};
    double v = 0.0;
    double per_panel = tol / static_cast<double>(boundaries.size() - 1);
    for (std::size_t i = 0; i + 1 < boundaries.size(); ++i)
        v += simpson_interval(st, boundaries[i], boundaries[i + 1], per_panel, max_depth);
    if (!st.converged)
        throw quadrature_error("adaptive_simpson_panels: depth limit reached", v, st.worst_residual);
    return v;
}

const GaussLegendreRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    auto [pos, inserted] = cache.emplace(n, std::move(rule));
    return pos->second;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    const GaussLegendreRule& rule) {
    double c = 0.5 * (a + b);
    double h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(c + h * rule.nodes[i]);
    return s * h;
}

}  // namespace maxop
