#pragma once

#include "maxop/kernels.hpp"
#include "maxop/pwl.hpp"
#include "maxop/scalespace.hpp"

namespace maxop::oracle {

/// Brute-force reference implementations used to cross-validate the fast
/// paths. Everything here goes through pointwise kernel evaluation and
/// composite Simpson sums only; none of the antiderivative machinery of the
/// extension evaluator is used.

struct Options {
    double t_lo = 0.0;        // 0 -> min breakpoint gap of |u| divided by 10
    int ladder = 10000;       // log-spaced scales between t_lo and the decay cutoff
    int subintervals = 32;    // composite Simpson subintervals per panel (even)
};

/// Dense quadrature of (|u| * phi_t)(x): the integration variable is
/// substituted to z = (x - y)/t, panels are cut at every breakpoint image and
/// at dyadic |z| levels so the kernel core and tails are resolved at every
/// scale, and each panel is integrated by composite Simpson.
double dense_extension(const PiecewiseLinearFn& u_abs, const KernelSpec& k, double x, double t,
                       int subintervals = 32);

/// Max over the t = 0 endpoint and a dense log-spaced scale ladder, each
/// scale evaluated with dense_extension. The ladder top is found by doubling
/// until phi(0)||u||_1/t drops below the running best.
MaximalResult dense_maximal(const PiecewiseLinearFn& u, const KernelSpec& k, double x,
                            const Options& opts = {});

}  // namespace maxop::oracle
