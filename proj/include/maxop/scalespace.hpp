#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "maxop/kernels.hpp"
#include "maxop/pwl.hpp"

namespace maxop {

/// Raised when the scale search cannot certify the sup within its budget;
/// carries the best value found and the uncertified gap.
class certification_error : public std::runtime_error {
public:
    certification_error(const std::string& msg, double best, double gap)
        : std::runtime_error(msg + " (best=" + std::to_string(best) +
                             ", gap=" + std::to_string(gap) + ")"),
          best_(best),
          gap_(gap) {}
    double best() const { return best_; }
    double gap() const { return gap_; }

private:
    double best_;
    double gap_;
};

/// Evaluates the extension u~(x,t) = (|u| * phi_t)(x) exactly per linear
/// segment of |u| through the kernel's antiderivatives:
///
///   integral over [y0,y1] of (c + m y) phi_t(x - y) dy
///     = (c + m x) * mass_between(z1, z0) - m t * moment_between(z1, z0)
///
/// with z = (x - y)/t. No quadrature is involved, so the result carries only
/// roundoff error; the brute-force oracle keeps an independent dense
/// quadrature route for cross-validation.
class ExtensionEvaluator {
public:
    ExtensionEvaluator(const PiecewiseLinearFn& u, const KernelSpec& k);

    /// u~(x, t) for t > 0.
    double operator()(double x, double t) const;
    /// |u|(x), the t -> 0 endpoint value.
    double boundary_value(double x) const { return absfn_(x); }

    double l1() const { return l1_; }
    const PiecewiseLinearFn& abs_fn() const { return absfn_; }
    const KernelSpec& kernel() const { return kernel_; }

private:
    struct Segment {
        double y0, y1;   // breakpoint span
        double v0;       // |u|(y0)
        double slope;
    };
    PiecewiseLinearFn absfn_;
    KernelSpec kernel_;
    std::vector<Segment> segments_;
    double l1_;
};

struct MaximalResult {
    double value;
    double t_at;  // 0 means the t -> 0 endpoint |u|(x) is the sup
};

struct ScaleSearchOptions {
    double tol = 1e-7;
    double ladder_ratio = 1.1;  // geometric ladder factor, <= 1.25
    double t_min = 0.0;         // 0 -> min breakpoint gap of |u| divided by 10
    int max_ladder = 20000;
    int max_refine_iterations = 400;
};

/// Spec surface: u~(x,t) with absolute error <= tol (the antiderivative route
/// is exact, so tol is trivially met; the signature keeps the contract).
double extension(const PiecewiseLinearFn& u, const KernelSpec& k, double x, double t, double tol);

/// sup over t of u~(x,t), including the exact t = 0 endpoint |u|(x).
///
/// Search: geometric ladder from t_min up to the first scale whose decay
/// bound phi(0)||u||_1/t falls below the best candidate (no larger scale can
/// win beyond that point), then golden-section refinement around every ladder
/// local maximum until the bracket's value spread is <= tol.
MaximalResult maximal_at(const ExtensionEvaluator& ev, double x, const ScaleSearchOptions& opts = {});
MaximalResult maximal_at(const PiecewiseLinearFn& u, const KernelSpec& k, double x, double tol);

/// Sampled maximal function with per-point maximizing scale and a uniform
/// certified error bound.
struct MaximalProfile {
    std::vector<double> grid;
    std::vector<double> ustar;
    std::vector<double> tstar;
    double err = 0.0;
    KernelSpec kernel;

    /// Linear interpolation of the ustar samples (constant extrapolation
    /// outside the grid).
    double interpolate(double x) const;
};

/// Per-point maximal_at over the grid; grid points are evaluated
/// concurrently (results land in disjoint slots, so the profile is
/// deterministic regardless of scheduling). t_min defaults to
/// min(grid resolution, min breakpoint gap)/10.
MaximalProfile maximal_profile(const PiecewiseLinearFn& u, const KernelSpec& k,
                               const std::vector<double>& grid, double tol);

}  // namespace maxop
