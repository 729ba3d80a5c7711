#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace maxop {

/// Compactly supported continuous piecewise-linear function.
///
/// The discrete model of a W^{1,1}(R) function used throughout: between
/// breakpoints the value is linearly interpolated, outside the support
/// [breakpoints.front(), breakpoints.back()] it is identically zero. The
/// first and last values are required to be exactly 0 so that the function
/// is continuous on all of R and every norm below is a finite exact sum.
class PiecewiseLinearFn {
public:
    PiecewiseLinearFn(std::vector<double> breakpoints, std::vector<double> values);

    const std::vector<double>& breakpoints() const { return bp_; }
    const std::vector<double>& values() const { return val_; }
    std::size_t size() const { return bp_.size(); }

    double support_left() const { return bp_.front(); }
    double support_right() const { return bp_.back(); }
    /// Smallest gap between consecutive breakpoints.
    double min_gap() const;

    /// Linear interpolation inside the support, 0 outside.
    double operator()(double x) const;

    bool operator==(const PiecewiseLinearFn& other) const = default;

private:
    std::vector<double> bp_;
    std::vector<double> val_;
};

/// Integrable step function with zero exterior levels.
///
/// levels()[i] is the value on (points()[i-1], points()[i]); levels().front()
/// applies on (-inf, points().front()) and levels().back() on
/// (points().back(), inf), and both are required to be exactly 0. A function
/// with N interior pieces therefore has N+1 points and N+2 levels, matching
/// the a_1 < ... < a_{N+1} / alpha_0 = alpha_{N+1} = 0 convention.
class StepFunction {
public:
    StepFunction(std::vector<double> points, std::vector<double> levels);

    const std::vector<double>& points() const { return pts_; }
    const std::vector<double>& levels() const { return lev_; }

    /// Level on the i-th gap: gap 0 is (-inf, a_1), gap i is (a_i, a_{i+1}),
    /// gap N+1 is (a_{N+1}, inf).
    double level_on_gap(std::size_t i) const { return lev_.at(i); }
    std::size_t gap_count() const { return lev_.size(); }

    /// Value at x (level of the gap containing x; right-continuous at points).
    double operator()(double x) const;

    bool operator==(const StepFunction& other) const = default;

private:
    std::vector<double> pts_;
    std::vector<double> lev_;
};

double eval(const PiecewiseLinearFn& f, double x);

/// Weak derivative: the step function of segment slopes.
StepFunction derivative(const PiecewiseLinearFn& f);

/// Exact integral of |f| (zero crossings inserted before the trapezoid sum).
double norm_l1(const PiecewiseLinearFn& f);
double norm_l1(const StepFunction& s);

/// W^{1,1} norm: norm_l1(f) + norm_l1(derivative(f)).
double norm_w11(const PiecewiseLinearFn& f);

/// |f|, exactly, with zero crossings inserted as new breakpoints.
PiecewiseLinearFn abs_part(const PiecewiseLinearFn& f);

PiecewiseLinearFn add(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g);
PiecewiseLinearFn scale(const PiecewiseLinearFn& f, double lambda);
PiecewiseLinearFn translate(const PiecewiseLinearFn& f, double a);

/// Exact L1 distance between two step functions.
double l1_diff(const StepFunction& a, const StepFunction& b);

/// Exact sup-norm distance max_x |f(x) - g(x)| (attained at a merged breakpoint).
double sup_diff(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g);

/// Exact integral of |f'| over (r, inf) plus (-inf, -r) ... split helpers for
/// the tail estimates: variation of f strictly right of x0 / left of x0.
double tail_variation_right(const PiecewiseLinearFn& f, double x0);
double tail_variation_left(const PiecewiseLinearFn& f, double x0);

/// Step-function approximation of df with L1 error at most eps and no more
/// pieces. eps = 0 returns df unchanged; for eps > 0 adjacent levels within
/// eps/(support length) may be merged, with the exact accumulated L1 error
/// kept at or below eps.
StepFunction simple_approx(const StepFunction& df, double eps);

void to_json(nlohmann::json& j, const PiecewiseLinearFn& f);
PiecewiseLinearFn pwl_from_json(const nlohmann::json& j);

}  // namespace maxop
