#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxop/pwl.hpp"
#include "maxop/scalespace.hpp"

namespace maxop {

/// Finite ordered point set a_1 < ... < a_m.
struct Partition {
    std::vector<double> points;

    Partition() = default;
    explicit Partition(std::vector<double> pts);
    std::size_t size() const { return points.size(); }
};

/// Var(w, P) = sum of |w(a_{i+1}) - w(a_i)| given the values of w at the
/// partition points.
double var_over_partition(std::span<const double> values);
double var_over_partition(const std::function<double(double)>& w, const Partition& p);

/// Exact total variation of a piecewise-linear function over [a, b]
/// (clamped to the support): sum of |slope| * overlap length.
double total_variation(const PiecewiseLinearFn& f, double a, double b);
double total_variation(const PiecewiseLinearFn& f);

class partition_error : public std::runtime_error {
public:
    partition_error(const std::string& msg, double achieved)
        : std::runtime_error(msg), achieved_(achieved) {}
    double achieved_variation() const { return achieved_; }

private:
    double achieved_;
};

/// Alternating extremal partition of sampled values on [a, b]: endpoints plus
/// the interior local extrema of the samples, plateaus keeping only their
/// first point so consecutive increments alternate strictly in sign.
/// Guarantees Var(w, P) >= (sampled total variation) - eps; throws
/// partition_error (carrying the achieved variation) if that cannot be met.
Partition extremal_partition(std::span<const double> grid, std::span<const double> values,
                             double a, double b, double eps);

class transfer_error : public std::runtime_error {
public:
    transfer_error(const std::string& msg, int k, double lo, double hi)
        : std::runtime_error(msg + " (k=" + std::to_string(k) + ", bracket [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "])"),
          k_(k) {}
    int k() const { return k_; }

private:
    int k_;
};

/// The inequality margin needed by the transfer construction is smaller than
/// the profile certification error, so pass/fail cannot be decided.
class transfer_inconclusive : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Constructive partition transfer: given alternating interior points Pi of
/// u* inside the detached cell (cell_lo, cell_hi), finds starred points where
/// u attains the corresponding u* levels, so that
///
///   Var(u, P*) - Var(u, {first*, last*}) = Var(u*, Pi) - Var(u*, {first, last})
///
/// holds within 10 * profile.err. Local maxima of u* are matched first inside
/// their wide brackets; local minima are then bracketed against the already
/// starred neighbor, which is what makes the intermediate-value argument go
/// through. Levels are read from the profile; root finding on u is exact on
/// its linear segments. For |Pi| <= 1 the input is returned unchanged.
Partition transfer_partition(const PiecewiseLinearFn& u, const MaximalProfile& profile,
                             const Partition& Pi, double cell_lo, double cell_hi);

}  // namespace maxop
