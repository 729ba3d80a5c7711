#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxop {

/// Raised when a quadrature cannot reach the requested tolerance; carries the
/// best value obtained and the achieved error estimate.
class quadrature_error : public std::runtime_error {
public:
    quadrature_error(const std::string& msg, double value, double achieved)
        : std::runtime_error(msg + " (value=" + std::to_string(value) +
                             ", achieved error=" + std::to_string(achieved) + ")"),
          value_(value),
          achieved_(achieved) {}
    double value() const { return value_; }
    double achieved_error() const { return achieved_; }

private:
    double value_;
    double achieved_;
};

/// Adaptive Simpson with Richardson error control. Absolute tolerance; throws
/// quadrature_error if the recursion depth limit is hit before convergence.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 52);

/// Same, but the integration range is pre-split at the given panel boundaries
/// (useful for wide ranges with localized features). Boundaries must be
/// increasing and bracket [a, b] endpoints are added automatically.
double adaptive_simpson_panels(const std::function<double(double)>& f,
                               const std::vector<double>& boundaries, double tol,
                               int max_depth = 52);

struct GaussLegendreRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

/// Nodes and weights of the n-point Gauss-Legendre rule, by Newton iteration
/// on the Legendre polynomial. Exact for polynomials of degree <= 2n-1.
const GaussLegendreRule& gauss_legendre(int n);

/// Integrate f over [a, b] with the given rule.
double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    const GaussLegendreRule& rule);

}  // namespace maxop
