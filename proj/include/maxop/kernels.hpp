#pragma once

#include <stdexcept>
#include <string>

namespace maxop {

enum class KernelFamily { poisson, heat, fractional_poisson };

std::string family_name(KernelFamily f);

class kernel_error : public std::runtime_error {
public:
    explicit kernel_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// One admissible kernel in dimension 1: even, nonnegative, nonincreasing on
/// [0, inf), unit mass. Construction computes the normalization constant and
/// verifies the unit-mass / symmetry / monotonicity hypotheses numerically
/// (mass within 1e-10 by quadrature with analytic tail handling, shape on a
/// 10^3-point ladder); a violation throws kernel_error.
///
/// Families:
///   poisson             phi(x) = (1/pi) (1+x^2)^{-1}
///   heat                phi(x) = c e^{-x^2},  c = (integral of e^{-x^2})^{-1}
///   fractional_poisson  phi(x) = C_alpha (1+x^2)^{-(2-alpha)/2}, 0 < alpha < 1
///
/// The heat constant is recomputed so the mass is exactly 1 rather than using
/// the d-dimensional semigroup constant, which does not normalize in d = 1.
class KernelSpec {
public:
    static KernelSpec make(KernelFamily family, double alpha = 0.0);

    KernelFamily family() const { return family_; }
    double alpha() const { return alpha_; }
    double norm_const() const { return norm_const_; }
    static constexpr int dimension = 1;

    /// phi(x).
    double operator()(double x) const;
    /// phi(0), the sup norm of phi.
    double phi0() const { return norm_const_; }

    /// Exact integral of phi over [z1, z0], cancellation-safe for far or
    /// nearly equal endpoints.
    double mass_between(double z1, double z0) const;

    /// Exact integral of z*phi(z) over [z1, z0].
    double moment_between(double z1, double z0) const;

    /// Integral of phi over [z, inf) for z >= 0.
    double tail_mass(double z) const;

    bool same_kernel(const KernelSpec& other) const {
        return family_ == other.family_ && alpha_ == other.alpha_;
    }

private:
    KernelSpec(KernelFamily family, double alpha);
    void validate_shape() const;

    double frac_tail_series(double z) const;             // z >= 2, unnormalized
    double frac_between_core(double za, double zb) const;  // 0 <= za <= zb <= 2, unnormalized
    double frac_mass_positive(double z1, double z0) const;  // 0 <= z1 <= z0, unnormalized

    KernelFamily family_;
    double alpha_ = 0.0;
    double norm_const_ = 0.0;
    // fractional precomputations
    double s_ = 0.0;      // (2 - alpha)/2
    double core2_ = 0.0;  // unnormalized integral over [0, 2]
    double tail2_ = 0.0;  // unnormalized integral over [2, inf)
};

/// Spec surface: construct a kernel (alpha required for fractional_poisson).
KernelSpec make_kernel(KernelFamily family, double alpha = 0.0);

/// C_1^alpha = (integral of (1+x^2)^{-(2-alpha)/2} over R)^{-1}, by adaptive
/// quadrature on [0, 1e4] plus an analytic power-tail series whose remainder
/// is bounded by its first omitted term; absolute error <= 1e-10.
double normalize_fractional(double alpha);

/// phi_t(x) = phi(x/t)/t. Rejects t <= 0.
double scaled_value(const KernelSpec& k, double t, double x);

/// phi(0) * l1 / t, an upper bound for |u|*phi_t uniform in x.
double sup_decay_bound(const KernelSpec& k, double t, double l1);

}  // namespace maxop
