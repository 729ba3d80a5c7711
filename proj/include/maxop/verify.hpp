#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "maxop/detachment.hpp"
#include "maxop/kernels.hpp"
#include "maxop/pwl.hpp"
#include "maxop/scalespace.hpp"
#include "maxop/variation.hpp"

namespace maxop {

struct Witness {
    double location = 0.0;
    std::string detail;
};

/// One executed inequality check: passed iff lhs <= rhs + slack, with
/// witnesses collected at the violating locations.
struct PropertyReport {
    std::string name;
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    std::vector<Witness> witnesses;
    std::map<std::string, std::string> metadata;
};

void to_json(nlohmann::json& j, const PropertyReport& r);

enum class PerturbationMode { additive, translate, mollify };
std::string mode_name(PerturbationMode m);

/// A sequence u_j -> u in W^{1,1}: additive u + g/j, translate u(. - 1/j), or
/// mollify-like breakpoint jitter of magnitude 1/j. Construction verifies
/// ||u_j - u||_{1,1} is non-increasing along the indices and shrinks.
class ContinuitySequence {
public:
    static ContinuitySequence make(PiecewiseLinearFn base, PiecewiseLinearFn perturbation,
                                   std::vector<int> indices, PerturbationMode mode,
                                   unsigned long long seed = 0);

    const PiecewiseLinearFn& base() const { return base_; }
    const PiecewiseLinearFn& perturbation() const { return pert_; }
    const std::vector<int>& indices() const { return indices_; }
    PerturbationMode mode() const { return mode_; }

    PiecewiseLinearFn term(int j) const;

private:
    ContinuitySequence(PiecewiseLinearFn b, PiecewiseLinearFn g, std::vector<int> idx,
                       PerturbationMode m)
        : base_(std::move(b)), pert_(std::move(g)), indices_(std::move(idx)), mode_(m) {}
    PiecewiseLinearFn base_;
    PiecewiseLinearFn pert_;
    std::vector<int> indices_;
    PerturbationMode mode_;
    std::vector<double> jitter_;  // mollify offsets in [-1,1], one per breakpoint
};

/// Convexity of u* on every delta-detached component: scaled second
/// differences of the ustar samples on three consecutive grid points must be
/// >= -4 * profile.err.
PropertyReport check_subharmonicity(const MaximalProfile& profile, const PiecewiseLinearFn& u,
                                    double delta);

/// max |u_j* - u*| over the shared grid <= ||u_j - u||_{1,1} + 2 * err.
PropertyReport check_uniform_bound(const PiecewiseLinearFn& u, const PiecewiseLinearFn& u_j,
                                   const MaximalProfile& prof_u, const MaximalProfile& prof_j);

using MaximalEvalFn = std::function<double(const PiecewiseLinearFn&, double)>;

/// Smallest doubling radius R (from the support radius) with both tail
/// conditions of the compactness lemma: integral of |w'| outside [-R,R]
/// <= eps/4 and w*(R)-w(R)+w*(-R)-w(-R) < eps/4, for u and optionally u_j.
/// Throws on budget exhaustion (R > 1e6).
double pick_tail_radius(const PiecewiseLinearFn& u, const PiecewiseLinearFn* u_j,
                        const MaximalEvalFn& ustar_of, double eps);

/// Sampled variation of ustar on each tail [R, grid end] (and mirrored) is at
/// most |u*(R)-u(R)| + integral of |u'| over the tail, plus a slack covering
/// the per-sample certification error.
PropertyReport check_tail_bound(const PiecewiseLinearFn& u, const MaximalProfile& profile,
                                double R);

/// The detachment-interior estimate: integral over the d2 parts of
/// |(u_j*)' - u_j'| stays below 4*eps plus an explicit correction term
/// (delta-thresholding and sampling), and the per-component comparison
/// against the slope-alpha_i line holds on every component.
PropertyReport check_lemma6(const PiecewiseLinearFn& u, const PiecewiseLinearFn& u_j,
                            const MaximalProfile& profile_j, const StepFunction& v, double eps,
                            double delta = 0.0);

/// Aligned profile pair for one index j: both functions sampled on the same
/// union grid so derivative integrals need no cross-interpolation.
struct ProfilePair {
    int j = 0;
    MaximalProfile uj;
    MaximalProfile u;
};

/// Per-j profile pairs on grid extended with both functions' breakpoints.
std::vector<ProfilePair> continuity_profiles(const ContinuitySequence& seq, const KernelSpec& k,
                                             const std::vector<double>& grid, double tol);

/// The finitely-many-intervals control: integral over the d1 components of
/// |(u_j*)' - (u*)'| is recorded per j, must be eventually decreasing with
/// final value < 0.05 ||u'||_1, and each detached component satisfies the
/// endpoint-minus-twice-minimum closed form for its variation.
PropertyReport check_finite_intervals(const PiecewiseLinearFn& u, const ContinuitySequence& seq,
                                      const std::vector<ProfilePair>& profiles, double eps_v,
                                      double delta = 0.0);

/// Variation-norm convergence over [a,b] plus the partition bookkeeping
/// bound Var(u_j*, PP) < Var(u*, PP) + 12 K ||u_j - u||_inf on the doubled
/// partition PP with |PP| <= 3K + 1.
PropertyReport check_prop5(const PiecewiseLinearFn& u, const ContinuitySequence& seq,
                           const std::vector<ProfilePair>& profiles, double a, double b);

struct SampledOnInterval {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> grid;
    std::vector<double> values;
};

/// Convex-convergence lemma: each term convex on its interval (validated by
/// second differences; violations are reported, not thrown), the uniform
/// limit is midpoint-convex on (l, r), and finite-difference slopes converge
/// on a fixed interior grid with final deviation < 1% of the limit's slope
/// range.
PropertyReport check_convex_limit(const std::vector<SampledOnInterval>& terms,
                                  const SampledOnInterval& limit, double slack);

struct ContinuityRow {
    int j = 0;
    double w11_diff = 0.0;
    double sup_diff = 0.0;
    double e_total = 0.0;
    double e_contact = 0.0;
    double e_detach = 0.0;
    double identity_residual = 0.0;
};

struct ContinuityTable {
    std::vector<ContinuityRow> rows;
    PropertyReport verdict;
};

/// Desk-scale reproduction of the main continuity theorem: per index j the
/// table records ||u_j - u||_{1,1}, sup |u_j* - u*| and
/// E_j = integral of |(u_j*)' - (u*)'| split over the contact and detachment
/// sets of u; the verdict requires a decreasing E tail and
/// E_final < 0.05 ||u'||_1. Profiles are computed on the nonnegative
/// representatives |u_j|, matching the reduction the theory starts from.
ContinuityTable continuity_experiment(const ContinuitySequence& seq, const KernelSpec& kernel,
                                      const std::vector<double>& grid, double tol);

/// Ratio of the sampled variation of u* to ||u'||_1; pass/fail at 1.02 for
/// poisson and heat, measurement-only for the fractional family.
PropertyReport check_variation_diminishing(const PiecewiseLinearFn& u,
                                           const MaximalProfile& profile);

std::vector<double> uniform_grid(double lo, double hi, int n);
std::vector<double> union_grid(const std::vector<double>& base, const std::vector<double>& extra);

}  // namespace maxop
