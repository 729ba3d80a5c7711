#include "maxop/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <nlohmann/json.hpp>

namespace maxop {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double sampled_tv(std::span<const double> w) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) s += std::abs(w[i + 1] - w[i]);
    return s;
}

int monotone_runs(std::span<const double> w) {
    if (w.size() < 2) return 0;
    int runs = 1;
    int dir = 0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        double d = w[i + 1] - w[i];
        int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s == 0) continue;
        if (dir != 0 && s != dir) ++runs;
        dir = s;
    }
    return runs;
}

bool eventually_decreasing(const std::vector<double>& v) {
    std::size_t n = v.size();
    if (n < 3) return true;
    auto le = [](double a, double b) { return a <= b * (1.0 + 1e-9) + 1e-15; };
    return le(v[n - 2], v[n - 3]) && le(v[n - 1], v[n - 2]);
}

// Profile samples restricted to [lo, hi] plus interpolated endpoints and
// extra points; interp counts how many values did not land on grid samples.
struct SampleSet {
    std::vector<double> x;
    std::vector<double> w;
    int interp = 0;
};

SampleSet gather(const MaximalProfile& p, double lo, double hi,
                 const std::vector<double>& extra = {}) {
    lo = std::max(lo, p.grid.front());
    hi = std::min(hi, p.grid.back());
    SampleSet s;
    if (!(lo < hi)) return s;
    std::vector<double> xs{lo, hi};
    for (double g : p.grid)
        if (g > lo && g < hi) xs.push_back(g);
    for (double e : extra)
        if (e > lo && e < hi) xs.push_back(e);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    s.x = std::move(xs);
    s.w.resize(s.x.size());
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        auto it = std::lower_bound(p.grid.begin(), p.grid.end(), s.x[i]);
        if (it != p.grid.end() && *it == s.x[i]) {
            s.w[i] = p.ustar[static_cast<std::size_t>(it - p.grid.begin())];
        } else {
            s.w[i] = p.interpolate(s.x[i]);
            ++s.interp;
        }
    }
    return s;
}

// Finite-difference integral of |w' - g'| over the sample set, where g is
// evaluated exactly: sum over cells of |dw - dg|. Also the coarsened
// (every-second-point) value for the refinement residual.
struct FdSum {
    double fine = 0.0;
    double coarse = 0.0;
};

FdSum fd_abs_deriv_diff(const SampleSet& s, const std::function<double(double)>& g) {
    FdSum r;
    std::vector<double> gv(s.x.size());
    for (std::size_t i = 0; i < s.x.size(); ++i) gv[i] = g(s.x[i]);
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
        r.fine += std::abs((s.w[i + 1] - s.w[i]) - (gv[i + 1] - gv[i]));
    for (std::size_t i = 0; i + 2 < s.x.size(); i += 2)
        r.coarse += std::abs((s.w[i + 2] - s.w[i]) - (gv[i + 2] - gv[i]));
    if (s.x.size() >= 2 && (s.x.size() - 1) % 2)
        r.coarse += std::abs((s.w[s.x.size() - 1] - s.w[s.x.size() - 2]) -
                             (gv[s.x.size() - 1] - gv[s.x.size() - 2]));
    return r;
}

// Exact integral over (lo, hi) of |u'(x) - c| for piecewise-linear u.
double l1_dist_to_const(const PiecewiseLinearFn& u, double c, double lo, double hi) {
    const auto& b = u.breakpoints();
    const auto& v = u.values();
    double s = 0.0;
    // exterior pieces where u' = 0
    if (lo < b.front()) s += std::abs(c) * (std::min(hi, b.front()) - lo);
    if (hi > b.back()) s += std::abs(c) * (hi - std::max(lo, b.back()));
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        double l = std::max(b[i], lo);
        double h = std::min(b[i + 1], hi);
        if (h <= l) continue;
        double slope = (v[i + 1] - v[i]) / (b[i + 1] - b[i]);
        s += std::abs(slope - c) * (h - l);
    }
    return s;
}

}  // namespace

void to_json(nlohmann::json& j, const PropertyReport& r) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& wi : r.witnesses) w.push_back({{"location", wi.location}, {"detail", wi.detail}});
    j = nlohmann::json{{"name", r.name},   {"passed", r.passed}, {"lhs", r.lhs},
                       {"rhs", r.rhs},     {"slack", r.slack},   {"witnesses", w},
                       {"metadata", r.metadata}};
}

std::string mode_name(PerturbationMode m) {
    switch (m) {
        case PerturbationMode::additive: return "additive";
        case PerturbationMode::translate: return "translate";
        case PerturbationMode::mollify: return "mollify";
    }
    return "unknown";
}

ContinuitySequence ContinuitySequence::make(PiecewiseLinearFn base, PiecewiseLinearFn perturbation,
                                            std::vector<int> indices, PerturbationMode mode,
                                            unsigned long long seed) {
    if (indices.empty()) throw std::invalid_argument("ContinuitySequence: empty index list");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 1) throw std::invalid_argument("ContinuitySequence: indices must be >= 1");
        if (i > 0 && indices[i] <= indices[i - 1])
            throw std::invalid_argument("ContinuitySequence: indices must increase");
    }
    ContinuitySequence s(std::move(base), std::move(perturbation), std::move(indices), mode);
    if (mode == PerturbationMode::mollify) {
        std::mt19937_64 rng(seed);
        s.jitter_.resize(s.base_.size());
        for (double& r : s.jitter_)
            r = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    }
    // The defining invariant: ||u_j - u||_{1,1} non-increasing and shrinking.
    std::vector<double> d;
    for (int j : s.indices_) d.push_back(norm_w11(add(s.term(j), scale(s.base_, -1.0))));
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
        if (d[i + 1] > d[i] * (1.0 + 1e-9) + 1e-15)
            throw std::invalid_argument("ContinuitySequence: ||u_j - u||_{1,1} not non-increasing");
    if (d.back() > 0.5 * d.front() + 1e-15)
        throw std::invalid_argument("ContinuitySequence: ||u_j - u||_{1,1} does not shrink");
    return s;
}

PiecewiseLinearFn ContinuitySequence::term(int j) const {
    if (j < 1) throw std::invalid_argument("ContinuitySequence::term: j must be >= 1");
    switch (mode_) {
        case PerturbationMode::additive: return add(base_, scale(pert_, 1.0 / j));
        case PerturbationMode::translate: return translate(base_, 1.0 / j);
        case PerturbationMode::mollify: {
            std::vector<double> b = base_.breakpoints();
            double shift = base_.min_gap() / (3.0 * j);
            for (std::size_t i = 1; i + 1 < b.size(); ++i) b[i] += jitter_[i] * shift;
            return PiecewiseLinearFn(std::move(b), base_.values());
        }
    }
    throw std::logic_error("ContinuitySequence::term: bad mode");
}

PropertyReport check_subharmonicity(const MaximalProfile& profile, const PiecewiseLinearFn& u,
                                    double delta) {
    PropertyReport r;
    r.name = "subharmonicity";
    r.slack = 4.0 * profile.err;
    r.rhs = 0.0;
    IntervalSet D = detachment_set(profile, u, delta);
    const auto& g = profile.grid;
    const auto& w = profile.ustar;
    double worst = 0.0;  // most negative scaled second difference
    for (const Interval& iv : D.intervals) {
        for (std::size_t i = 1; i + 1 < g.size(); ++i) {
            if (!(g[i - 1] > iv.lo && g[i + 1] < iv.hi)) continue;
            double hl = g[i] - g[i - 1];
            double hr = g[i + 1] - g[i];
            double d2 = ((w[i + 1] - w[i]) / hr - (w[i] - w[i - 1]) / hl) * 0.5 * (hl + hr);
            if (d2 < worst) worst = d2;
            if (d2 < -r.slack && r.witnesses.size() < 16)
                r.witnesses.push_back({g[i], "second difference " + fmt(d2)});
        }
    }
    r.lhs = -worst;
    r.passed = r.lhs <= r.rhs + r.slack;
    if (r.passed) r.witnesses.clear();
    r.metadata["components"] = std::to_string(D.intervals.size());
    r.metadata["delta"] = fmt(delta);
    r.metadata["err"] = fmt(profile.err);
    r.metadata["kernel"] = family_name(profile.kernel.family());
    return r;
}

PropertyReport check_uniform_bound(const PiecewiseLinearFn& u, const PiecewiseLinearFn& u_j,
                                   const MaximalProfile& prof_u, const MaximalProfile& prof_j) {
    if (prof_u.grid != prof_j.grid)
        throw std::invalid_argument("check_uniform_bound: profiles must share the grid");
    if (!prof_u.kernel.same_kernel(prof_j.kernel))
        throw std::invalid_argument("check_uniform_bound: profiles must share the kernel");
    PropertyReport r;
    r.name = "uniform_bound";
    double lhs = 0.0;
    double at = prof_u.grid.front();
    for (std::size_t i = 0; i < prof_u.grid.size(); ++i) {
        double d = std::abs(prof_j.ustar[i] - prof_u.ustar[i]);
        if (d > lhs) {
            lhs = d;
            at = prof_u.grid[i];
        }
    }
    r.lhs = lhs;
    r.rhs = norm_w11(add(u_j, scale(u, -1.0)));
    r.slack = 2.0 * std::max(prof_u.err, prof_j.err);
    r.passed = r.lhs <= r.rhs + r.slack;
    if (!r.passed) r.witnesses.push_back({at, "sup gap " + fmt(lhs)});
    r.metadata["kernel"] = family_name(prof_u.kernel.family());
    r.metadata["argmax"] = fmt(at);
    return r;
}

double pick_tail_radius(const PiecewiseLinearFn& u, const PiecewiseLinearFn* u_j,
                        const MaximalEvalFn& ustar_of, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("pick_tail_radius: eps must be > 0");
    double R = std::max(std::abs(u.support_left()), std::abs(u.support_right()));
    if (u_j)
        R = std::max(R, std::max(std::abs(u_j->support_left()), std::abs(u_j->support_right())));
    auto ok = [&](const PiecewiseLinearFn& w, double r) {
        double tails = tail_variation_right(w, r) + tail_variation_left(w, -r);
        if (tails > eps / 4.0) return false;
        double s = (ustar_of(w, r) - w(r)) + (ustar_of(w, -r) - w(-r));
        return s < eps / 4.0;
    };
    while (R <= 1e6) {
        if (ok(u, R) && (!u_j || ok(*u_j, R))) return R;
        R *= 2.0;
    }
    throw std::runtime_error("pick_tail_radius: budget exhausted (R > 1e6)");
}

PropertyReport check_tail_bound(const PiecewiseLinearFn& u, const MaximalProfile& profile,
                                double R) {
    if (!(R > profile.grid.front() && R < profile.grid.back()))
        throw std::invalid_argument("check_tail_bound: R must be inside the grid span");
    PropertyReport r;
    r.name = "tail_bound";

    auto side = [&](bool right) {
        SampleSet s = right ? gather(profile, R, profile.grid.back())
                            : gather(profile, profile.grid.front(), -R);
        double lhs = sampled_tv(s.w);
        double x0 = right ? R : -R;
        double rhs = std::abs(profile.interpolate(x0) - u(x0)) +
                     (right ? tail_variation_right(u, R) : tail_variation_left(u, -R));
        double slack = (2.0 * monotone_runs(s.w) + 1.0) * profile.err;
        return std::tuple<double, double, double>(lhs, rhs, slack);
    };
    auto [lr, rr, sr] = side(true);
    auto [ll, rl, sl] = side(false);
    bool right_worse = (lr - rr - sr) >= (ll - rl - sl);
    r.lhs = right_worse ? lr : ll;
    r.rhs = right_worse ? rr : rl;
    r.slack = right_worse ? sr : sl;
    bool pass_r = lr <= rr + sr;
    bool pass_l = ll <= rl + sl;
    r.passed = pass_r && pass_l;
    if (!pass_r) r.witnesses.push_back({R, "right tail variation " + fmt(lr) + " > " + fmt(rr + sr)});
    if (!pass_l) r.witnesses.push_back({-R, "left tail variation " + fmt(ll) + " > " + fmt(rl + sl)});
    r.metadata["R"] = fmt(R);
    r.metadata["right_lhs"] = fmt(lr);
    r.metadata["right_rhs"] = fmt(rr);
    r.metadata["left_lhs"] = fmt(ll);
    r.metadata["left_rhs"] = fmt(rl);
    r.metadata["kernel"] = family_name(profile.kernel.family());
    return r;
}

PropertyReport check_lemma6(const PiecewiseLinearFn& u, const PiecewiseLinearFn& u_j,
                            const MaximalProfile& profile_j, const StepFunction& v, double eps,
                            double delta) {
    PropertyReport r;
    r.name = "lemma6";
    if (delta <= 0.0) delta = 10.0 * profile_j.err;

    double eps_actual = l1_diff(derivative(u), derivative(u_j));
    double eps_v = l1_diff(derivative(u), v);
    r.metadata["eps"] = fmt(eps);
    r.metadata["eps_actual"] = fmt(eps_actual);
    r.metadata["eps_v"] = fmt(eps_v);
    if (eps_actual > eps * (1.0 + 1e-12) + 1e-15 || eps_v > eps * (1.0 + 1e-12) + 1e-15) {
        r.metadata["applicable"] = "false";
        r.passed = true;
        return r;
    }
    r.metadata["applicable"] = "true";

    IntervalSet D = detachment_set(profile_j, u_j, delta);
    DetachmentDecomposition dec = decompose(D, v);

    const auto& ujb = u_j.breakpoints();
    double lhs = 0.0, coarse = 0.0;
    int cells = 0, interp = 0, components = 0;
    for (const auto& [gap, set] : dec.d2) {
        double alpha = v.level_on_gap(static_cast<std::size_t>(gap));
        for (const Interval& iv : set.intervals) {
            SampleSet s = gather(profile_j, iv.lo, iv.hi, ujb);
            if (s.x.size() < 2) continue;
            ++components;
            cells += static_cast<int>(s.x.size()) - 1;
            interp += s.interp;
            FdSum main = fd_abs_deriv_diff(s, [&](double x) { return u_j(x); });
            lhs += main.fine;
            coarse += main.coarse;

            // Per-component comparison against the line with slope alpha_i:
            // sampled variation of u_j* - L_i must not exceed the exact
            // variation of u_j - L_i, up to sampling error.
            double A = 0.0;
            for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
                A += std::abs((s.w[i + 1] - s.w[i]) - alpha * (s.x[i + 1] - s.x[i]));
            double B = l1_dist_to_const(u_j, alpha, s.x.front(), s.x.back());
            double comp_slack =
                2.0 * profile_j.err * (static_cast<double>(s.x.size()) + 1.0) + 1e-12 * (1.0 + B);
            if (A > B + comp_slack && r.witnesses.size() < 16)
                r.witnesses.push_back(
                    {iv.lo, "component comparison: " + fmt(A) + " > " + fmt(B + comp_slack)});
        }
    }
    double K = static_cast<double>(components);
    double correction = 4.0 * delta * K + 2.0 * profile_j.err * cells + std::abs(lhs - coarse) +
                        4.0 * profile_j.err * interp;
    r.lhs = lhs;
    r.rhs = 4.0 * eps;
    r.slack = correction;
    bool main_ok = r.lhs <= r.rhs + r.slack;
    r.passed = main_ok && r.witnesses.empty();
    if (!main_ok) r.witnesses.push_back({0.0, "detachment-interior integral " + fmt(lhs)});
    r.metadata["components"] = std::to_string(components);
    r.metadata["correction"] = fmt(correction);
    r.metadata["delta"] = fmt(delta);
    r.metadata["ratio"] = fmt(eps > 0 ? lhs / (4.0 * eps) : 0.0);
    r.metadata["kernel"] = family_name(profile_j.kernel.family());
    return r;
}

std::vector<ProfilePair> continuity_profiles(const ContinuitySequence& seq, const KernelSpec& k,
                                             const std::vector<double>& grid, double tol) {
    std::vector<ProfilePair> out;
    out.reserve(seq.indices().size());
    for (int j : seq.indices()) {
        PiecewiseLinearFn uj = seq.term(j);
        std::vector<double> extra = seq.base().breakpoints();
        extra.insert(extra.end(), uj.breakpoints().begin(), uj.breakpoints().end());
        std::vector<double> g = union_grid(grid, extra);
        ProfilePair pair{j, maximal_profile(uj, k, g, tol), maximal_profile(seq.base(), k, g, tol)};
        out.push_back(std::move(pair));
    }
    return out;
}

PropertyReport check_finite_intervals(const PiecewiseLinearFn& u, const ContinuitySequence& seq,
                                      const std::vector<ProfilePair>& profiles, double eps_v,
                                      double delta) {
    PropertyReport r;
    r.name = "finite_intervals";
    StepFunction v = simple_approx(derivative(u), eps_v);
    double du_norm = norm_l1(derivative(u));

    std::vector<double> integrals;
    for (const ProfilePair& p : profiles) {
        double d = delta > 0.0 ? delta : 10.0 * p.uj.err;
        PiecewiseLinearFn uj = seq.term(p.j);
        IntervalSet D = detachment_set(p.uj, uj, d);
        DetachmentDecomposition dec = decompose(D, v);
        double I = 0.0;
        for (const Interval& iv : dec.d1.intervals) {
            SampleSet sj = gather(p.uj, iv.lo, iv.hi);
            SampleSet su = gather(p.u, iv.lo, iv.hi);
            for (std::size_t i = 0; i + 1 < sj.x.size(); ++i)
                I += std::abs((sj.w[i + 1] - sj.w[i]) - (su.w[i + 1] - su.w[i]));

            // Closed form for the variation of a convex detached component:
            // endpoints minus twice the minimum.
            double stv = sampled_tv(sj.w);
            double cf = sj.w.front() - 2.0 * *std::min_element(sj.w.begin(), sj.w.end()) +
                        sj.w.back();
            double slack_cf =
                0.02 * std::max(cf, stv) + 8.0 * p.uj.err * (monotone_runs(sj.w) + 2.0) + 1e-12;
            if (std::abs(stv - cf) > slack_cf && r.witnesses.size() < 16)
                r.witnesses.push_back({iv.lo, "closed form " + fmt(cf) + " vs sampled " + fmt(stv) +
                                                   " at j=" + std::to_string(p.j)});
        }
        integrals.push_back(I);
        r.metadata["I_" + std::to_string(p.j)] = fmt(I);
    }
    r.lhs = integrals.back();
    r.rhs = 0.05 * du_norm;
    r.slack = 0.0;
    bool decr = eventually_decreasing(integrals);
    if (!decr) r.witnesses.push_back({0.0, "d1 integral sequence not eventually decreasing"});
    r.passed = decr && r.lhs <= r.rhs && r.witnesses.empty();
    r.metadata["eps_v"] = fmt(eps_v);
    r.metadata["du_norm"] = fmt(du_norm);
    return r;
}

PropertyReport check_prop5(const PiecewiseLinearFn& u, const ContinuitySequence& seq,
                           const std::vector<ProfilePair>& profiles, double a, double b) {
    PropertyReport r;
    r.name = "prop5";
    if (!(a < b)) throw std::invalid_argument("check_prop5: need a < b");

    std::vector<double> diffs;
    double v_u_last = 0.0;
    for (const ProfilePair& p : profiles) {
        SampleSet sj = gather(p.uj, a, b);
        SampleSet su = gather(p.u, a, b);
        double vj = sampled_tv(sj.w);
        double vu = sampled_tv(su.w);
        diffs.push_back(std::abs(vj - vu));
        v_u_last = vu;
        r.metadata["var_" + std::to_string(p.j)] = fmt(vj);
    }
    r.metadata["var_limit"] = fmt(v_u_last);

    // Partition bookkeeping on the doubled partition of the proof. The base
    // partition comes from the extremal points of u (its breakpoints) and of
    // the sampled u*.
    const ProfilePair& last = profiles.back();
    std::vector<double> base_pts{a, b};
    for (double bp : u.breakpoints())
        if (bp > a && bp < b) base_pts.push_back(bp);
    {
        SampleSet su = gather(last.u, a, b);
        Partition pu = extremal_partition(su.x, su.w, a, b, 0.0);
        base_pts.insert(base_pts.end(), pu.points.begin(), pu.points.end());
    }
    std::sort(base_pts.begin(), base_pts.end());
    base_pts.erase(std::unique(base_pts.begin(), base_pts.end()), base_pts.end());
    std::size_t K = base_pts.size() - 1;

    PiecewiseLinearFn uj_last = seq.term(last.j);
    double sup = sup_diff(uj_last, u);
    std::vector<double> pp{base_pts.front()};
    for (std::size_t c = 0; c + 1 < base_pts.size(); ++c) {
        SampleSet sj = gather(last.uj, base_pts[c], base_pts[c + 1]);
        if (sj.x.size() >= 4) {
            try {
                Partition pi = extremal_partition(sj.x, sj.w, base_pts[c], base_pts[c + 1], 0.0);
                if (pi.size() >= 4) {
                    pp.push_back(pi.points[1]);
                    pp.push_back(pi.points[pi.size() - 2]);
                }
            } catch (const partition_error&) {
                // thin cell: endpoints only
            }
        }
        pp.push_back(base_pts[c + 1]);
    }
    std::sort(pp.begin(), pp.end());
    pp.erase(std::unique(pp.begin(), pp.end()), pp.end());
    bool card_ok = pp.size() <= 3 * K + 1;
    if (!card_ok)
        r.witnesses.push_back({a, "doubled partition cardinality " + std::to_string(pp.size()) +
                                      " exceeds 3K+1 = " + std::to_string(3 * K + 1)});

    auto var_at = [&pp](const MaximalProfile& prof) {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < pp.size(); ++i)
            s += std::abs(prof.interpolate(pp[i + 1]) - prof.interpolate(pp[i]));
        return s;
    };
    double var_j = var_at(last.uj);
    double var_u = var_at(last.u);
    double book_rhs = var_u + 12.0 * static_cast<double>(K) * sup;
    double book_slack = 4.0 * last.uj.err * static_cast<double>(pp.size());
    if (var_j >= book_rhs + book_slack)
        r.witnesses.push_back(
            {a, "bookkeeping bound: " + fmt(var_j) + " >= " + fmt(book_rhs + book_slack)});

    r.lhs = diffs.back();
    r.rhs = 0.05 * v_u_last;
    r.slack = 2.0 * last.uj.err;
    bool decr = eventually_decreasing(diffs);
    if (!decr) r.witnesses.push_back({a, "variation differences not eventually decreasing"});
    r.passed = r.lhs <= r.rhs + r.slack && r.witnesses.empty();
    r.metadata["K"] = std::to_string(K);
    r.metadata["pp_size"] = std::to_string(pp.size());
    r.metadata["sup_diff"] = fmt(sup);
    r.metadata["book_lhs"] = fmt(var_j);
    r.metadata["book_rhs"] = fmt(book_rhs);
    return r;
}

PropertyReport check_convex_limit(const std::vector<SampledOnInterval>& terms,
                                  const SampledOnInterval& limit, double slack) {
    PropertyReport r;
    r.name = "convex_limit";
    if (terms.empty()) throw std::invalid_argument("check_convex_limit: no terms");

    auto interp = [](const SampledOnInterval& s, double x) {
        auto it = std::upper_bound(s.grid.begin(), s.grid.end(), x);
        if (it == s.grid.begin()) return s.values.front();
        if (it == s.grid.end()) return s.values.back();
        std::size_t i = static_cast<std::size_t>(it - s.grid.begin()) - 1;
        double w = (x - s.grid[i]) / (s.grid[i + 1] - s.grid[i]);
        return s.values[i] + w * (s.values[i + 1] - s.values[i]);
    };

    // Precondition: each term convex on its own interval.
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const auto& s = terms[t];
        for (std::size_t i = 1; i + 1 < s.grid.size(); ++i) {
            if (s.grid[i - 1] < s.lo || s.grid[i + 1] > s.hi) continue;
            double hl = s.grid[i] - s.grid[i - 1];
            double hr = s.grid[i + 1] - s.grid[i];
            double d2 = ((s.values[i + 1] - s.values[i]) / hr -
                         (s.values[i] - s.values[i - 1]) / hl) *
                        0.5 * (hl + hr);
            if (d2 < -slack && r.witnesses.size() < 16)
                r.witnesses.push_back({s.grid[i], "term " + std::to_string(t) +
                                                      " not convex: second difference " + fmt(d2)});
        }
    }

    // Midpoint convexity of the limit on a fixed interior grid.
    double w = limit.hi - limit.lo;
    std::vector<double> q(17);
    for (int i = 0; i < 17; ++i) q[i] = limit.lo + w * (0.1 + 0.8 * i / 16.0);
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = i + 2; j < q.size(); ++j) {
            double mid = 0.5 * (q[i] + q[j]);
            double lhs = interp(limit, mid);
            double rhs = 0.5 * (interp(limit, q[i]) + interp(limit, q[j]));
            if (lhs > rhs + slack && r.witnesses.size() < 16)
                r.witnesses.push_back({mid, "limit midpoint convexity violated by " + fmt(lhs - rhs)});
        }

    // Slope convergence on the interior grid.
    double h = w / 100.0;
    auto slope = [&](const SampledOnInterval& s, double x) {
        return (interp(s, x + h) - interp(s, x - h)) / (2.0 * h);
    };
    double smin = slope(limit, q.front()), smax = smin;
    for (double x : q) {
        double sl = slope(limit, x);
        smin = std::min(smin, sl);
        smax = std::max(smax, sl);
    }
    double range = std::max(smax - smin, 1e-9);
    std::vector<double> dev;
    for (const auto& s : terms) {
        double d = 0.0;
        for (double x : q) d = std::max(d, std::abs(slope(s, x) - slope(limit, x)));
        dev.push_back(d);
    }
    r.lhs = dev.back();
    r.rhs = 0.01 * range;
    r.slack = 0.0;
    r.passed = r.witnesses.empty() && r.lhs <= r.rhs;
    r.metadata["slope_range"] = fmt(range);
    r.metadata["first_dev"] = fmt(dev.front());
    r.metadata["final_dev"] = fmt(dev.back());
    return r;
}

ContinuityTable continuity_experiment(const ContinuitySequence& seq, const KernelSpec& kernel,
                                      const std::vector<double>& grid, double tol) {
    ContinuityTable table;
    PiecewiseLinearFn ua = abs_part(seq.base());
    double du_norm = norm_l1(derivative(ua));

    // The grid must span the tail radius for eps = 0.01 ||u'||_1.
    MaximalEvalFn ev = [&](const PiecewiseLinearFn& w, double x) {
        return maximal_at(w, kernel, x, tol).value;
    };
    double R = pick_tail_radius(ua, nullptr, ev, std::max(0.01 * du_norm, 1e-9));
    if (grid.front() > -R || grid.back() < R)
        throw std::invalid_argument("continuity_experiment: grid must span [-R, R] with R = " +
                                    std::to_string(R));

    MaximalProfile prof_u0 =
        maximal_profile(ua, kernel, union_grid(grid, ua.breakpoints()), tol);
    IntervalSet D = detachment_set(prof_u0, ua, 10.0 * tol);

    std::vector<ProfilePair> pairs = continuity_profiles(seq, kernel, grid, tol);
    std::vector<double> es;
    PropertyReport& verdict = table.verdict;
    verdict.name = "continuity_experiment";

    for (const ProfilePair& p : pairs) {
        ContinuityRow row;
        row.j = p.j;
        PiecewiseLinearFn uj = seq.term(p.j);
        row.w11_diff = norm_w11(add(uj, scale(seq.base(), -1.0)));
        double e = 0.0, e2h = 0.0, ec = 0.0, ed = 0.0, mc = 0.0;
        double supd = 0.0;
        const auto& g = p.uj.grid;
        for (std::size_t i = 0; i < g.size(); ++i)
            supd = std::max(supd, std::abs(p.uj.ustar[i] - p.u.ustar[i]));
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            double dj = p.uj.ustar[i + 1] - p.uj.ustar[i];
            double du = p.u.ustar[i + 1] - p.u.ustar[i];
            double term = std::abs(dj - du);
            e += term;
            double mid = 0.5 * (g[i] + g[i + 1]);
            if (D.contains(mid)) {
                ed += term;
            } else {
                double dua = ua(g[i + 1]) - ua(g[i]);
                ec += std::abs(dj - dua);
                mc += std::abs(du - dua);
            }
        }
        for (std::size_t i = 0; i + 2 < g.size(); i += 2)
            e2h += std::abs((p.uj.ustar[i + 2] - p.uj.ustar[i]) - (p.u.ustar[i + 2] - p.u.ustar[i]));
        if ((g.size() - 1) % 2)
            e2h += std::abs((p.uj.ustar[g.size() - 1] - p.uj.ustar[g.size() - 2]) -
                            (p.u.ustar[g.size() - 1] - p.u.ustar[g.size() - 2]));
        row.sup_diff = supd;
        row.e_total = e;
        row.e_contact = ec;
        row.e_detach = ed;
        row.identity_residual = std::abs(e - ec - ed);
        double slack_id = 0.01 * du_norm + 4.0 * tol;
        if (row.identity_residual > 2.0 * slack_id)
            verdict.witnesses.push_back(
                {static_cast<double>(p.j),
                 "contact/detachment split residual " + fmt(row.identity_residual)});
        // The residual is bounded by the contact-set deviation of (u*)' from
        // u'; record both so the report shows the split is honest.
        verdict.metadata["contact_dev_" + std::to_string(p.j)] = fmt(mc);
        double fd_resid = std::abs(e - e2h);
        if (fd_resid > 0.05 * e + 20.0 * tol)
            verdict.witnesses.push_back(
                {static_cast<double>(p.j), "fd refinement residual " + fmt(fd_resid)});
        es.push_back(e);
        table.rows.push_back(row);
    }

    verdict.lhs = es.back();
    verdict.rhs = 0.05 * du_norm;
    verdict.slack = 0.0;
    bool decr = eventually_decreasing(es);
    if (!decr)
        verdict.witnesses.push_back({0.0, "E_j not decreasing over the last three indices"});
    verdict.passed = decr && verdict.lhs <= verdict.rhs && verdict.witnesses.empty();
    verdict.metadata["kernel"] = family_name(kernel.family());
    verdict.metadata["mode"] = mode_name(seq.mode());
    verdict.metadata["du_norm"] = fmt(du_norm);
    verdict.metadata["R"] = fmt(R);
    verdict.metadata["tol"] = fmt(tol);
    return table;
}

PropertyReport check_variation_diminishing(const PiecewiseLinearFn& u,
                                           const MaximalProfile& profile) {
    PropertyReport r;
    r.name = "variation_diminishing";
    double width = u.support_right() - u.support_left();
    if (profile.grid.front() > u.support_left() - 0.5 * width ||
        profile.grid.back() < u.support_right() + 0.5 * width)
        throw std::invalid_argument(
            "check_variation_diminishing: grid must span beyond the support");
    double denom = norm_l1(derivative(u));
    double numer = sampled_tv(profile.ustar);
    double rho = denom > 0.0 ? numer / denom : 0.0;
    r.lhs = rho;
    r.rhs = 1.02;
    r.slack = 0.0;
    KernelFamily fam = profile.kernel.family();
    if (fam == KernelFamily::fractional_poisson) {
        r.passed = true;
        r.metadata["measurement_only"] = "true";
    } else {
        r.passed = rho <= 1.02;
        if (!r.passed) r.witnesses.push_back({0.0, "variation ratio " + fmt(rho)});
    }
    r.metadata["ratio"] = fmt(rho);
    r.metadata["kernel"] = family_name(fam);
    return r;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    if (n < 2 || !(lo < hi)) throw std::invalid_argument("uniform_grid: bad arguments");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    g.back() = hi;
    return g;
}

std::vector<double> union_grid(const std::vector<double>& base, const std::vector<double>& extra) {
    std::vector<double> g = base;
    for (double e : extra)
        if (e > base.front() && e < base.back()) g.push_back(e);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

}  // namespace maxop
