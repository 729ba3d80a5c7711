#include "maxop/corpus.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace maxop {

namespace {

// Portable uniform in [0, 1): engine output is specified by the standard,
// the mantissa extraction keeps the stream identical across platforms.
double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double a, double b) { return a + (b - a) * u01(rng); }

}  // namespace

PiecewiseLinearFn make_tent(double center, double halfwidth, double height) {
    if (!(halfwidth > 0.0)) throw std::invalid_argument("make_tent: halfwidth must be > 0");
    return PiecewiseLinearFn({center - halfwidth, center, center + halfwidth},
                             {0.0, height, 0.0});
}

PiecewiseLinearFn make_sawtooth(double lo, double hi, const std::vector<double>& peaks,
                                const std::vector<double>& floors) {
    if (peaks.empty()) throw std::invalid_argument("make_sawtooth: need at least one peak");
    if (floors.size() + 1 != peaks.size())
        throw std::invalid_argument("make_sawtooth: need one floor between consecutive peaks");
    std::size_t n = 2 * peaks.size() + 1;
    std::vector<double> b(n), v(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = lo + (hi - lo) * i / (n - 1);
    v[0] = 0.0;
    for (std::size_t p = 0; p < peaks.size(); ++p) {
        v[2 * p + 1] = peaks[p];
        if (p + 1 < peaks.size()) v[2 * p + 2] = floors[p];
    }
    v[n - 1] = 0.0;
    return PiecewiseLinearFn(std::move(b), std::move(v));
}

PiecewiseLinearFn make_step_ramp(double lo, double hi, const std::vector<double>& levels,
                                 double ramp_fraction) {
    if (levels.empty()) throw std::invalid_argument("make_step_ramp: need at least one level");
    if (!(ramp_fraction > 0.0 && ramp_fraction < 0.5))
        throw std::invalid_argument("make_step_ramp: ramp_fraction must be in (0, 0.5)");
    std::size_t m = levels.size();
    double cell = (hi - lo) / m;
    double ramp = cell * ramp_fraction;
    std::vector<double> b{lo}, v{0.0};
    for (std::size_t i = 0; i < m; ++i) {
        double cl = lo + i * cell;
        b.push_back(cl + ramp);
        v.push_back(levels[i]);
        b.push_back(cl + cell);
        v.push_back(levels[i]);
    }
    b.push_back(hi + ramp);
    v.push_back(0.0);
    return PiecewiseLinearFn(std::move(b), std::move(v));
}

PiecewiseLinearFn make_random_pl(unsigned long long seed, int interior_points, double lo,
                                 double hi) {
    if (interior_points < 1) throw std::invalid_argument("make_random_pl: need interior points");
    std::mt19937_64 rng(seed);
    int n = interior_points + 2;
    std::vector<double> b(n), v(n, 0.0);
    // Stratified positions keep a positive minimum gap.
    for (int i = 0; i < n; ++i)
        b[i] = lo + (hi - lo) * (i + 0.8 * u01(rng)) / (n - 1 + 0.8);
    for (int i = 1; i + 1 < n; ++i) v[i] = uniform(rng, -1.0, 1.0);
    return PiecewiseLinearFn(std::move(b), std::move(v));
}

std::vector<PiecewiseLinearFn> generate_corpus(unsigned long long seed, int n) {
    if (n < 1) throw std::invalid_argument("generate_corpus: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<PiecewiseLinearFn> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        PiecewiseLinearFn f = [&]() -> PiecewiseLinearFn {
            switch (i % 4) {
                case 0:
                    return make_tent(uniform(rng, -1.5, 1.5), uniform(rng, 0.6, 2.2),
                                     uniform(rng, 0.5, 2.0));
                case 1:
                    return make_random_pl(rng(), 6 + static_cast<int>(u01(rng) * 9), -2.5, 2.5);
                case 2: {
                    int teeth = 3 + static_cast<int>(u01(rng) * 3.999);
                    std::vector<double> peaks(teeth), floors(teeth - 1);
                    for (double& p : peaks) p = uniform(rng, 0.5, 1.8);
                    for (double& fl : floors) fl = uniform(rng, 0.0, 0.3);
                    return make_sawtooth(uniform(rng, -3.0, -2.0), uniform(rng, 2.0, 3.0), peaks,
                                         floors);
                }
                default: {
                    int m = 2 + static_cast<int>(u01(rng) * 2.999);
                    std::vector<double> levels(m);
                    for (double& l : levels) l = uniform(rng, 0.3, 1.5);
                    return make_step_ramp(uniform(rng, -2.5, -1.5), uniform(rng, 1.5, 2.5), levels,
                                          uniform(rng, 0.08, 0.2));
                }
            }
        }();
        out.push_back(scale(f, 1.0 / norm_w11(f)));
    }
    return out;
}

PiecewiseLinearFn function_from_json(const nlohmann::json& j) {
    if (j.contains("breakpoints")) return pwl_from_json(j);
    std::string type = j.at("type").get<std::string>();
    nlohmann::json params = j.value("params", nlohmann::json::object());
    unsigned long long seed = j.value("seed", 0ULL);
    if (type == "tent") {
        return make_tent(params.value("center", 0.0), params.value("halfwidth", 1.0),
                         params.value("height", 1.0));
    }
    if (type == "steps") {
        std::vector<double> levels = params.value("levels", std::vector<double>{1.0, 0.5});
        return make_step_ramp(params.value("lo", -2.0), params.value("hi", 2.0), levels,
                              params.value("ramp_fraction", 0.1));
    }
    if (type == "sawtooth") {
        std::vector<double> peaks = params.value("peaks", std::vector<double>{1.0, 1.0, 1.0, 1.0});
        std::vector<double> floors =
            params.value("floors", std::vector<double>(peaks.size() - 1, 0.2));
        return make_sawtooth(params.value("lo", -2.0), params.value("hi", 2.0), peaks, floors);
    }
    if (type == "random_pl") {
        return make_random_pl(seed, params.value("interior_points", 8), params.value("lo", -2.5),
                              params.value("hi", 2.5));
    }
    throw std::invalid_argument("function_from_json: unknown type '" + type + "'");
}

}  // namespace maxop
