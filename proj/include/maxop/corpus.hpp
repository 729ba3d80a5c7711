#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "maxop/pwl.hpp"

namespace maxop {

PiecewiseLinearFn make_tent(double center, double halfwidth, double height);

/// Zigzag with the given peak heights; valleys interpolate the floor values
/// (zero at both ends).
PiecewiseLinearFn make_sawtooth(double lo, double hi, const std::vector<double>& peaks,
                                const std::vector<double>& floors);

/// Plateau levels connected by short ramps (continuous step-like profile).
PiecewiseLinearFn make_step_ramp(double lo, double hi, const std::vector<double>& levels,
                                 double ramp_fraction);

PiecewiseLinearFn make_random_pl(unsigned long long seed, int interior_points, double lo,
                                 double hi);

/// Deterministic seeded mix of tents, random (sign-changing) functions,
/// sawtooths and step-like ramps, each normalized to ||.||_{1,1} = 1.
std::vector<PiecewiseLinearFn> generate_corpus(unsigned long long seed, int n);

/// Function definitions accepted by the CLI: either the plain
/// {"breakpoints": [...], "values": [...]} schema or a named generator
/// {"type": "tent"|"steps"|"sawtooth"|"random_pl", "params": {...}, "seed": n}.
PiecewiseLinearFn function_from_json(const nlohmann::json& j);

}  // namespace maxop
