#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gcph/model.hpp"

namespace gcph {

// One closed-form candidate y(x). `in_domain` guards partial functions
// (ln needs positive arguments, sqrt non-negative ones).
struct CandidateFn {
    std::string name;
    double (*eval)(double);
    bool (*in_domain)(double);
};

// x, pow2, pow3, pow4, exp, ln, sqrt, tanh, sin — in fixed order.
const std::vector<CandidateFn>& candidate_library();

struct AffineFit {
    std::array<double, 4> alpha{0.0, 0.0, 0.0, 0.0}; // a3 * y(a1 x + a2) + a4
    double r2 = 0.0; // -inf when the candidate is infeasible everywhere
};

// Fits a3 * y(a1 x + a2) + a4 to (xs, ys): a coarse grid over (a1, a2) with
// (a3, a4) solved by least squares at every point, then 200 steps of
// shrinking-step coordinate descent from the best grid point. a1 ranges over
// 101 log-and-sign-spaced values in [-10, 10]; a2 over 101 linear values
// spanning the shift range the data window needs. Grid points that leave the
// candidate's domain for any x are skipped.
AffineFit affine_fit(const CandidateFn& candidate, std::span<const double> xs,
                     std::span<const double> ys);

struct SymbolicTerm {
    std::size_t feature = 0;
    std::string candidate;
    std::array<double, 4> alpha{0.0, 0.0, 0.0, 0.0};
    double r2 = 0.0;
};

// f(x) ~= sum over terms of a3 * y(a1 x_v + a2), plus `constant` (which has
// absorbed every a4, the dropped near-constant activations, and the model's
// gauge so that the sum reconstructs the additive log-risk).
struct SymbolicModel {
    std::vector<SymbolicTerm> terms;
    std::vector<std::size_t> dropped;
    double constant = 0.0;
};

// Distills each activation: samples the per-feature curve on n_points uniform
// points over the feature's training range, picks the best-R^2 candidate, and
// drops terms whose fitted output amplitude over the range is below 0.05.
SymbolicModel symbolify(const GcphModel& m, std::size_t n_points = 201);

double symbolic_eval(const SymbolicModel& sm, std::span<const double> x);

// "f = -1.60*tanh(0.50*x1 + 1.10) - 1.30*sin(0.50*x2 + 9.30) + 0.90", with
// coefficients rounded half-away-from-zero to `decimals` digits. Terms appear
// in feature order; the x candidate collapses to a plain slope.
std::string render_formula(const SymbolicModel& sm, int decimals = 2);

// {terms:[{feature, candidate, alpha:[..], r2}], dropped:[..], constant}
std::string symbolic_to_json(const SymbolicModel& sm);

} // namespace gcph
