#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gcph/matrix.hpp"
#include "gcph/spline.hpp"

namespace gcph {

// z-score transform applied to a raw feature at ingestion; identity for
// columns that were never scaled (one-hot indicators).
struct FeatureStats {
    double mean = 0.0;
    double sd = 1.0;
};

// Single-layer KAN log-risk model: f(x) = sum_v phi_v(x_v) - centering_offset.
// The centering offset fixes the gauge (the partial likelihood is invariant
// to additive constants) so per-feature curves are comparable across seeds.
struct GcphModel {
    std::vector<Activation> activations;
    std::vector<std::string> feature_names;
    double centering_offset = 0.0;
    std::vector<FeatureStats> standardization;

    std::size_t num_features() const { return activations.size(); }
    bool linear_only() const {
        return !activations.empty() && activations.front().basis == BasisKind::identity;
    }
};

// Throws config_error / input_error when invariants are violated.
void validate_model(const GcphModel& m);

// Number of flattened parameters: sum over activations of 2 + #coeffs.
std::size_t param_count(const GcphModel& m);

// Flat layout per activation: omega_b, omega_s, coeffs[0..). Round-trips.
std::vector<double> flatten_params(const GcphModel& m);
void unflatten_params(GcphModel& m, std::span<const double> params);

// x is on the model's standardized scale.
double log_risk(const GcphModel& m, std::span<const double> x);

// x_raw is an unstandardized row; the model applies its stored transform.
double log_risk_raw(const GcphModel& m, std::span<const double> x_raw);

std::vector<double> log_risk_batch(const GcphModel& m, const Matrix& X);

// Jacobian of log_risk w.r.t. the flattened parameters, one row per subject.
Matrix log_risk_grad_batch(const GcphModel& m, const Matrix& X);

// Scores, raw per-activation values (n x V, uncentered), and the Jacobian in
// one pass; the trainer consumes all three every step.
struct BatchEval {
    std::vector<double> scores;
    Matrix phi;
    Matrix jac;
};
BatchEval eval_batch_full(const GcphModel& m, const Matrix& X);

// f with feature v swept over xs and every other feature pinned to 0
// (standardized scale).
std::vector<double> per_feature_curve(const GcphModel& m, std::size_t v,
                                      std::span<const double> xs);

// JSON persistence. Field order is fixed; numbers keep full precision.
std::string model_to_json(const GcphModel& m);
GcphModel model_from_json(const std::string& text);
void save_model(const GcphModel& m, const std::string& path);
GcphModel load_model(const std::string& path);

} // namespace gcph
