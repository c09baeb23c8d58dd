#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcph/data.hpp"
#include "gcph/model.hpp"

namespace gcph {

// Weights of the sparsity regularizer: gamma * (mu1 * |Phi|_1 + mu2 * H(Phi)).
struct RegConfig {
    double mu1 = 1.0;
    double mu2 = 10.0;
    double gamma = 0.1;
};

struct TrainConfig {
    int num_intervals = 5;
    int order = 3;
    double learning_rate = 0.01;
    int max_steps = 2000;
    std::uint64_t seed = 0;
    bool linear_only = false; // identity basis, spline frozen: one slope per feature
    double init_coeff_sd = 0.1;
};

struct TrainLogEntry {
    int step = 0;
    double nll = 0.0;
    double l1 = 0.0;
    double entropy = 0.0;
    double total = 0.0;
};

struct TrainLog {
    std::vector<TrainLogEntry> entries;
    int best_step = 0;
    double best_loss = 0.0;

    // line-oriented: step,nll,l1,entropy,total
    std::string to_csv() const;
};

// Per-activation L1 norm over the batch: (1/n) sum_i |phi_v(x_iv)|,
// on raw (uncentered) activation outputs.
std::vector<double> l1_norm_per_activation(const GcphModel& m, const Matrix& X);

// H = -sum_v p_v ln p_v with p_v = l1_v / sum_w l1_w; 0 when the total is 0.
double entropy_loss(std::span<const double> l1s);

struct LossParts {
    double nll = 0.0;
    double l1 = 0.0;
    double entropy = 0.0;
    double total = 0.0;
};

LossParts total_loss(const GcphModel& m, const Matrix& X, const RiskSetIndex& idx,
                     const RegConfig& reg);

// Gradient of the total loss w.r.t. the flattened parameters. The L1 term uses
// the sign subgradient (sign(0) = 0); the entropy term is differentiated
// analytically through the p_v.
std::vector<double> total_loss_grad(const GcphModel& m, const Matrix& X,
                                    const RiskSetIndex& idx, const RegConfig& reg);

// Per-feature grids covering the standardized training range, padded by 1% of
// the range on each side; a degenerate (constant) feature gets [v-0.5, v+0.5].
std::vector<KnotGrid> build_grids(const Dataset& ds, int num_intervals, int order);

// Full-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8) on the total loss.
// Deterministic given the seed; returns the best-loss iterate with the
// centering offset set to the mean training log-risk.
std::pair<GcphModel, TrainLog> train(const Dataset& ds, const TrainConfig& cfg,
                                     const RegConfig& reg);

std::vector<std::pair<GcphModel, TrainLog>> train_multi_seed(
    const Dataset& ds, const TrainConfig& cfg, const RegConfig& reg,
    std::span<const std::uint64_t> seeds);

} // namespace gcph
