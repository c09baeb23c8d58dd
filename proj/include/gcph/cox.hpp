#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gcph/matrix.hpp"

namespace gcph {

// One subject: covariates (on whatever scale the caller standardized to),
// observed time, and whether the event was seen.
struct SurvivalRecord {
    std::vector<double> x;
    double time = 0.0;
    bool event = false;
};

// Precomputed ordering shared by every partial-likelihood sweep.
// `order` sorts subjects by ascending time (ties broken by original index so
// the index is deterministic); `tie_groups` are [begin,end) ranges into
// `order` covering subjects with equal times. R(t_i) = {j : t_j >= t_i}.
struct RiskSetIndex {
    std::vector<std::size_t> order;
    std::vector<std::pair<std::size_t, std::size_t>> tie_groups;
    std::vector<std::size_t> event_positions; // original indices with event
    std::vector<double> time;                 // by original index
    std::vector<char> event;                  // by original index

    std::size_t n() const { return order.size(); }
};

// Step-function estimate of the cumulative baseline hazard H0(t):
// piecewise constant, jumping at each distinct event time.
struct BreslowBaseline {
    std::vector<double> times;      // ascending distinct event times
    std::vector<double> cum_hazard; // H0 at each time, non-decreasing
};

struct LinearCphFit {
    std::vector<double> beta;
    bool converged = false;
    int iterations = 0;
    double log_likelihood = 0.0;
};

RiskSetIndex build_risk_index(std::span<const double> times, std::span<const char> events);
RiskSetIndex build_risk_index(const std::vector<SurvivalRecord>& records);

// Breslow-tie log partial likelihood of per-subject scores f_j:
//   sum_{i: event} ( f_i - ln sum_{j in R(t_i)} e^{f_j} ),
// computed with a single latest-to-earliest streaming log-sum-exp sweep.
double log_partial_likelihood(std::span<const double> scores, const RiskSetIndex& idx);

// d ll / d f_j = delta_j - e^{f_j} * sum_{events i: t_i <= t_j} 1 / sum_{k in R(t_i)} e^{f_k}.
// Entries sum to zero.
std::vector<double> log_partial_likelihood_grad(std::span<const double> scores,
                                                const RiskSetIndex& idx);

// H0(t) = sum_{event times t_i <= t} d_i / sum_{j in R(t_i)} e^{f_j}.
BreslowBaseline breslow_baseline(std::span<const double> scores, const RiskSetIndex& idx);

// S(t | score s) = exp(-H0(t) * e^s); right-continuous in t.
double predict_survival(double score, const BreslowBaseline& base, double t);

// Newton-Raphson maximization of the Breslow partial likelihood with f = beta.x.
// Steps are halved until the likelihood stops decreasing; convergence when the
// largest score-equation component drops below 1e-8 (at most 100 iterations).
LinearCphFit fit_linear_cph(const std::vector<SurvivalRecord>& records);
LinearCphFit fit_linear_cph(const Matrix& X, const RiskSetIndex& idx);

} // namespace gcph
