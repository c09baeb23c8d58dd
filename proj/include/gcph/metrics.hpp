#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace gcph {

// Product-limit estimator as a right-continuous step function. `times` holds
// every distinct observed time; `surv` the estimate at (and after) each.
struct KaplanMeier {
    std::vector<double> times;
    std::vector<double> surv;

    // S(t): value at the largest step time <= t (1 before the first).
    double surv_at(double t) const;
    // Left limit S(t-): value just before t.
    double surv_before(double t) const;
};

struct Horizon {
    double t = 0.0;
    std::string label;
};

KaplanMeier kaplan_meier(std::span<const double> times, std::span<const char> events);

// Censoring distribution G: the Kaplan-Meier with censorings treated as events.
KaplanMeier censoring_km(std::span<const double> times, std::span<const char> events);

// Pair-weighted concordance over ordered pairs (i,j) with t_i < t_j,
// delta_i = 1 and t_i <= horizon.t. Each pair carries weight (delta_i +
// delta_j); score ties earn half weight. `classic` switches to Harrell's
// unweighted convention. O(n log n) via a sorted sweep with rank counters.
double c_index(std::span<const double> times, std::span<const char> events,
               std::span<const double> scores, const Horizon& horizon,
               bool classic = false);

// IPCW Brier score at horizon.t. Subjects with an event by t contribute
// S_hat^2 / G(t_i-), survivors (S_hat - 1)^2 / G(t), earlier censorings 0;
// the censoring survival G comes from the training split.
double brier_score(std::span<const double> times, std::span<const char> events,
                   std::span<const double> surv_at_t, const KaplanMeier& censor_km,
                   const Horizon& horizon);

// 25/50/75th linear-interpolation percentiles of the raw training times.
std::array<Horizon, 3> percentile_horizons(std::span<const double> train_times);

} // namespace gcph
