#include "gcph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

#include "gcph/errors.hpp"

namespace gcph {

namespace {

void check_survival_input(std::span<const double> times, std::span<const char> events) {
    if (times.empty()) throw input_error("empty survival data");
    if (times.size() != events.size()) throw input_error("times/events length mismatch");
    for (double t : times) {
        if (!std::isfinite(t) || t <= 0.0) throw input_error("times must be finite and positive");
    }
}

struct Fenwick {
    std::vector<long long> tree;
    explicit Fenwick(std::size_t n) : tree(n + 1, 0) {}
    void add(std::size_t i) {
        for (++i; i < tree.size(); i += i & (~i + 1)) ++tree[i];
    }
    // count of inserted ranks in [0, i)
    long long below(std::size_t i) const {
        long long s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += tree[i];
        return s;
    }
};

} // namespace

double KaplanMeier::surv_at(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 1.0;
    return surv[static_cast<std::size_t>(it - times.begin()) - 1];
}

double KaplanMeier::surv_before(double t) const {
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 1.0;
    return surv[static_cast<std::size_t>(it - times.begin()) - 1];
}

KaplanMeier kaplan_meier(std::span<const double> times, std::span<const char> events) {
    check_survival_input(times, events);
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    KaplanMeier km;
    double s = 1.0;
    std::size_t at_risk = times.size();
    std::size_t p = 0;
    while (p < order.size()) {
        const double t = times[order[p]];
        std::size_t d = 0, group = 0;
        while (p < order.size() && times[order[p]] == t) {
            if (events[order[p]]) ++d;
            ++group;
            ++p;
        }
        if (d > 0) s *= 1.0 - static_cast<double>(d) / static_cast<double>(at_risk);
        km.times.push_back(t);
        km.surv.push_back(s);
        at_risk -= group;
    }
    return km;
}

KaplanMeier censoring_km(std::span<const double> times, std::span<const char> events) {
    std::vector<char> flipped(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) flipped[i] = events[i] ? 0 : 1;
    return kaplan_meier(times, flipped);
}

double c_index(std::span<const double> times, std::span<const char> events,
               std::span<const double> scores, const Horizon& horizon, bool classic) {
    check_survival_input(times, events);
    if (scores.size() != times.size()) throw input_error("scores length mismatch");
    for (double s : scores) {
        if (!std::isfinite(s)) throw input_error("non-finite risk score");
    }

    // score ranks (0-based, ties share a rank)
    std::vector<double> sorted_scores(scores.begin(), scores.end());
    std::sort(sorted_scores.begin(), sorted_scores.end());
    sorted_scores.erase(std::unique(sorted_scores.begin(), sorted_scores.end()),
                        sorted_scores.end());
    const std::size_t n_ranks = sorted_scores.size();
    auto rank_of = [&](double s) {
        return static_cast<std::size_t>(
            std::lower_bound(sorted_scores.begin(), sorted_scores.end(), s) -
            sorted_scores.begin());
    };

    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return times[a] > times[b]; });

    Fenwick all(n_ranks), evt(n_ranks);
    long long n_all = 0, n_evt = 0;
    double num = 0.0, den = 0.0;

    std::size_t p = 0;
    while (p < order.size()) {
        const double t = times[order[p]];
        std::size_t group_end = p;
        while (group_end < order.size() && times[order[group_end]] == t) ++group_end;

        // query the current group against strictly later times, then insert it
        for (std::size_t q = p; q < group_end; ++q) {
            const std::size_t i = order[q];
            if (!events[i] || times[i] > horizon.t) continue;
            const std::size_t r = rank_of(scores[i]);
            const long long all_less = all.below(r);
            const long long all_leq = all.below(r + 1);
            const long long all_eq = all_leq - all_less;
            if (classic) {
                den += static_cast<double>(n_all);
                num += static_cast<double>(all_less) + 0.5 * static_cast<double>(all_eq);
            } else {
                const long long evt_less = evt.below(r);
                const long long evt_eq = evt.below(r + 1) - evt_less;
                den += static_cast<double>(n_all + n_evt);
                num += static_cast<double>(all_less + evt_less) +
                       0.5 * static_cast<double>(all_eq + evt_eq);
            }
        }
        for (std::size_t q = p; q < group_end; ++q) {
            const std::size_t i = order[q];
            const std::size_t r = rank_of(scores[i]);
            all.add(r);
            ++n_all;
            if (events[i]) {
                evt.add(r);
                ++n_evt;
            }
        }
        p = group_end;
    }

    if (den == 0.0) throw undefined_metric("no comparable pairs for C-index");
    return num / den;
}

double brier_score(std::span<const double> times, std::span<const char> events,
                   std::span<const double> surv_at_t, const KaplanMeier& censor_km,
                   const Horizon& horizon) {
    check_survival_input(times, events);
    if (surv_at_t.size() != times.size()) throw input_error("survival predictions length mismatch");
    const double t = horizon.t;

    double sum = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double s_hat = surv_at_t[i];
        if (!std::isfinite(s_hat) || s_hat < 0.0 || s_hat > 1.0) {
            throw input_error("survival predictions must lie in [0,1]");
        }
        if (times[i] <= t && events[i]) {
            const double g = censor_km.surv_before(times[i]);
            if (g <= 0.0) throw undefined_metric("censoring survival is zero at an event time");
            sum += s_hat * s_hat / g;
        } else if (times[i] > t) {
            const double g = censor_km.surv_at(t);
            if (g <= 0.0) throw undefined_metric("censoring survival is zero at the horizon");
            sum += (s_hat - 1.0) * (s_hat - 1.0) / g;
        }
        // censored at or before t: no contribution
    }
    return sum / static_cast<double>(times.size());
}

std::array<Horizon, 3> percentile_horizons(std::span<const double> train_times) {
    if (train_times.empty()) throw input_error("cannot compute horizons of empty time vector");
    std::vector<double> sorted(train_times.begin(), train_times.end());
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
        const double w = pos - static_cast<double>(lo);
        return sorted[lo] * (1.0 - w) + sorted[hi] * w;
    };
    return {Horizon{quantile(0.25), "p25"}, Horizon{quantile(0.50), "p50"},
            Horizon{quantile(0.75), "p75"}};
}

} // namespace gcph
