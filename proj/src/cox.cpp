#include "gcph/cox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gcph/errors.hpp"

namespace gcph {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log-sum-exp accumulator: value = shift + ln(sum).
struct LogSumExp {
    double shift = kNegInf;
    double sum = 0.0;

    void add(double x, double weight = 1.0) {
        if (x <= shift) {
            sum += weight * std::exp(x - shift);
        } else {
            sum = sum * std::exp(shift - x) + weight;
            shift = x;
        }
    }
    double value() const { return shift + std::log(sum); }
    bool empty() const { return shift == kNegInf; }
};

void check_scores(std::span<const double> scores, const RiskSetIndex& idx) {
    if (scores.size() != idx.n()) {
        throw input_error("score vector length " + std::to_string(scores.size()) +
                          " != subject count " + std::to_string(idx.n()));
    }
    for (double s : scores) {
        if (!std::isfinite(s)) throw input_error("non-finite score");
    }
}

// ln sum_{j in R(t_g)} e^{f_j} for every tie group g, via one descending sweep.
std::vector<double> group_log_denominators(std::span<const double> scores,
                                           const RiskSetIndex& idx) {
    std::vector<double> lse(idx.tie_groups.size());
    LogSumExp acc;
    for (std::size_t g = idx.tie_groups.size(); g-- > 0;) {
        const auto [b, e] = idx.tie_groups[g];
        for (std::size_t p = b; p < e; ++p) acc.add(scores[idx.order[p]]);
        lse[g] = acc.value();
    }
    return lse;
}

std::size_t group_event_count(const RiskSetIndex& idx, std::size_t g) {
    const auto [b, e] = idx.tie_groups[g];
    std::size_t d = 0;
    for (std::size_t p = b; p < e; ++p) d += idx.event[idx.order[p]] ? 1 : 0;
    return d;
}

} // namespace

RiskSetIndex build_risk_index(std::span<const double> times, std::span<const char> events) {
    if (times.empty()) throw input_error("empty survival data");
    if (times.size() != events.size()) throw input_error("times/events length mismatch");
    for (double t : times) {
        if (!std::isfinite(t) || t <= 0.0) throw input_error("times must be finite and positive");
    }

    RiskSetIndex idx;
    idx.time.assign(times.begin(), times.end());
    idx.event.assign(events.begin(), events.end());
    idx.order.resize(times.size());
    std::iota(idx.order.begin(), idx.order.end(), std::size_t{0});
    std::sort(idx.order.begin(), idx.order.end(), [&](std::size_t a, std::size_t b) {
        if (times[a] != times[b]) return times[a] < times[b];
        return a < b;
    });

    std::size_t b = 0;
    while (b < idx.order.size()) {
        std::size_t e = b + 1;
        while (e < idx.order.size() && times[idx.order[e]] == times[idx.order[b]]) ++e;
        idx.tie_groups.emplace_back(b, e);
        b = e;
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i]) idx.event_positions.push_back(i);
    }
    return idx;
}

RiskSetIndex build_risk_index(const std::vector<SurvivalRecord>& records) {
    std::vector<double> times(records.size());
    std::vector<char> events(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        times[i] = records[i].time;
        events[i] = records[i].event ? 1 : 0;
    }
    return build_risk_index(times, events);
}

double log_partial_likelihood(std::span<const double> scores, const RiskSetIndex& idx) {
    check_scores(scores, idx);
    double ll = 0.0;
    LogSumExp acc;
    for (std::size_t g = idx.tie_groups.size(); g-- > 0;) {
        const auto [b, e] = idx.tie_groups[g];
        for (std::size_t p = b; p < e; ++p) acc.add(scores[idx.order[p]]);
        const double lse = acc.value();
        for (std::size_t p = b; p < e; ++p) {
            const std::size_t j = idx.order[p];
            if (idx.event[j]) ll += scores[j] - lse;
        }
    }
    return ll;
}

std::vector<double> log_partial_likelihood_grad(std::span<const double> scores,
                                                const RiskSetIndex& idx) {
    check_scores(scores, idx);
    const auto lse = group_log_denominators(scores, idx);

    // Ascending sweep accumulating ln sum_{event groups g: t_g <= t} d_g / S_g;
    // each subject's multiplier stays <= #events so the exp cannot overflow.
    std::vector<double> grad(scores.size(), 0.0);
    LogSumExp inv_acc;
    for (std::size_t g = 0; g < idx.tie_groups.size(); ++g) {
        const std::size_t d = group_event_count(idx, g);
        if (d > 0) inv_acc.add(-lse[g], static_cast<double>(d));
        const auto [b, e] = idx.tie_groups[g];
        for (std::size_t p = b; p < e; ++p) {
            const std::size_t j = idx.order[p];
            const double cum = inv_acc.empty() ? 0.0 : std::exp(scores[j] + inv_acc.value());
            grad[j] = (idx.event[j] ? 1.0 : 0.0) - cum;
        }
    }
    return grad;
}

BreslowBaseline breslow_baseline(std::span<const double> scores, const RiskSetIndex& idx) {
    check_scores(scores, idx);
    if (idx.event_positions.empty()) {
        throw input_error("baseline hazard undefined: no events observed");
    }
    const auto lse = group_log_denominators(scores, idx);

    BreslowBaseline base;
    double cum = 0.0;
    for (std::size_t g = 0; g < idx.tie_groups.size(); ++g) {
        const std::size_t d = group_event_count(idx, g);
        if (d == 0) continue;
        cum += static_cast<double>(d) * std::exp(-lse[g]);
        base.times.push_back(idx.time[idx.order[idx.tie_groups[g].first]]);
        base.cum_hazard.push_back(cum);
    }
    return base;
}

double predict_survival(double score, const BreslowBaseline& base, double t) {
    if (!(t >= 0.0)) throw input_error("survival prediction requires t >= 0");
    // last event time <= t
    const auto it = std::upper_bound(base.times.begin(), base.times.end(), t);
    if (it == base.times.begin()) return 1.0;
    const double h0 = base.cum_hazard[static_cast<std::size_t>(it - base.times.begin()) - 1];
    return std::exp(-h0 * std::exp(score));
}

namespace {

// Solves A x = b for symmetric positive-definite A (in-place Cholesky).
// Returns false on a non-positive pivot.
bool cholesky_solve(Matrix A, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = A.rows;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(A(i, i)));
    const double tol = 1e-10 * std::max(max_diag, 1.0);

    for (std::size_t j = 0; j < n; ++j) {
        double d = A(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= A(j, k) * A(j, k);
        if (!(d > tol)) return false;
        A(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = A(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= A(i, k) * A(j, k);
            A(i, j) = v / A(j, j);
        }
    }
    // forward then backward substitution
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= A(i, k) * b[k];
        b[i] = v / A(i, i);
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t k = i + 1; k < n; ++k) v -= A(k, i) * x[k];
        x[i] = v / A(i, i);
    }
    return true;
}

struct ScoreAndInfo {
    std::vector<double> grad;
    Matrix info;
};

// Score vector and observed information of the Breslow partial likelihood at
// eta = X beta, via one descending sweep over risk sets (O(n V^2)).
ScoreAndInfo cox_score_info(const Matrix& X, std::span<const double> eta,
                            const RiskSetIndex& idx) {
    const std::size_t V = X.cols;
    ScoreAndInfo out;
    out.grad.assign(V, 0.0);
    out.info = Matrix(V, V);

    double eta_max = kNegInf;
    for (double v : eta) eta_max = std::max(eta_max, v);

    double s0 = 0.0;
    std::vector<double> s1(V, 0.0);
    Matrix s2(V, V);
    for (std::size_t g = idx.tie_groups.size(); g-- > 0;) {
        const auto [b, e] = idx.tie_groups[g];
        for (std::size_t p = b; p < e; ++p) {
            const std::size_t j = idx.order[p];
            const double w = std::exp(eta[j] - eta_max);
            s0 += w;
            const double* xj = X.row(j);
            for (std::size_t a = 0; a < V; ++a) {
                s1[a] += w * xj[a];
                for (std::size_t c = a; c < V; ++c) s2(a, c) += w * xj[a] * xj[c];
            }
        }
        for (std::size_t p = b; p < e; ++p) {
            const std::size_t j = idx.order[p];
            if (!idx.event[j]) continue;
            const double* xj = X.row(j);
            for (std::size_t a = 0; a < V; ++a) {
                const double mean_a = s1[a] / s0;
                out.grad[a] += xj[a] - mean_a;
                for (std::size_t c = a; c < V; ++c) {
                    out.info(a, c) += s2(a, c) / s0 - mean_a * (s1[c] / s0);
                }
            }
        }
    }
    for (std::size_t a = 0; a < V; ++a)
        for (std::size_t c = 0; c < a; ++c) out.info(a, c) = out.info(c, a);
    return out;
}

} // namespace

LinearCphFit fit_linear_cph(const Matrix& X, const RiskSetIndex& idx) {
    if (X.rows != idx.n() || X.rows < 2) throw input_error("need >= 2 records with matching design matrix");
    if (idx.event_positions.empty()) throw input_error("cannot fit: no events observed");

    const std::size_t V = X.cols;
    LinearCphFit fit;
    fit.beta.assign(V, 0.0);

    std::vector<double> eta(X.rows, 0.0);
    auto compute_eta = [&](const std::vector<double>& beta) {
        for (std::size_t i = 0; i < X.rows; ++i) {
            double v = 0.0;
            const double* xi = X.row(i);
            for (std::size_t a = 0; a < V; ++a) v += beta[a] * xi[a];
            eta[i] = v;
        }
    };

    compute_eta(fit.beta);
    double ll = log_partial_likelihood(eta, idx);

    std::vector<double> step;
    for (int it = 1; it <= 100; ++it) {
        fit.iterations = it;
        const auto si = cox_score_info(X, eta, idx);

        double max_score = 0.0;
        for (double gval : si.grad) max_score = std::max(max_score, std::abs(gval));
        if (max_score < 1e-8) {
            fit.converged = true;
            break;
        }

        if (!cholesky_solve(si.info, si.grad, step)) {
            if (it == 1) throw config_error("design matrix is rank deficient (singular information matrix)");
            fit.converged = false;
            break;
        }

        // damped Newton: halve until the likelihood does not decrease
        double lambda = 1.0;
        std::vector<double> candidate(V);
        double new_ll = kNegInf;
        for (int halving = 0; halving <= 30; ++halving) {
            for (std::size_t a = 0; a < V; ++a) candidate[a] = fit.beta[a] + lambda * step[a];
            compute_eta(candidate);
            new_ll = log_partial_likelihood(eta, idx);
            if (new_ll >= ll || halving == 30) break;
            lambda *= 0.5;
        }
        if (!std::isfinite(new_ll) || new_ll < ll) {
            fit.converged = false;
            compute_eta(fit.beta);
            break;
        }
        fit.beta = candidate;
        ll = new_ll;
    }
    fit.log_likelihood = ll;
    return fit;
}

LinearCphFit fit_linear_cph(const std::vector<SurvivalRecord>& records) {
    if (records.size() < 2) throw input_error("need >= 2 records");
    const std::size_t V = records.front().x.size();
    Matrix X(records.size(), V);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].x.size() != V) throw input_error("ragged covariate vectors");
        for (std::size_t a = 0; a < V; ++a) X(i, a) = records[i].x[a];
    }
    return fit_linear_cph(X, build_risk_index(records));
}

} // namespace gcph
