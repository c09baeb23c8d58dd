#include "gcph/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gcph/cox.hpp"
#include "gcph/errors.hpp"
#include "gcph/rng.hpp"
#include "gcph/util.hpp"

namespace gcph {

std::string TrainLog::to_csv() const {
    std::string out = "step,nll,l1,entropy,total\n";
    for (const auto& e : entries) {
        out += std::to_string(e.step);
        out += ',';
        out += fmt_double(e.nll);
        out += ',';
        out += fmt_double(e.l1);
        out += ',';
        out += fmt_double(e.entropy);
        out += ',';
        out += fmt_double(e.total);
        out += '\n';
    }
    return out;
}

std::vector<double> l1_norm_per_activation(const GcphModel& m, const Matrix& X) {
    if (X.rows == 0) throw input_error("L1 norm needs a nonempty batch");
    if (X.cols != m.num_features()) throw input_error("matrix column count != feature count");
    std::vector<double> out(m.num_features(), 0.0);
    for (std::size_t i = 0; i < X.rows; ++i) {
        for (std::size_t v = 0; v < m.num_features(); ++v) {
            out[v] += std::abs(activation_eval(m.activations[v], X(i, v)));
        }
    }
    for (auto& v : out) v /= static_cast<double>(X.rows);
    return out;
}

double entropy_loss(std::span<const double> l1s) {
    double total = 0.0;
    for (double v : l1s) {
        if (v < 0.0) throw input_error("L1 norms must be non-negative");
        total += v;
    }
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double v : l1s) {
        if (v <= 0.0) continue;
        const double p = v / total;
        h -= p * std::log(p);
    }
    return h;
}

namespace {

struct LossAndGrad {
    LossParts parts;
    std::vector<double> grad;
};

LossAndGrad loss_and_grad(const GcphModel& m, const Matrix& X, const RiskSetIndex& idx,
                          const RegConfig& reg, bool want_grad) {
    const auto be = eval_batch_full(m, X);
    const std::size_t n = X.rows;
    const std::size_t V = m.num_features();
    const std::size_t P = param_count(m);

    LossAndGrad out;
    out.parts.nll = -log_partial_likelihood(be.scores, idx);

    std::vector<double> l1s(V, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t v = 0; v < V; ++v) l1s[v] += std::abs(be.phi(i, v));
    }
    for (auto& v : l1s) v /= static_cast<double>(n);
    double l1_total = 0.0;
    for (double v : l1s) l1_total += v;
    const double h = entropy_loss(l1s);

    out.parts.l1 = l1_total;
    out.parts.entropy = h;
    out.parts.total = out.parts.nll + reg.gamma * (reg.mu1 * l1_total + reg.mu2 * h);
    if (!want_grad) return out;

    // d(-ll)/dtheta = -J^T g
    const auto g = log_partial_likelihood_grad(be.scores, idx);
    out.grad.assign(P, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = g[i];
        const double* row = be.jac.row(i);
        for (std::size_t p = 0; p < P; ++p) out.grad[p] -= gi * row[p];
    }

    // dH/dl1_v = -(ln p_v + H) / l1_total; zero-measure activations contribute 0
    std::vector<double> reg_factor(V, 0.0);
    for (std::size_t v = 0; v < V; ++v) {
        double dh = 0.0;
        if (l1_total > 1e-12 && l1s[v] > 1e-12) {
            dh = -(std::log(l1s[v] / l1_total) + h) / l1_total;
        }
        reg_factor[v] = reg.gamma * (reg.mu1 + reg.mu2 * dh);
    }

    std::size_t offset = 0;
    for (std::size_t v = 0; v < V; ++v) {
        const std::size_t block = 2 + m.activations[v].coeffs.size();
        const double scale = reg_factor[v] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = be.phi(i, v) > 0.0 ? 1.0 : (be.phi(i, v) < 0.0 ? -1.0 : 0.0);
            if (s == 0.0) continue;
            const double* row = be.jac.row(i);
            for (std::size_t p = offset; p < offset + block; ++p) {
                out.grad[p] += scale * s * row[p];
            }
        }
        offset += block;
    }
    return out;
}

} // namespace

LossParts total_loss(const GcphModel& m, const Matrix& X, const RiskSetIndex& idx,
                     const RegConfig& reg) {
    return loss_and_grad(m, X, idx, reg, false).parts;
}

std::vector<double> total_loss_grad(const GcphModel& m, const Matrix& X,
                                    const RiskSetIndex& idx, const RegConfig& reg) {
    return loss_and_grad(m, X, idx, reg, true).grad;
}

std::vector<KnotGrid> build_grids(const Dataset& ds, int num_intervals, int order) {
    if (num_intervals < 1 || order < 1) {
        throw config_error("grid needs num_intervals >= 1 and order >= 1");
    }
    std::vector<KnotGrid> grids;
    for (std::size_t v = 0; v < ds.num_features(); ++v) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& rec : ds.records) {
            lo = std::min(lo, rec.x[v]);
            hi = std::max(hi, rec.x[v]);
        }
        KnotGrid g;
        g.num_intervals = num_intervals;
        g.order = order;
        if (lo == hi) {
            g.lo = lo - 0.5;
            g.hi = hi + 0.5;
        } else {
            const double pad = 0.01 * (hi - lo);
            g.lo = lo - pad;
            g.hi = hi + pad;
        }
        grids.push_back(g);
    }
    return grids;
}

namespace {

void check_train_config(const TrainConfig& cfg) {
    if (cfg.max_steps < 1) throw config_error("max_steps must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw config_error("learning_rate must be positive");
    if (!(cfg.init_coeff_sd >= 0.0)) throw config_error("init_coeff_sd must be >= 0");
}

GcphModel initial_model(const Dataset& ds, const TrainConfig& cfg) {
    GcphModel m;
    m.feature_names = ds.feature_names;
    m.standardization = ds.stats;
    m.centering_offset = 0.0;
    const auto grids = build_grids(ds, cfg.num_intervals, cfg.order);
    for (std::size_t v = 0; v < ds.num_features(); ++v) {
        Activation a;
        a.grid = grids[v];
        a.coeffs.assign(a.grid.basis_count(), 0.0);
        if (cfg.linear_only) {
            a.basis = BasisKind::identity;
            a.omega_b = 1.0;
            a.omega_s = 0.0;
        } else {
            a.basis = BasisKind::silu;
            a.omega_b = 1.0;
            a.omega_s = 1.0;
            Rng stream = make_stream(cfg.seed, 1000 + v);
            for (auto& c : a.coeffs) c = cfg.init_coeff_sd * stream.normal();
        }
        m.activations.push_back(std::move(a));
    }
    return m;
}

// omega_b is the only trainable parameter per activation in linear mode.
std::vector<char> trainable_mask(const GcphModel& m) {
    std::vector<char> mask;
    for (const auto& a : m.activations) {
        const bool linear = a.basis == BasisKind::identity;
        mask.push_back(1);
        mask.push_back(linear ? 0 : 1);
        for (std::size_t k = 0; k < a.coeffs.size(); ++k) mask.push_back(linear ? 0 : 1);
    }
    return mask;
}

} // namespace

std::pair<GcphModel, TrainLog> train(const Dataset& ds, const TrainConfig& cfg,
                                     const RegConfig& reg) {
    check_train_config(cfg);
    if (ds.n() < 2) throw input_error("training needs at least 2 records");

    GcphModel m = initial_model(ds, cfg);
    const Matrix X = ds.covariates();
    const RiskSetIndex idx = build_risk_index(ds.records);
    if (idx.event_positions.empty()) throw input_error("cannot train: no events observed");
    const auto mask = trainable_mask(m);

    std::vector<double> theta = flatten_params(m);
    const std::size_t P = theta.size();
    std::vector<double> m1(P, 0.0), m2(P, 0.0);
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    TrainLog log;
    std::vector<double> best_theta = theta;
    double best_loss = std::numeric_limits<double>::infinity();

    for (int step = 0; step <= cfg.max_steps; ++step) {
        unflatten_params(m, theta);
        const bool last = step == cfg.max_steps;
        const auto lg = loss_and_grad(m, X, idx, reg, !last);
        if (!std::isfinite(lg.parts.total)) {
            throw numeric_error("non-finite training loss at step " + std::to_string(step) +
                                " (nll=" + fmt_double(lg.parts.nll) + ")");
        }
        log.entries.push_back({step, lg.parts.nll, lg.parts.l1, lg.parts.entropy,
                               lg.parts.total});
        if (lg.parts.total < best_loss) {
            best_loss = lg.parts.total;
            best_theta = theta;
            log.best_step = step;
        }
        if (last) break;

        const double t = static_cast<double>(step + 1);
        const double bc1 = 1.0 - std::pow(beta1, t);
        const double bc2 = 1.0 - std::pow(beta2, t);
        for (std::size_t p = 0; p < P; ++p) {
            if (!mask[p]) continue;
            const double gp = lg.grad[p];
            m1[p] = beta1 * m1[p] + (1.0 - beta1) * gp;
            m2[p] = beta2 * m2[p] + (1.0 - beta2) * gp * gp;
            theta[p] -= cfg.learning_rate * (m1[p] / bc1) / (std::sqrt(m2[p] / bc2) + eps);
        }
    }
    log.best_loss = best_loss;

    unflatten_params(m, best_theta);
    const auto scores = log_risk_batch(m, X);
    double mean_score = 0.0;
    for (double s : scores) mean_score += s;
    m.centering_offset = mean_score / static_cast<double>(scores.size());
    return {std::move(m), std::move(log)};
}

std::vector<std::pair<GcphModel, TrainLog>> train_multi_seed(
    const Dataset& ds, const TrainConfig& cfg, const RegConfig& reg,
    std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw input_error("seed list must be nonempty");
    std::vector<std::pair<GcphModel, TrainLog>> out;
    out.reserve(seeds.size());
    for (const auto s : seeds) {
        TrainConfig c = cfg;
        c.seed = s;
        out.push_back(train(ds, c, reg));
    }
    return out;
}

} // namespace gcph
