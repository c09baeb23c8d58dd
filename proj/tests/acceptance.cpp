// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria cover the desk-scale synthetic protocol (n=2000 train /
// 500 test, 10 seeds), shape recovery, gradient and oracle equivalence,
// invariant suites, cross-model consistency, and artifact determinism.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gcph/cox.hpp"
#include "gcph/data.hpp"
#include "gcph/errors.hpp"
#include "gcph/evaluate.hpp"
#include "gcph/metrics.hpp"
#include "gcph/model.hpp"
#include "gcph/rng.hpp"
#include "gcph/spline.hpp"
#include "gcph/trainer.hpp"
#include "oracles.hpp"

using namespace gcph;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << id << ": " << detail << "\n";
    if (!ok) ++g_failures;
}

void run_criterion(const std::string& id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

struct SeedRun {
    Dataset train;
    Dataset test;
};

SeedRun make_split(SyntheticKind kind, std::uint64_t seed) {
    SyntheticConfig cfg;
    cfg.kind = kind;
    cfg.n = 2500;
    cfg.seed = 5000 + seed;
    const auto ds = generate_synthetic(cfg);
    auto [train, test] = split(ds, 0.2, seed);
    return {std::move(train), std::move(test)};
}

double horizon_cell(const EvalReport& r, std::size_t h, bool brier = false) {
    const auto& cell = brier ? r.horizons[h].brier : r.horizons[h].c_index;
    if (!cell.value) throw undefined_metric("undefined metric in acceptance run");
    return *cell.value;
}

std::vector<double> linear_scores(const LinearCphFit& fit, const Dataset& ds) {
    std::vector<double> scores(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) {
        double s = 0.0;
        for (std::size_t v = 0; v < ds.num_features(); ++v) {
            s += fit.beta[v] * ds.records[i].x[v];
        }
        scores[i] = s;
    }
    return scores;
}

double mean_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
}

std::string fmt3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

// --- criteria 1 and 2: Table-I style synthetic results -----------------------

constexpr int kSeeds = 10;

struct LinearProtocolResult {
    std::vector<double> gcph_l_p25;
    std::vector<double> gcph_p25;
    GcphModel first_linear_model;
    Dataset first_train;
    double elapsed_sec = 0.0;
};

LinearProtocolResult run_linear_protocol() {
    LinearProtocolResult out;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        const auto run = make_split(SyntheticKind::linear, seed);
        TrainConfig cfg;
        cfg.seed = seed;
        cfg.linear_only = true;
        auto [lin_model, lin_log] = train(run.train, cfg, RegConfig{});
        const auto lin_report = evaluate_model(lin_model, run.train, run.test);
        out.gcph_l_p25.push_back(horizon_cell(lin_report, 0));

        cfg.linear_only = false;
        auto [full_model, full_log] = train(run.train, cfg, RegConfig{});
        const auto full_report = evaluate_model(full_model, run.train, run.test);
        out.gcph_p25.push_back(horizon_cell(full_report, 0));

        if (seed == 1) {
            out.first_linear_model = std::move(lin_model);
            out.first_train = run.train;
        }
    }
    out.elapsed_sec = std::chrono::duration_cast<std::chrono::duration<double>>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    return out;
}

struct NonlinearProtocolResult {
    std::vector<double> cph_c[3];   // per horizon
    std::vector<double> gcph_c[3];
    std::vector<double> cph_brier_p50;
    std::vector<double> gcph_brier_p50;
    GcphModel first_model;
};

NonlinearProtocolResult run_nonlinear_protocol() {
    NonlinearProtocolResult out;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        const auto run = make_split(SyntheticKind::nonlinear, seed);

        const auto fit = fit_linear_cph(run.train.records);
        const auto cph_report = evaluate_scores(run.train, run.test,
                                                linear_scores(fit, run.train),
                                                linear_scores(fit, run.test));
        TrainConfig cfg;
        cfg.seed = seed;
        auto [model, log] = train(run.train, cfg, RegConfig{});
        const auto gcph_report = evaluate_model(model, run.train, run.test);

        for (std::size_t h = 0; h < 3; ++h) {
            out.cph_c[h].push_back(horizon_cell(cph_report, h));
            out.gcph_c[h].push_back(horizon_cell(gcph_report, h));
        }
        out.cph_brier_p50.push_back(horizon_cell(cph_report, 1, true));
        out.gcph_brier_p50.push_back(horizon_cell(gcph_report, 1, true));
        if (seed == 1) out.first_model = std::move(model);
    }
    return out;
}

// --- criterion 8 helpers ------------------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GCPH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw input_error("missing artifact " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main() {
    std::cout << "acceptance: desk-scale protocol, " << kSeeds << " seeds\n";

    LinearProtocolResult linear_result;
    run_criterion("criterion 1", [&] {
        linear_result = run_linear_protocol();
        const double mean_l = mean_of(linear_result.gcph_l_p25);
        const double mean_full = mean_of(linear_result.gcph_p25);
        const bool band_ok = mean_l >= 0.766 && mean_l <= 0.826;
        const bool close_ok = std::abs(mean_full - mean_l) <= 0.02;
        const bool time_ok = linear_result.elapsed_sec <= 300.0;
        report("criterion 1 (linear C-index band)", band_ok,
               "GCPH-l mean p25 C-index " + fmt3(mean_l) + " in [0.766, 0.826]");
        report("criterion 1 (GCPH tracks GCPH-l)", close_ok,
               "GCPH " + fmt3(mean_full) + " vs GCPH-l " + fmt3(mean_l) + ", gap " +
                   fmt3(std::abs(mean_full - mean_l)) + " <= 0.02");
        report("criterion 1 (runtime)", time_ok,
               fmt3(linear_result.elapsed_sec) + "s <= 300s");
    });

    NonlinearProtocolResult nl;
    run_criterion("criterion 2", [&] {
        nl = run_nonlinear_protocol();
        bool cph_chance = true;
        for (std::size_t h = 0; h < 3; ++h) {
            const double m = mean_of(nl.cph_c[h]);
            cph_chance &= m >= 0.45 && m <= 0.55;
        }
        const double gcph_p25 = mean_of(nl.gcph_c[0]);
        const double cph_p25 = mean_of(nl.cph_c[0]);
        const double gcph_b50 = mean_of(nl.gcph_brier_p50);
        const double cph_b50 = mean_of(nl.cph_brier_p50);
        report("criterion 2 (CPH at chance)", cph_chance,
               "CPH mean C-index p25/p50/p75 = " + fmt3(mean_of(nl.cph_c[0])) + "/" +
                   fmt3(mean_of(nl.cph_c[1])) + "/" + fmt3(mean_of(nl.cph_c[2])) +
                   " all in [0.45, 0.55]");
        report("criterion 2 (GCPH discriminates)",
               gcph_p25 >= 0.59 && gcph_p25 - cph_p25 >= 0.08,
               "GCPH mean p25 C-index " + fmt3(gcph_p25) + " >= 0.59 and beats CPH (" +
                   fmt3(cph_p25) + ") by " + fmt3(gcph_p25 - cph_p25) + " >= 0.08");
        report("criterion 2 (Brier gap)", gcph_b50 <= cph_b50 - 0.01,
               "GCPH p50 Brier " + fmt3(gcph_b50) + " <= CPH " + fmt3(cph_b50) + " - 0.01");
    });

    run_criterion("criterion 3", [&] {
        // Gaussian bump recovery on the first nonlinear model
        const auto& m = nl.first_model;
        if (m.activations.empty()) throw input_error("criterion 2 must run first");
        bool shapes_ok = true;
        std::string detail;
        for (std::size_t v = 0; v < 2; ++v) {
            const auto& grid = m.activations[v].grid;
            std::vector<double> xs(201), truth(201);
            for (std::size_t i = 0; i < xs.size(); ++i) {
                xs[i] = grid.lo + (grid.hi - grid.lo) * static_cast<double>(i) / 200.0;
                const double raw =
                    xs[i] * m.standardization[v].sd + m.standardization[v].mean;
                truth[i] = std::log(5.0) * std::exp(-raw * raw / 8.0);
            }
            const auto curve = per_feature_curve(m, v, xs);
            const double corr = oracles::pearson(curve, truth);
            shapes_ok &= corr >= 0.9;
            detail += (v == 0 ? "corr(x1)=" : " corr(x2)=") + fmt3(corr);
        }
        report("criterion 3 (bump shape)", shapes_ok, detail + " >= 0.9");

        const auto& lm = linear_result.first_linear_model;
        if (lm.activations.empty()) throw input_error("criterion 1 must run first");
        const double w1 = lm.activations[0].omega_b / lm.standardization[0].sd;
        const double w2 = lm.activations[1].omega_b / lm.standardization[1].sd;
        const double ratio = w2 / w1;
        report("criterion 3 (slope ratio)", ratio >= 1.8 && ratio <= 2.2,
               "GCPH-l raw slope ratio " + fmt3(ratio) + " in [1.8, 2.2]");
    });

    run_criterion("criterion 4", [&] {
        Rng rng(804);
        const RegConfig reg{1.0, 10.0, 0.1};
        bool loss_ok = true;
        int checked = 0;
        while (checked < 20) {
            GcphModel m;
            const std::size_t V = 1 + rng.below(3);
            for (std::size_t v = 0; v < V; ++v) {
                Activation a;
                a.grid = KnotGrid{-1.2, 1.2, 5, 3};
                a.omega_b = rng.uniform(-1.5, 1.5);
                a.omega_s = rng.uniform(-1.5, 1.5);
                a.coeffs.resize(a.grid.basis_count());
                for (auto& c : a.coeffs) c = rng.uniform(-1.0, 1.0);
                m.activations.push_back(std::move(a));
                m.feature_names.push_back("x" + std::to_string(v + 1));
                m.standardization.push_back({0.0, 1.0});
            }
            const std::size_t n = 12 + rng.below(20);
            Matrix X(n, V);
            for (auto& x : X.data) x = rng.uniform(-1.0, 1.0);
            std::vector<double> times(n);
            std::vector<char> events(n);
            for (std::size_t i = 0; i < n; ++i) {
                times[i] = rng.uniform(0.2, 6.0);
                events[i] = rng.uniform01() < 0.8 ? 1 : 0;
            }
            events[0] = 1;
            const auto idx = build_risk_index(times, events);

            const auto be = eval_batch_full(m, X);
            bool near_kink = false;
            for (double v : be.phi.data) near_kink |= std::abs(v) < 1e-6;
            if (near_kink) continue;
            ++checked;

            const auto grad = total_loss_grad(m, X, idx, reg);
            auto theta = flatten_params(m);
            for (std::size_t p = 0; p < theta.size(); ++p) {
                const double fd = oracles::central_diff(
                    [&] {
                        unflatten_params(m, theta);
                        return total_loss(m, X, idx, reg).total;
                    },
                    theta[p]);
                loss_ok &= oracles::close_rel(grad[p], fd, 1e-3);
            }
        }
        report("criterion 4 (total-loss gradient)", loss_ok,
               "20 seeded instances within 1e-3 of finite differences");

        bool ll_ok = true;
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 2 + rng.below(30);
            std::vector<double> times(n), scores(n);
            std::vector<char> events(n);
            for (std::size_t i = 0; i < n; ++i) {
                times[i] = rng.uniform(0.1, 5.0);
                events[i] = rng.uniform01() < 0.75 ? 1 : 0;
                scores[i] = rng.uniform(-2.0, 2.0);
            }
            events[0] = 1;
            const auto idx = build_risk_index(times, events);
            const auto g = log_partial_likelihood_grad(scores, idx);
            for (std::size_t j = 0; j < n; ++j) {
                const double fd = oracles::central_diff(
                    [&] { return log_partial_likelihood(scores, idx); }, scores[j]);
                ll_ok &= oracles::close_rel(g[j], fd, 1e-5);
            }
        }
        report("criterion 4 (likelihood gradient)", ll_ok,
               "50 instances within 1e-5 of finite differences");
    });

    run_criterion("criterion 5", [&] {
        Rng rng(905);
        bool ll_ok = true;
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 2 + rng.below(49);
            std::vector<double> times(n), scores(n);
            std::vector<char> events(n);
            for (std::size_t i = 0; i < n; ++i) {
                times[i] = rng.uniform01() < 0.2 && i > 0 ? times[rng.below(i)]
                                                          : rng.uniform(0.1, 9.0);
                events[i] = rng.uniform01() < 0.7 ? 1 : 0;
                scores[i] = rng.uniform(-2.0, 2.0);
            }
            events[0] = 1;
            const auto idx = build_risk_index(times, events);
            const double fast = log_partial_likelihood(scores, idx);
            const double slow =
                oracles::log_partial_likelihood_naive(scores, times, events);
            ll_ok &= std::abs(fast - slow) < 1e-12;
        }
        report("criterion 5 (likelihood oracle)", ll_ok,
               "100 instances (n <= 50) within 1e-12 of the double loop");

        bool ci_ok = true;
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 2 + rng.below(499);
            std::vector<double> times(n), scores(n);
            std::vector<char> events(n);
            for (std::size_t i = 0; i < n; ++i) {
                times[i] = rng.uniform01() < 0.15 && i > 0 ? times[rng.below(i)]
                                                           : rng.uniform(0.1, 10.0);
                events[i] = rng.uniform01() < 0.7 ? 1 : 0;
                scores[i] = std::floor(rng.uniform(-3.0, 3.0) * 4.0) / 4.0;
            }
            events[0] = 1;
            const double horizon = trial % 3 == 0
                                       ? rng.uniform(0.5, 9.0)
                                       : std::numeric_limits<double>::infinity();
            double slow = 0.0;
            try {
                slow = oracles::c_index_bruteforce(times, events, scores, horizon);
            } catch (...) {
                continue;
            }
            ci_ok &= c_index(times, events, scores, Horizon{horizon, "h"}) == slow;
        }
        report("criterion 5 (C-index oracle)", ci_ok,
               "100 instances (n <= 500) match pair enumeration exactly");

        bool bs_ok = true;
        for (int trial = 0; trial < 200; ++trial) {
            KnotGrid g;
            g.lo = rng.uniform(-2.0, 0.0);
            g.hi = g.lo + rng.uniform(0.5, 3.0);
            g.num_intervals = 1 + static_cast<int>(rng.below(8));
            g.order = 1 + static_cast<int>(rng.below(5));
            const double x = rng.uniform(g.lo - 0.5, g.hi + 0.5);
            const auto fast = bspline_basis(x, g);
            const auto slow = oracles::bspline_basis_bruteforce(x, g);
            for (std::size_t j = 0; j < fast.size(); ++j) {
                bs_ok &= std::abs(fast[j] - slow[j]) < 1e-12;
            }
        }
        report("criterion 5 (B-spline oracle)", bs_ok,
               "200 random grids match brute-force Cox-de Boor within 1e-12");
    });

    run_criterion("criterion 6", [&] {
        bool pou_ok = true;
        for (int G = 1; G <= 8 && pou_ok; ++G) {
            for (int K = 1; K <= 5 && pou_ok; ++K) {
                KnotGrid g{-1.0, 1.0, G, K};
                for (int i = 0; i < 1000; ++i) {
                    const double x = -1.0 + 2.0 * i / 999.0;
                    double sum = 0.0;
                    for (double v : bspline_basis(x, g)) sum += v;
                    pou_ok &= std::abs(sum - 1.0) < 1e-10;
                }
            }
        }
        report("criterion 6 (partition of unity)", pou_ok, "|sum - 1| < 1e-10 over (G,K) grid");

        Rng rng(606);
        bool shift_ok = true, zero_sum_ok = true;
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 3 + rng.below(40);
            std::vector<double> times(n), scores(n);
            std::vector<char> events(n);
            for (std::size_t i = 0; i < n; ++i) {
                times[i] = rng.uniform(0.1, 5.0);
                events[i] = rng.uniform01() < 0.7 ? 1 : 0;
                scores[i] = rng.uniform(-2.0, 2.0);
            }
            events[0] = 1;
            const auto idx = build_risk_index(times, events);
            const double base = log_partial_likelihood(scores, idx);
            auto shifted = scores;
            const double c = rng.uniform(-30.0, 30.0);
            for (auto& s : shifted) s += c;
            shift_ok &= std::abs(log_partial_likelihood(shifted, idx) - base) < 1e-9;
            double sum = 0.0;
            for (double v : log_partial_likelihood_grad(scores, idx)) sum += v;
            zero_sum_ok &= std::abs(sum) < 1e-10;
        }
        report("criterion 6 (translation invariance)", shift_ok, "|ll(f+c) - ll(f)| < 1e-9");
        report("criterion 6 (gradient zero sum)", zero_sum_ok, "|sum grad| < 1e-10");

        // Breslow monotonicity and survival bounds on a trained-scale example
        const auto run = make_split(SyntheticKind::linear, 3);
        const auto fit = fit_linear_cph(run.train.records);
        const auto idx = build_risk_index(run.train.records);
        const auto base = breslow_baseline(linear_scores(fit, run.train), idx);
        bool breslow_ok = true;
        for (std::size_t i = 1; i < base.cum_hazard.size(); ++i) {
            breslow_ok &= base.cum_hazard[i] >= base.cum_hazard[i - 1];
        }
        bool surv_ok = true;
        double prev = 1.0;
        for (double t = 0.0; t < base.times.back() * 1.2; t += base.times.back() / 50.0) {
            const double s = predict_survival(0.4, base, t);
            surv_ok &= s >= 0.0 && s <= 1.0 && s <= prev + 1e-15;
            prev = s;
        }
        report("criterion 6 (Breslow monotone)", breslow_ok, "cumulative hazard non-decreasing");
        report("criterion 6 (survival bounds)", surv_ok, "S(t) in [0,1], non-increasing");

        std::vector<double> times(1000), scores(1000);
        std::vector<char> events(1000);
        Rng rng2(607);
        for (std::size_t i = 0; i < 1000; ++i) {
            times[i] = rng2.uniform(0.1, 10.0);
            events[i] = rng2.uniform01() < 0.8 ? 1 : 0;
            scores[i] = rng2.uniform(-1.0, 1.0);
        }
        const double c = c_index(times, events, scores,
                                 Horizon{std::numeric_limits<double>::infinity(), "all"});
        report("criterion 6 (random C-index)", c >= 0.45 && c <= 0.55,
               "random scores give " + fmt3(c) + " in [0.45, 0.55]");

        SyntheticConfig cfg;
        cfg.kind = SyntheticKind::linear;
        cfg.n = 10000;
        cfg.seed = 11;
        const auto ds = generate_synthetic(cfg);
        std::size_t censored = 0;
        for (const auto& rec : ds.records) censored += rec.event ? 0 : 1;
        const double rate = static_cast<double>(censored) / 10000.0;
        report("criterion 6 (censor rate)", std::abs(rate - 0.10) <= 0.001,
               "generator censor rate " + fmt3(rate) + " = 0.10 +- 0.001");
    });

    run_criterion("criterion 7", [&] {
        const auto& lm = linear_result.first_linear_model;
        if (lm.activations.empty()) throw input_error("criterion 1 must run first");
        const auto fit = fit_linear_cph(linear_result.first_train.records);
        bool ok = fit.converged;
        std::string detail = "per-component |beta - slope|:";
        for (std::size_t v = 0; v < 2; ++v) {
            const double diff = std::abs(fit.beta[v] - lm.activations[v].omega_b);
            ok &= diff <= 0.05;
            detail += " " + fmt3(diff);
        }
        report("criterion 7 (Newton vs Adam linear fit)", ok, detail + " <= 0.05");
    });

    run_criterion("criterion 8", [&] {
        const fs::path dir = fs::temp_directory_path() / "gcph_acceptance_cli";
        fs::remove_all(dir);
        fs::create_directories(dir);
        const std::string out = dir.string();

        bool ok = true;
        ok &= run_cli("simulate --kind linear --n 300 --seed 5 --out " + out +
                      " --name data") == 0;
        const std::string csv1 = slurp(dir / "data.csv");
        ok &= run_cli("simulate --kind linear --n 300 --seed 5 --out " + out +
                      " --name data") == 0;
        ok &= slurp(dir / "data.csv") == csv1;

        const std::string train_cmd = "train --data " + (dir / "data.csv").string() +
                                      " --steps 120 --seed 4 --out " + out;
        ok &= run_cli(train_cmd) == 0;
        const std::string model1 = slurp(dir / "model.json");
        ok &= run_cli(train_cmd) == 0;
        ok &= slurp(dir / "model.json") == model1;

        const std::string eval_cmd = "eval --model " + (dir / "model.json").string() +
                                     " --train " + (dir / "data.csv").string() + " --test " +
                                     (dir / "data.csv").string() + " --out " + out;
        ok &= run_cli(eval_cmd) == 0;
        const std::string metrics1 = slurp(dir / "metrics.json");
        ok &= run_cli(eval_cmd) == 0;
        ok &= slurp(dir / "metrics.json") == metrics1;

        const std::string sweep_cmd = "sweep --data " + (dir / "data.csv").string() +
                                      " --axis gamma --values 0,0.1 --seeds 1 --steps 40 "
                                      "--out " +
                                      out;
        ok &= run_cli(sweep_cmd) == 0;
        const std::string sweep1 = slurp(dir / "sweep.csv");
        ok &= run_cli(sweep_cmd) == 0;
        ok &= slurp(dir / "sweep.csv") == sweep1;

        fs::remove_all(dir);
        report("criterion 8 (artifact determinism)", ok,
               "simulate/train/eval/sweep artifacts byte-identical across reruns");
    });

    std::cout << (g_failures == 0 ? "acceptance: ALL CRITERIA PASS\n"
                                  : "acceptance: FAILURES PRESENT\n");
    return g_failures == 0 ? 0 : 1;
}
