#include "gcph/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"

#include "gcph/errors.hpp"

namespace gcph {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool always(double) { return true; }
bool positive(double v) { return v > 0.0; }
bool non_negative(double v) { return v >= 0.0; }

double id_fn(double v) { return v; }
double pow2_fn(double v) { return v * v; }
double pow3_fn(double v) { return v * v * v; }
double pow4_fn(double v) { return (v * v) * (v * v); }
double sqrt_fn(double v) { return std::sqrt(v); }

} // namespace

const std::vector<CandidateFn>& candidate_library() {
    static const std::vector<CandidateFn> lib = {
        {"x", id_fn, always},
        {"pow2", pow2_fn, always},
        {"pow3", pow3_fn, always},
        {"pow4", pow4_fn, always},
        {"exp", [](double v) { return std::exp(v); }, always},
        {"ln", [](double v) { return std::log(v); }, positive},
        {"sqrt", sqrt_fn, non_negative},
        {"tanh", [](double v) { return std::tanh(v); }, always},
        {"sin", [](double v) { return std::sin(v); }, always},
    };
    return lib;
}

namespace {

struct FitPoint {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
    double sse = std::numeric_limits<double>::infinity();
    bool feasible = false;
};

// Least-squares (a3, a4) for fixed (a1, a2); infeasible when any transformed
// point leaves the candidate's domain or overflows.
FitPoint solve_scale(const CandidateFn& c, double a1, double a2,
                     std::span<const double> xs, std::span<const double> ys) {
    FitPoint p;
    p.a1 = a1;
    p.a2 = a2;
    const std::size_t n = xs.size();
    double sum_z = 0.0;
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double arg = a1 * xs[i] + a2;
        if (!c.in_domain(arg)) return p;
        z[i] = c.eval(arg);
        if (!std::isfinite(z[i])) return p;
        sum_z += z[i];
    }
    const double mean_z = sum_z / static_cast<double>(n);
    double mean_y = 0.0;
    for (double y : ys) mean_y += y;
    mean_y /= static_cast<double>(n);

    double var_z = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        var_z += (z[i] - mean_z) * (z[i] - mean_z);
        cov += (z[i] - mean_z) * (ys[i] - mean_y);
    }
    p.a3 = var_z > 1e-300 ? cov / var_z : 0.0;
    p.a4 = mean_y - p.a3 * mean_z;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (p.a3 * z[i] + p.a4);
        sse += r * r;
    }
    if (!std::isfinite(sse)) return p;
    p.sse = sse;
    p.feasible = true;
    return p;
}

} // namespace

AffineFit affine_fit(const CandidateFn& candidate, std::span<const double> xs,
                     std::span<const double> ys) {
    if (xs.size() != ys.size()) throw input_error("affine_fit: xs/ys length mismatch");
    if (xs.size() < 8) throw input_error("affine_fit needs at least 8 samples");
    const auto [x_min_it, x_max_it] = std::minmax_element(xs.begin(), xs.end());
    if (*x_min_it == *x_max_it) throw input_error("affine_fit: xs are all equal");

    // 101 slopes: 0 and +-10^u, u uniform on [-2, 1]
    std::vector<double> a1_grid;
    a1_grid.push_back(0.0);
    for (int i = 0; i < 50; ++i) {
        const double mag = std::pow(10.0, -2.0 + 3.0 * i / 49.0);
        a1_grid.push_back(mag);
        a1_grid.push_back(-mag);
    }

    FitPoint best;
    double a2_span = 1.0;
    for (const double a1 : a1_grid) {
        double lo = a1 * *x_min_it, hi = a1 * *x_max_it;
        if (lo > hi) std::swap(lo, hi);
        const double w = std::max({2.0 * 3.14159265358979323846, hi - lo, 1.0});
        const double a2_lo = -hi - w, a2_hi = -lo + w;
        for (int j = 0; j < 101; ++j) {
            const double a2 = a2_lo + (a2_hi - a2_lo) * j / 100.0;
            const auto p = solve_scale(candidate, a1, a2, xs, ys);
            if (p.feasible && p.sse < best.sse) {
                best = p;
                a2_span = (a2_hi - a2_lo) / 100.0;
            }
        }
    }

    AffineFit fit;
    if (!best.feasible) {
        fit.r2 = kNegInf;
        return fit;
    }

    // coordinate descent with shrinking steps around the best grid point
    double h1 = std::max(std::abs(best.a1) * 0.15, 0.005);
    double h2 = a2_span;
    for (int iter = 0; iter < 200; ++iter) {
        FitPoint trial = best;
        const double moves[4][2] = {{best.a1 + h1, best.a2},
                                    {best.a1 - h1, best.a2},
                                    {best.a1, best.a2 + h2},
                                    {best.a1, best.a2 - h2}};
        for (const auto& mv : moves) {
            const auto p = solve_scale(candidate, mv[0], mv[1], xs, ys);
            if (p.feasible && p.sse < trial.sse) trial = p;
        }
        if (trial.sse < best.sse) {
            best = trial;
        } else {
            h1 *= 0.5;
            h2 *= 0.5;
        }
    }

    double sst = 0.0, mean_y = 0.0;
    for (double y : ys) mean_y += y;
    mean_y /= static_cast<double>(ys.size());
    for (double y : ys) sst += (y - mean_y) * (y - mean_y);

    fit.alpha = {best.a1, best.a2, best.a3, best.a4};
    if (sst < 1e-12) {
        fit.r2 = best.sse < 1e-12 ? 1.0 : 0.0;
    } else {
        fit.r2 = 1.0 - best.sse / sst;
    }
    return fit;
}

SymbolicModel symbolify(const GcphModel& m, std::size_t n_points) {
    validate_model(m);
    const std::size_t V = m.num_features();
    const auto& lib = candidate_library();

    SymbolicModel sm;
    const std::vector<double> zeros(V, 0.0);
    const double f_at_zero = log_risk(m, zeros);
    double constant = -(static_cast<double>(V) - 1.0) * f_at_zero;

    for (std::size_t v = 0; v < V; ++v) {
        const auto& grid = m.activations[v].grid;
        std::vector<double> xs(n_points);
        for (std::size_t i = 0; i < n_points; ++i) {
            xs[i] = grid.lo + (grid.hi - grid.lo) * static_cast<double>(i) /
                                  static_cast<double>(n_points - 1);
        }
        const auto ys = per_feature_curve(m, v, xs);

        SymbolicTerm best;
        best.feature = v;
        best.r2 = kNegInf;
        for (const auto& c : lib) {
            const auto fit = affine_fit(c, xs, ys);
            if (fit.r2 > best.r2) {
                best.candidate = c.name;
                best.alpha = fit.alpha;
                best.r2 = fit.r2;
            }
        }

        const auto cand = std::find_if(lib.begin(), lib.end(), [&](const CandidateFn& c) {
            return c.name == best.candidate;
        });
        double t_min = std::numeric_limits<double>::infinity(), t_max = -t_min;
        double t_sum = 0.0;
        for (double x : xs) {
            const double t = best.alpha[2] * cand->eval(best.alpha[0] * x + best.alpha[1]) +
                             best.alpha[3];
            t_min = std::min(t_min, t);
            t_max = std::max(t_max, t);
            t_sum += t;
        }
        if (t_max - t_min < 0.05) {
            sm.dropped.push_back(v);
            constant += t_sum / static_cast<double>(n_points);
        } else {
            constant += best.alpha[3];
            sm.terms.push_back(std::move(best));
        }
    }
    sm.constant = constant;
    return sm;
}

double symbolic_eval(const SymbolicModel& sm, std::span<const double> x) {
    const auto& lib = candidate_library();
    double f = sm.constant;
    for (const auto& term : sm.terms) {
        const auto cand = std::find_if(lib.begin(), lib.end(), [&](const CandidateFn& c) {
            return c.name == term.candidate;
        });
        if (cand == lib.end()) throw input_error("unknown candidate '" + term.candidate + "'");
        f += term.alpha[2] * cand->eval(term.alpha[0] * x[term.feature] + term.alpha[1]);
    }
    return f;
}

namespace {

double round_to(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(v * scale) / scale;
}

std::string fixed(double v, int decimals) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    // avoid the "-0.00" artifact
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s = s.substr(1);
    return s;
}

} // namespace

std::string render_formula(const SymbolicModel& sm, int decimals) {
    struct Piece {
        double lead; // coefficient deciding the joining sign
        std::string body;
    };
    std::vector<Piece> pieces;
    double constant = sm.constant;

    for (const auto& term : sm.terms) {
        const std::string var = "x" + std::to_string(term.feature + 1);
        if (term.candidate == "x") {
            // a3*(a1 x + a2) + a4 collapses to slope*x with the rest in the constant
            const double slope = term.alpha[2] * term.alpha[0];
            constant += term.alpha[2] * term.alpha[1];
            pieces.push_back({round_to(slope, decimals),
                              fixed(std::abs(round_to(slope, decimals)), decimals) + "*" + var});
        } else {
            const double a1 = round_to(term.alpha[0], decimals);
            const double a2 = round_to(term.alpha[1], decimals);
            const double a3 = round_to(term.alpha[2], decimals);
            std::string inner = fixed(a1, decimals) + "*" + var;
            if (a2 != 0.0) {
                inner += a2 > 0.0 ? " + " : " - ";
                inner += fixed(std::abs(a2), decimals);
            }
            pieces.push_back({a3, fixed(std::abs(a3), decimals) + "*" + term.candidate +
                                      "(" + inner + ")"});
        }
    }

    std::string out = "f =";
    bool first = true;
    for (const auto& p : pieces) {
        if (first) {
            out += p.lead < 0.0 ? " -" : " ";
            first = false;
        } else {
            out += p.lead < 0.0 ? " - " : " + ";
        }
        out += p.body;
    }
    const double c = round_to(constant, decimals);
    if (first) {
        out += " " + fixed(c, decimals);
    } else if (c != 0.0) {
        out += c < 0.0 ? " - " : " + ";
        out += fixed(std::abs(c), decimals);
    }
    return out;
}

std::string symbolic_to_json(const SymbolicModel& sm) {
    nlohmann::ordered_json doc;
    doc["terms"] = nlohmann::ordered_json::array();
    for (const auto& t : sm.terms) {
        doc["terms"].push_back(nlohmann::ordered_json{{"feature", t.feature},
                                                      {"candidate", t.candidate},
                                                      {"alpha", t.alpha},
                                                      {"r2", t.r2}});
    }
    doc["dropped"] = sm.dropped;
    doc["constant"] = sm.constant;
    return doc.dump(2) + "\n";
}

} // namespace gcph
