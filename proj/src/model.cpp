#include "gcph/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gcph/errors.hpp"

namespace gcph {

using ordered_json = nlohmann::ordered_json;

void validate_model(const GcphModel& m) {
    if (m.activations.empty()) throw config_error("model must have at least one activation");
    if (m.feature_names.size() != m.activations.size() ||
        m.standardization.size() != m.activations.size()) {
        throw config_error("feature_names/standardization length must match activation count");
    }
    if (!std::isfinite(m.centering_offset)) throw config_error("non-finite centering offset");
    for (const auto& st : m.standardization) {
        if (!std::isfinite(st.mean) || !(st.sd > 0.0)) {
            throw config_error("standardization requires finite mean and sd > 0");
        }
    }
    for (const auto& a : m.activations) {
        validate_grid(a.grid);
        if (static_cast<int>(a.coeffs.size()) != a.grid.basis_count()) {
            throw config_error("activation coeffs length != basis count");
        }
        if (!std::isfinite(a.omega_b) || !std::isfinite(a.omega_s)) {
            throw config_error("non-finite activation scale");
        }
        for (double c : a.coeffs) {
            if (!std::isfinite(c)) throw config_error("non-finite spline coefficient");
        }
    }
}

std::size_t param_count(const GcphModel& m) {
    std::size_t p = 0;
    for (const auto& a : m.activations) p += 2 + a.coeffs.size();
    return p;
}

std::vector<double> flatten_params(const GcphModel& m) {
    std::vector<double> out;
    out.reserve(param_count(m));
    for (const auto& a : m.activations) {
        out.push_back(a.omega_b);
        out.push_back(a.omega_s);
        out.insert(out.end(), a.coeffs.begin(), a.coeffs.end());
    }
    return out;
}

void unflatten_params(GcphModel& m, std::span<const double> params) {
    if (params.size() != param_count(m)) {
        throw input_error("parameter vector length mismatch");
    }
    std::size_t p = 0;
    for (auto& a : m.activations) {
        a.omega_b = params[p++];
        a.omega_s = params[p++];
        for (auto& c : a.coeffs) c = params[p++];
    }
}

double log_risk(const GcphModel& m, std::span<const double> x) {
    if (x.size() != m.num_features()) {
        throw input_error("covariate vector length " + std::to_string(x.size()) +
                          " != feature count " + std::to_string(m.num_features()));
    }
    double f = 0.0;
    for (std::size_t v = 0; v < m.num_features(); ++v) {
        f += activation_eval(m.activations[v], x[v]);
    }
    return f - m.centering_offset;
}

double log_risk_raw(const GcphModel& m, std::span<const double> x_raw) {
    if (x_raw.size() != m.num_features()) throw input_error("covariate vector length mismatch");
    std::vector<double> z(x_raw.size());
    for (std::size_t v = 0; v < x_raw.size(); ++v) {
        z[v] = (x_raw[v] - m.standardization[v].mean) / m.standardization[v].sd;
    }
    return log_risk(m, z);
}

std::vector<double> log_risk_batch(const GcphModel& m, const Matrix& X) {
    if (X.cols != m.num_features() && X.rows > 0) {
        throw input_error("matrix column count != feature count");
    }
    std::vector<double> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) {
        out[i] = log_risk(m, std::span<const double>(X.row(i), X.cols));
    }
    return out;
}

BatchEval eval_batch_full(const GcphModel& m, const Matrix& X) {
    if (X.cols != m.num_features() && X.rows > 0) {
        throw input_error("matrix column count != feature count");
    }
    const std::size_t n = X.rows;
    const std::size_t V = m.num_features();
    BatchEval out;
    out.scores.assign(n, 0.0);
    out.phi = Matrix(n, V);
    out.jac = Matrix(n, param_count(m));

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t p = 0;
        double f = 0.0;
        for (std::size_t v = 0; v < V; ++v) {
            const auto& a = m.activations[v];
            const auto g = activation_grad(a, X(i, v));
            const double spline = g.d_omega_s;
            const double value = a.omega_b * g.d_omega_b + a.omega_s * spline;
            out.phi(i, v) = value;
            f += value;
            out.jac(i, p++) = g.d_omega_b;
            out.jac(i, p++) = g.d_omega_s;
            for (double dc : g.d_coeffs) out.jac(i, p++) = dc;
        }
        out.scores[i] = f - m.centering_offset;
    }
    return out;
}

Matrix log_risk_grad_batch(const GcphModel& m, const Matrix& X) {
    return eval_batch_full(m, X).jac;
}

std::vector<double> per_feature_curve(const GcphModel& m, std::size_t v,
                                      std::span<const double> xs) {
    if (v >= m.num_features()) throw input_error("feature index out of range");
    double rest = 0.0;
    for (std::size_t s = 0; s < m.num_features(); ++s) {
        if (s != v) rest += activation_eval(m.activations[s], 0.0);
    }
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i] = activation_eval(m.activations[v], xs[i]) + rest - m.centering_offset;
    }
    return out;
}

namespace {

const char* basis_name(BasisKind k) {
    return k == BasisKind::silu ? "silu" : "identity";
}

BasisKind basis_from_name(const std::string& s) {
    if (s == "silu") return BasisKind::silu;
    if (s == "identity") return BasisKind::identity;
    throw input_error("unknown basis kind '" + s + "'");
}

} // namespace

std::string model_to_json(const GcphModel& m) {
    validate_model(m);
    ordered_json doc;
    doc["version"] = 1;
    doc["feature_names"] = m.feature_names;
    ordered_json stats = ordered_json::array();
    for (const auto& st : m.standardization) {
        stats.push_back(ordered_json{{"mean", st.mean}, {"sd", st.sd}});
    }
    doc["standardization"] = std::move(stats);
    doc["centering_offset"] = m.centering_offset;
    ordered_json acts = ordered_json::array();
    for (const auto& a : m.activations) {
        ordered_json ja;
        ja["omega_b"] = a.omega_b;
        ja["omega_s"] = a.omega_s;
        ja["coeffs"] = a.coeffs;
        ja["grid"] = ordered_json{{"lo", a.grid.lo},
                                  {"hi", a.grid.hi},
                                  {"num_intervals", a.grid.num_intervals},
                                  {"order", a.grid.order}};
        ja["basis"] = basis_name(a.basis);
        acts.push_back(std::move(ja));
    }
    doc["activations"] = std::move(acts);
    return doc.dump(2) + "\n";
}

GcphModel model_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw input_error(std::string("invalid model JSON: ") + e.what());
    }
    try {
        GcphModel m;
        for (const auto& name : doc.at("feature_names")) {
            m.feature_names.push_back(name.get<std::string>());
        }
        for (const auto& st : doc.at("standardization")) {
            m.standardization.push_back({st.at("mean").get<double>(), st.at("sd").get<double>()});
        }
        m.centering_offset = doc.at("centering_offset").get<double>();
        for (const auto& ja : doc.at("activations")) {
            Activation a;
            a.omega_b = ja.at("omega_b").get<double>();
            a.omega_s = ja.at("omega_s").get<double>();
            a.coeffs = ja.at("coeffs").get<std::vector<double>>();
            const auto& jg = ja.at("grid");
            a.grid.lo = jg.at("lo").get<double>();
            a.grid.hi = jg.at("hi").get<double>();
            a.grid.num_intervals = jg.at("num_intervals").get<int>();
            a.grid.order = jg.at("order").get<int>();
            a.basis = ja.contains("basis") ? basis_from_name(ja.at("basis").get<std::string>())
                                           : BasisKind::silu;
            m.activations.push_back(std::move(a));
        }
        validate_model(m);
        return m;
    } catch (const ordered_json::exception& e) {
        throw input_error(std::string("model JSON missing or mistyped field: ") + e.what());
    }
}

void save_model(const GcphModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open '" + path + "' for writing");
    out << model_to_json(m);
    if (!out) throw input_error("failed writing model to '" + path + "'");
}

GcphModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

} // namespace gcph
