#include "gcph.h"

#include <cstring>
#include <exception>
#include <string>

#include "json.hpp"

#include "gcph/data.hpp"
#include "gcph/errors.hpp"
#include "gcph/evaluate.hpp"
#include "gcph/metrics.hpp"
#include "gcph/model.hpp"
#include "gcph/symbolic.hpp"
#include "gcph/trainer.hpp"
#include "gcph/util.hpp"

namespace {

using gcph::Dataset;
using gcph::GcphModel;
using ordered_json = nlohmann::ordered_json;

thread_local std::string tl_error;
thread_local std::string tl_result;

int fail(int code, const std::string& msg) {
    tl_error = msg;
    return code;
}

// Exceptions cross the C boundary as codes; the message lands in tl_error.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return GCPH_OK;
    } catch (const gcph::numeric_error& e) {
        return fail(GCPH_ERR_NUMERIC, e.what());
    } catch (const gcph::input_error& e) {
        return fail(GCPH_ERR_DATA, e.what());
    } catch (const gcph::config_error& e) {
        return fail(GCPH_ERR_DATA, e.what());
    } catch (const ordered_json::exception& e) {
        return fail(GCPH_ERR_ARG, std::string("bad JSON argument: ") + e.what());
    } catch (const std::exception& e) {
        return fail(GCPH_ERR_DATA, e.what());
    }
}

ordered_json parse_options(const char* text) {
    if (text == nullptr || std::strlen(text) == 0) return ordered_json::object();
    return ordered_json::parse(text); // json::exception -> GCPH_ERR_ARG in guarded()
}

Dataset* as_dataset(GcphDatasetHandle h) { return static_cast<Dataset*>(h); }
GcphModel* as_model(GcphModelHandle h) { return static_cast<GcphModel*>(h); }

const char* stash(std::string s) {
    tl_result = std::move(s);
    return tl_result.c_str();
}

gcph::SyntheticConfig synthetic_config_from_json(const ordered_json& j) {
    gcph::SyntheticConfig cfg;
    if (j.contains("kind")) {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "linear") {
            cfg.kind = gcph::SyntheticKind::linear;
        } else if (kind == "nonlinear") {
            cfg.kind = gcph::SyntheticKind::nonlinear;
        } else {
            throw gcph::input_error("unknown synthetic kind '" + kind + "'");
        }
    }
    cfg.n = j.value("n", cfg.n);
    cfg.lambda = j.value("lambda", cfg.lambda);
    cfg.r = j.value("r", cfg.r);
    cfg.mean_t0 = j.value("mean_t0", cfg.mean_t0);
    cfg.censor_fraction = j.value("censor_fraction", cfg.censor_fraction);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

gcph::CsvSchema schema_from_json(const ordered_json& j) {
    gcph::CsvSchema schema;
    schema.time_col = j.value("time_col", schema.time_col);
    schema.event_col = j.value("event_col", schema.event_col);
    if (j.contains("categorical_cols")) {
        schema.categorical_cols = j.at("categorical_cols").get<std::vector<std::string>>();
    }
    if (j.contains("ignore_cols")) {
        schema.ignore_cols = j.at("ignore_cols").get<std::vector<std::string>>();
    }
    schema.truth_col = j.value("truth_col", schema.truth_col);
    return schema;
}

} // namespace

extern "C" {

const char* gcph_version(void) { return "0.1.0"; }

const char* gcph_last_error(void) { return tl_error.c_str(); }

int gcph_dataset_simulate(const char* config_json, GcphDatasetHandle* out) {
    if (out == nullptr) return fail(GCPH_ERR_ARG, "null output handle");
    return guarded([&] {
        const auto cfg = synthetic_config_from_json(parse_options(config_json));
        *out = new Dataset(gcph::generate_synthetic(cfg));
    });
}

int gcph_dataset_from_csv(const char* path, const char* schema_json,
                          GcphDatasetHandle* out) {
    if (out == nullptr || path == nullptr) return fail(GCPH_ERR_ARG, "null argument");
    return guarded([&] {
        const auto schema = schema_from_json(parse_options(schema_json));
        *out = new Dataset(gcph::load_csv(path, schema));
    });
}

int gcph_dataset_to_csv(GcphDatasetHandle ds, const char* path) {
    if (ds == nullptr || path == nullptr) return fail(GCPH_ERR_ARG, "null argument");
    return guarded([&] { gcph::save_csv(*as_dataset(ds), path); });
}

int gcph_dataset_split(GcphDatasetHandle ds, double test_fraction, uint64_t seed,
                       GcphDatasetHandle* train_out, GcphDatasetHandle* test_out) {
    if (ds == nullptr || train_out == nullptr || test_out == nullptr) {
        return fail(GCPH_ERR_ARG, "null argument");
    }
    return guarded([&] {
        auto [train, test] = gcph::split(*as_dataset(ds), test_fraction, seed);
        *train_out = new Dataset(std::move(train));
        *test_out = new Dataset(std::move(test));
    });
}

int gcph_dataset_num_records(GcphDatasetHandle ds, int64_t* out) {
    if (ds == nullptr || out == nullptr) return fail(GCPH_ERR_ARG, "null argument");
    *out = static_cast<int64_t>(as_dataset(ds)->n());
    return GCPH_OK;
}

int gcph_dataset_num_features(GcphDatasetHandle ds, int64_t* out) {
    if (ds == nullptr || out == nullptr) return fail(GCPH_ERR_ARG, "null argument");
    *out = static_cast<int64_t>(as_dataset(ds)->num_features());
    return GCPH_OK;
}

int gcph_dataset_info_json(GcphDatasetHandle ds, const char** out) {
    if (ds == nullptr || out == nullptr) return fail(GCPH_ERR_ARG, "null argument");
    return guarded([&] {
        const Dataset& d = *as_dataset(ds);
        std::size_t events = 0;
        for (const auto& rec : d.records) events += rec.event ? 1 : 0;
        const auto horizons = gcph::percentile_horizons(d.times());
        ordered_json doc;
        doc["n"] = d.n();
        doc["num_features"] = d.num_features();
        doc["feature_names"] = d.feature_names;
        doc["num_events"] = events;
        doc["censor_rate"] = 1.0 - static_cast<double>(events) / static_cast<double>(d.n());
        doc["time_quantiles"] = ordered_json{{"p25", horizons[0].t},
                                             {"p50", horizons[1].t},
                                             {"p75", horizons[2].t}};
        doc["has_truth"] = d.has_ground_truth();
        doc["fingerprint"] = gcph::dataset_fingerprint(d);
        *out = stash(doc.dump(2) + "\n");
    });
}

int gcph_dataset_free(GcphDatasetHandle ds) {
    delete as_dataset(ds);
    return GCPH_OK;
}

int gcph_train(GcphDatasetHandle train, const char* config_json,
               GcphModelHandle* model_out, const char** train_log_csv_out) {
    if (train == nullptr || model_out == nullptr) return fail(GCPH_ERR_ARG, "null argument");
    return guarded([&] {
        const auto j = parse_options(config_json);
        gcph::TrainConfig cfg;
        cfg.num_intervals = j.value("num_intervals", cfg.num_intervals);
        cfg.order = j.value("order", cfg.order);
        cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
        cfg.max_steps = j.value("max_steps", cfg.max_steps);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.linear_only = j.value("linear_only", cfg.linear_only);
        cfg.init_coeff_sd = j.value("init_coeff_sd", cfg.init_coeff_sd);
        gcph::RegConfig reg;
        reg.mu1 = j.value("mu1", reg.mu1);
        reg.mu2 = j.value("mu2", reg.mu2);
        reg.gamma = j.value("gamma", reg.gamma);

        auto [model, log] = gcph::train(*as_dataset(train), cfg, reg);
        *model_out = new GcphModel(std::move(model));
        if (train_log_csv_out != nullptr) *train_log_csv_out = stash(log.to_csv());
    });
}

int gcph_model_save(GcphModelHandle m, const char* path) {
    if (m == nullptr || path == nullptr) return fail(GCPH_ERR_ARG, "null argument");
    return guarded([&] { gcph::save_model(*as_model(m), path); });
}

int gcph_model_load(const char* path, GcphModelHandle* out) {
    if (path == nullptr || out == nullptr) return fail(GCPH_ERR_ARG, "null argument");
    return guarded([&] { *out = new GcphModel(gcph::load_model(path)); });
}

int gcph_model_to_json(GcphModelHandle m, const char** out) {
    if (m == nullptr || out == nullptr) return fail(GCPH_ERR_ARG, "null argument");
    return guarded([&] { *out = stash(gcph::model_to_json(*as_model(m))); });
}

int gcph_model_predict(GcphModelHandle m, const double* raw_row, int64_t len,
                       double* log_risk_out) {
    if (m == nullptr || raw_row == nullptr || log_risk_out == nullptr || len < 0) {
        return fail(GCPH_ERR_ARG, "null argument");
    }
    return guarded([&] {
        *log_risk_out = gcph::log_risk_raw(
            *as_model(m), std::span<const double>(raw_row, static_cast<std::size_t>(len)));
    });
}

int gcph_model_l1(GcphModelHandle m, GcphDatasetHandle ds, double* total_l1_out) {
    if (m == nullptr || ds == nullptr || total_l1_out == nullptr) {
        return fail(GCPH_ERR_ARG, "null argument");
    }
    return guarded([&] {
        const auto l1s = gcph::l1_norm_per_activation(*as_model(m), as_dataset(ds)->covariates());
        double total = 0.0;
        for (double v : l1s) total += v;
        *total_l1_out = total;
    });
}

int gcph_model_curves_json(GcphModelHandle m, int64_t n_points, const char** out) {
    if (m == nullptr || out == nullptr) return fail(GCPH_ERR_ARG, "null argument");
    if (n_points < 2) return fail(GCPH_ERR_ARG, "n_points must be >= 2");
    return guarded([&] {
        const GcphModel& model = *as_model(m);
        gcph::validate_model(model);
        ordered_json doc;
        doc["features"] = ordered_json::array();
        for (std::size_t v = 0; v < model.num_features(); ++v) {
            const auto& grid = model.activations[v].grid;
            std::vector<double> xs(static_cast<std::size_t>(n_points));
            std::vector<double> raw(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) {
                xs[i] = grid.lo + (grid.hi - grid.lo) * static_cast<double>(i) /
                                      static_cast<double>(xs.size() - 1);
                raw[i] = xs[i] * model.standardization[v].sd + model.standardization[v].mean;
            }
            const auto phi = gcph::per_feature_curve(model, v, xs);
            ordered_json jf;
            jf["index"] = v;
            jf["name"] = model.feature_names[v];
            jf["x_raw"] = raw;
            jf["x_std"] = xs;
            jf["phi"] = phi;
            doc["features"].push_back(std::move(jf));
        }
        *out = stash(doc.dump(2) + "\n");
    });
}

int gcph_model_free(GcphModelHandle m) {
    delete as_model(m);
    return GCPH_OK;
}

int gcph_evaluate(GcphModelHandle m, GcphDatasetHandle train, GcphDatasetHandle test,
                  const char* options_json, const char** metrics_json_out) {
    if (train == nullptr || test == nullptr || metrics_json_out == nullptr) {
        return fail(GCPH_ERR_ARG, "null argument");
    }
    return guarded([&] {
        const auto j = parse_options(options_json);
        gcph::EvalOptions opts;
        opts.classic_c_index = j.value("classic_c_index", false);
        const bool oracle = j.value("oracle", false);
        gcph::EvalReport report;
        if (oracle) {
            report = gcph::evaluate_oracle(*as_dataset(train), *as_dataset(test), opts);
        } else {
            if (m == nullptr) throw gcph::input_error("model required unless oracle mode is set");
            report = gcph::evaluate_model(*as_model(m), *as_dataset(train),
                                          *as_dataset(test), opts);
        }
        *metrics_json_out = stash(gcph::eval_report_to_json(report));
    });
}

int gcph_symbolify(GcphModelHandle m, const char* options_json,
                   const char** result_json_out) {
    if (m == nullptr || result_json_out == nullptr) return fail(GCPH_ERR_ARG, "null argument");
    return guarded([&] {
        const auto j = parse_options(options_json);
        const int decimals = j.value("decimals", 2);
        const std::size_t n_points = j.value("n_points", std::size_t{201});
        const auto sm = gcph::symbolify(*as_model(m), n_points);
        auto doc = ordered_json::parse(gcph::symbolic_to_json(sm));
        ordered_json out;
        out["formula"] = gcph::render_formula(sm, decimals);
        for (auto& [key, value] : doc.items()) out[key] = std::move(value);
        *result_json_out = stash(out.dump(2) + "\n");
    });
}

} // extern "C"
