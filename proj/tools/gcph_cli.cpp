// Batch front end: simulate | train | eval | symbolify | sweep.
// Links the C API only; CLI11/json handle flags, manifests and file plumbing.
//
// Exit codes: 0 ok, 1 usage error, 2 data error, 3 numerical abort.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gcph.h"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

[[noreturn]] void die(int code, const std::string& msg) {
    std::cerr << "gcph-cli: " << msg << "\n";
    std::exit(code);
}

// Maps C API error codes onto process exit codes.
void check(int rc, const std::string& what) {
    if (rc == GCPH_OK) return;
    const int code = rc == GCPH_ERR_NUMERIC ? kExitNumeric
                     : rc == GCPH_ERR_ARG   ? kExitUsage
                                            : kExitData;
    die(code, what + ": " + gcph_last_error());
}

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) die(kExitData, "cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) die(kExitData, "failed writing '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) die(kExitData, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct DatasetGuard {
    GcphDatasetHandle h = nullptr;
    DatasetGuard() = default;
    DatasetGuard(const DatasetGuard&) = delete;
    DatasetGuard& operator=(const DatasetGuard&) = delete;
    DatasetGuard(DatasetGuard&& other) noexcept : h(other.h) { other.h = nullptr; }
    ~DatasetGuard() { gcph_dataset_free(h); }
};

struct ModelGuard {
    GcphModelHandle h = nullptr;
    ModelGuard() = default;
    ModelGuard(const ModelGuard&) = delete;
    ModelGuard& operator=(const ModelGuard&) = delete;
    ModelGuard(ModelGuard&& other) noexcept : h(other.h) { other.h = nullptr; }
    ~ModelGuard() { gcph_model_free(h); }
};

ordered_json dataset_info(GcphDatasetHandle h) {
    const char* text = nullptr;
    check(gcph_dataset_info_json(h, &text), "dataset info");
    return ordered_json::parse(text);
}

// --- shared flag groups -----------------------------------------------------

struct SchemaFlags {
    std::string time_col = "time";
    std::string event_col = "event";
    std::vector<std::string> categorical_cols;
    std::vector<std::string> ignore_cols;
    std::string truth_col = "truth";

    void add_to(CLI::App* cmd) {
        cmd->add_option("--time-col", time_col, "time column name")->capture_default_str();
        cmd->add_option("--event-col", event_col, "event column name")->capture_default_str();
        cmd->add_option("--categorical-cols", categorical_cols,
                        "categorical columns (one-hot encoded)")
            ->delimiter(',');
        cmd->add_option("--ignore-cols", ignore_cols, "columns to drop")->delimiter(',');
        cmd->add_option("--truth-col", truth_col,
                        "ground-truth log-risk column, loaded when present")
            ->capture_default_str();
    }

    ordered_json to_json() const {
        return ordered_json{{"time_col", time_col},
                            {"event_col", event_col},
                            {"categorical_cols", categorical_cols},
                            {"ignore_cols", ignore_cols},
                            {"truth_col", truth_col}};
    }
};

struct TrainFlags {
    int intervals = 5;
    int order = 3;
    double lr = 0.01;
    int steps = 2000;
    double init_coeff_sd = 0.1;
    double gamma = 0.1;
    double mu1 = 1.0;
    double mu2 = 10.0;
    bool linear_only = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--intervals", intervals, "spline intervals per activation")
            ->capture_default_str();
        cmd->add_option("--order", order, "spline order")->capture_default_str();
        cmd->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
        cmd->add_option("--steps", steps, "full-batch steps")->capture_default_str();
        cmd->add_option("--init-coeff-sd", init_coeff_sd, "sd of the coefficient init")
            ->capture_default_str();
        cmd->add_option("--gamma", gamma, "regularization weight")->capture_default_str();
        cmd->add_option("--mu1", mu1, "L1 weight")->capture_default_str();
        cmd->add_option("--mu2", mu2, "entropy weight")->capture_default_str();
        cmd->add_flag("--linear-only", linear_only,
                      "restrict activations to one slope per feature");
    }

    // config-file values fill in whatever the command line left untouched
    void merge_config(const CLI::App* cmd, const ordered_json& cfg) {
        auto take = [&](const char* flag, const char* key, auto& slot) {
            if (cfg.contains(key) && cmd->count(flag) == 0) {
                cfg.at(key).get_to(slot);
            }
        };
        take("--intervals", "intervals", intervals);
        take("--order", "order", order);
        take("--lr", "lr", lr);
        take("--steps", "steps", steps);
        take("--init-coeff-sd", "init_coeff_sd", init_coeff_sd);
        take("--gamma", "gamma", gamma);
        take("--mu1", "mu1", mu1);
        take("--mu2", "mu2", mu2);
        take("--linear-only", "linear_only", linear_only);
    }

    ordered_json to_json(std::uint64_t seed) const {
        return ordered_json{{"num_intervals", intervals},
                            {"order", order},
                            {"learning_rate", lr},
                            {"max_steps", steps},
                            {"seed", seed},
                            {"linear_only", linear_only},
                            {"init_coeff_sd", init_coeff_sd},
                            {"mu1", mu1},
                            {"mu2", mu2},
                            {"gamma", gamma}};
    }
};

void write_manifest(const fs::path& out_dir, const std::string& name,
                    const std::string& command, ordered_json config,
                    const std::vector<std::uint64_t>& seeds,
                    const std::vector<std::pair<std::string, std::string>>& datasets,
                    const std::vector<fs::path>& artifacts,
                    std::chrono::steady_clock::time_point started) {
    ordered_json doc;
    doc["command"] = command;
    doc["config"] = std::move(config);
    doc["seeds"] = seeds;
    doc["datasets"] = ordered_json::array();
    for (const auto& [path, fingerprint] : datasets) {
        doc["datasets"].push_back(ordered_json{{"path", path}, {"fingerprint", fingerprint}});
    }
    doc["artifacts"] = ordered_json::array();
    for (const auto& p : artifacts) doc["artifacts"].push_back(p.string());
    const auto elapsed = std::chrono::steady_clock::now() - started;
    doc["wall_clock_sec"] =
        std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
    write_file(out_dir / (name + ".manifest.json"), doc.dump(2) + "\n");
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) die(kExitData, "cannot create output directory '" + out + "'");
    return dir;
}

DatasetGuard load_dataset(const std::string& path, const SchemaFlags& schema) {
    DatasetGuard ds;
    check(gcph_dataset_from_csv(path.c_str(), schema.to_json().dump().c_str(), &ds.h),
          "loading '" + path + "'");
    return ds;
}

double parse_double_or_die(const std::string& s, const std::string& what) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        die(kExitData, "cannot parse " + what + " '" + s + "'");
    }
}

// Best total loss from a train-log CSV (header step,nll,l1,entropy,total).
double best_total_loss(const std::string& log_csv) {
    std::istringstream in(log_csv);
    std::string line;
    std::getline(in, line); // header
    double best = std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        const auto pos = line.rfind(',');
        if (pos == std::string::npos) continue;
        best = std::min(best, parse_double_or_die(line.substr(pos + 1), "train log entry"));
    }
    return best;
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
    std::string kind;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    double censor_fraction = 0.10;
    double lambda = 5.0;
    double r = 2.0;
    double mean_t0 = 5.0;
    std::string out;
    std::string name = "dataset";
};

int run_simulate(const SimulateArgs& args) {
    const auto started = std::chrono::steady_clock::now();
    ordered_json cfg{{"kind", args.kind},          {"n", args.n},
                     {"seed", args.seed},          {"censor_fraction", args.censor_fraction},
                     {"lambda", args.lambda},      {"r", args.r},
                     {"mean_t0", args.mean_t0}};
    DatasetGuard ds;
    check(gcph_dataset_simulate(cfg.dump().c_str(), &ds.h), "simulate");

    const auto out_dir = prepare_out_dir(args.out);
    const auto csv_path = out_dir / (args.name + ".csv");
    check(gcph_dataset_to_csv(ds.h, csv_path.string().c_str()), "writing dataset");

    const auto info = dataset_info(ds.h);
    std::cout << "wrote " << csv_path.string() << "\n"
              << "  n=" << info["n"] << " censor_rate=" << info["censor_rate"]
              << " time quantiles p25/p50/p75 = " << info["time_quantiles"]["p25"] << " / "
              << info["time_quantiles"]["p50"] << " / " << info["time_quantiles"]["p75"]
              << "\n";

    write_manifest(out_dir, args.name, "simulate", cfg, {args.seed},
                   {{csv_path.string(), info["fingerprint"].get<std::string>()}}, {csv_path},
                   started);
    return 0;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
    std::string data;
    SchemaFlags schema;
    TrainFlags train;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> seeds;
    std::string config_file;
    std::string out;
    std::string name = "model";
};

void print_linear_summary(const std::string& model_json) {
    const auto doc = ordered_json::parse(model_json);
    bool linear = !doc["activations"].empty();
    for (const auto& a : doc["activations"]) {
        linear &= a.value("basis", std::string("silu")) == std::string("identity");
    }
    if (!linear) return;
    std::vector<double> raw_slopes;
    std::cout << "  slopes (raw scale):";
    for (std::size_t v = 0; v < doc["activations"].size(); ++v) {
        const double w = doc["activations"][v]["omega_b"].get<double>();
        const double sd = doc["standardization"][v]["sd"].get<double>();
        raw_slopes.push_back(w / sd);
        std::cout << " " << doc["feature_names"][v].get<std::string>() << "="
                  << fmt(raw_slopes.back());
    }
    std::cout << "\n";
    if (raw_slopes.size() == 2 && raw_slopes[0] != 0.0) {
        std::cout << "  slope ratio w2/w1 = " << fmt(raw_slopes[1] / raw_slopes[0]) << "\n";
    }
}

int run_train(TrainArgs& args, const CLI::App* cmd) {
    const auto started = std::chrono::steady_clock::now();
    if (!args.config_file.empty()) {
        const auto cfg = ordered_json::parse(read_file(args.config_file), nullptr, false);
        if (cfg.is_discarded()) die(kExitData, "config file is not valid JSON");
        args.train.merge_config(cmd, cfg);
        if (cfg.contains("seed") && cmd->count("--seed") == 0) cfg.at("seed").get_to(args.seed);
        if (cfg.contains("seeds") && cmd->count("--seeds") == 0) {
            cfg.at("seeds").get_to(args.seeds);
        }
    }
    auto ds = load_dataset(args.data, args.schema);
    const auto info = dataset_info(ds.h);

    const bool multi = !args.seeds.empty();
    const std::vector<std::uint64_t> seeds = multi ? args.seeds
                                                   : std::vector<std::uint64_t>{args.seed};
    const auto out_dir = prepare_out_dir(args.out);

    std::vector<fs::path> artifacts;
    ordered_json config;
    for (const auto seed : seeds) {
        const auto cfg = args.train.to_json(seed);
        if (config.empty()) {
            config = cfg;
            config["data"] = args.data;
            config["schema"] = args.schema.to_json();
        }
        ModelGuard model;
        const char* log_text = nullptr;
        check(gcph_train(ds.h, cfg.dump().c_str(), &model.h, &log_text),
              "training (seed " + std::to_string(seed) + ")");
        const std::string log_csv(log_text);

        const std::string stem =
            multi ? args.name + "_seed" + std::to_string(seed) : args.name;
        const auto model_path = out_dir / (stem + ".json");
        const auto log_path = out_dir / (stem + "_log.csv");
        check(gcph_model_save(model.h, model_path.string().c_str()), "saving model");
        write_file(log_path, log_csv);
        artifacts.push_back(model_path);
        artifacts.push_back(log_path);

        std::cout << "seed " << seed << ": best training loss = "
                  << fmt(best_total_loss(log_csv)) << " -> " << model_path.string() << "\n";
        const char* model_json = nullptr;
        check(gcph_model_to_json(model.h, &model_json), "reading model back");
        print_linear_summary(model_json);
    }

    write_manifest(out_dir, args.name, "train", config, seeds,
                   {{args.data, info["fingerprint"].get<std::string>()}}, artifacts, started);
    return 0;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
    std::vector<std::string> models;
    std::string train_csv;
    std::string test_csv;
    SchemaFlags schema;
    bool oracle = false;
    bool classic = false;
    bool surface = false;
    int surface_points = 101;
    std::string out;
    std::string name = "metrics";
};

int run_eval(const EvalArgs& args) {
    const auto started = std::chrono::steady_clock::now();
    auto train = load_dataset(args.train_csv, args.schema);
    auto test = load_dataset(args.test_csv, args.schema);
    const auto train_info = dataset_info(train.h);
    const auto test_info = dataset_info(test.h);
    const auto out_dir = prepare_out_dir(args.out);

    const ordered_json opts{{"oracle", args.oracle}, {"classic_c_index", args.classic}};

    struct Row {
        std::string label;
        ordered_json report;
    };
    std::vector<Row> rows;
    std::vector<ModelGuard> models(args.models.size());
    if (args.oracle) {
        const char* text = nullptr;
        check(gcph_evaluate(nullptr, train.h, test.h, opts.dump().c_str(), &text),
              "oracle evaluation");
        rows.push_back({"oracle", ordered_json::parse(text)});
    }
    for (std::size_t k = 0; k < args.models.size(); ++k) {
        check(gcph_model_load(args.models[k].c_str(), &models[k].h),
              "loading '" + args.models[k] + "'");
        const char* text = nullptr;
        check(gcph_evaluate(models[k].h, train.h, test.h, opts.dump().c_str(), &text),
              "evaluating '" + args.models[k] + "'");
        rows.push_back({args.models[k], ordered_json::parse(text)});
    }
    if (rows.empty()) die(kExitUsage, "eval needs --model or --oracle");

    ordered_json doc;
    doc["models"] = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json entry;
        entry["model"] = row.label;
        for (const auto& [key, value] : row.report.items()) entry[key] = value;
        doc["models"].push_back(std::move(entry));
    }

    // mean +- sd over models, per horizon and metric, skipping undefined cells
    if (rows.size() > 1) {
        ordered_json summary;
        for (std::size_t h = 0; h < 3; ++h) {
            const std::string label =
                rows.front().report["horizons"][h]["horizon_label"].get<std::string>();
            for (const std::string metric : {"c_index", "brier"}) {
                std::vector<double> vals;
                for (const auto& row : rows) {
                    const auto& cell = row.report["horizons"][h][metric];
                    if (!cell.is_null()) vals.push_back(cell.get<double>());
                }
                if (vals.empty()) continue;
                double mean = 0.0;
                for (double v : vals) mean += v;
                mean /= static_cast<double>(vals.size());
                double var = 0.0;
                for (double v : vals) var += (v - mean) * (v - mean);
                const double sd =
                    vals.size() > 1 ? std::sqrt(var / static_cast<double>(vals.size() - 1))
                                    : 0.0;
                summary[label][metric + "_mean"] = mean;
                summary[label][metric + "_sd"] = sd;
                summary[label][metric + "_n"] = vals.size();
            }
        }
        doc["summary"] = std::move(summary);
    }

    const auto metrics_path = out_dir / (args.name + ".json");
    write_file(metrics_path, doc.dump(2) + "\n");
    std::vector<fs::path> artifacts{metrics_path};

    for (const auto& row : rows) {
        std::cout << row.label << ":";
        for (const auto& hm : row.report["horizons"]) {
            std::cout << "  " << hm["horizon_label"].get<std::string>() << " c="
                      << (hm["c_index"].is_null() ? std::string("null")
                                                  : fmt(hm["c_index"].get<double>()))
                      << " brier="
                      << (hm["brier"].is_null() ? std::string("null")
                                                : fmt(hm["brier"].get<double>()));
        }
        std::cout << "\n";
    }

    if (args.surface) {
        if (models.size() != 1) die(kExitUsage, "--surface needs exactly one --model");
        int64_t vcount = 0;
        check(gcph_dataset_num_features(test.h, &vcount), "surface");
        if (vcount != 2) die(kExitData, "--surface requires a 2-feature model");
        std::string csv = "x1,x2,f\n";
        const int np = args.surface_points;
        for (int i = 0; i < np; ++i) {
            for (int j = 0; j < np; ++j) {
                const double x1 = -1.0 + 2.0 * i / (np - 1);
                const double x2 = -1.0 + 2.0 * j / (np - 1);
                const double row[2] = {x1, x2};
                double f = 0.0;
                check(gcph_model_predict(models[0].h, row, 2, &f), "surface prediction");
                csv += fmt(x1) + "," + fmt(x2) + "," + fmt(f) + "\n";
            }
        }
        const auto surface_path = out_dir / (args.name + "_surface.csv");
        write_file(surface_path, csv);
        artifacts.push_back(surface_path);
        std::cout << "wrote " << surface_path.string() << "\n";
    }

    ordered_json config{{"models", args.models},   {"train", args.train_csv},
                        {"test", args.test_csv},   {"oracle", args.oracle},
                        {"classic", args.classic}, {"surface", args.surface},
                        {"schema", args.schema.to_json()}};
    write_manifest(out_dir, args.name, "eval", config, {},
                   {{args.train_csv, train_info["fingerprint"].get<std::string>()},
                    {args.test_csv, test_info["fingerprint"].get<std::string>()}},
                   artifacts, started);
    return 0;
}

// --- symbolify ---------------------------------------------------------------

struct SymbolifyArgs {
    std::vector<std::string> models;
    int decimals = 2;
    int points = 201;
    std::string out;
    std::string name = "symbolic";
};

int run_symbolify(const SymbolifyArgs& args) {
    const auto started = std::chrono::steady_clock::now();
    const auto out_dir = prepare_out_dir(args.out);

    const ordered_json opts{{"decimals", args.decimals}, {"n_points", args.points}};

    std::vector<ModelGuard> models(args.models.size());
    std::vector<ordered_json> results;
    std::vector<ordered_json> curve_sets;
    for (std::size_t k = 0; k < args.models.size(); ++k) {
        check(gcph_model_load(args.models[k].c_str(), &models[k].h),
              "loading '" + args.models[k] + "'");
        const char* text = nullptr;
        check(gcph_symbolify(models[k].h, opts.dump().c_str(), &text),
              "symbolifying '" + args.models[k] + "'");
        results.push_back(ordered_json::parse(text));
        const char* curves_text = nullptr;
        check(gcph_model_curves_json(models[k].h, args.points, &curves_text),
              "sampling curves of '" + args.models[k] + "'");
        curve_sets.push_back(ordered_json::parse(curves_text));
    }

    // formula text, one line per model
    std::string formulas;
    for (const auto& r : results) formulas += r["formula"].get<std::string>() + "\n";
    const auto formula_path = out_dir / (args.name + "_formula.txt");
    write_file(formula_path, formulas);

    // structured terms; the feature legend comes from the first model
    ordered_json doc;
    ordered_json legend;
    const auto& first_curves = curve_sets.front()["features"];
    for (const auto& f : first_curves) {
        legend["x" + std::to_string(f["index"].get<int>() + 1)] = f["name"];
    }
    if (results.size() == 1) {
        doc = results.front();
        doc["model"] = args.models.front();
        doc["legend"] = legend;
    } else {
        doc["legend"] = legend;
        doc["models"] = ordered_json::array();
        for (std::size_t k = 0; k < results.size(); ++k) {
            ordered_json entry;
            entry["model"] = args.models[k];
            for (const auto& [key, value] : results[k].items()) entry[key] = value;
            doc["models"].push_back(std::move(entry));
        }
    }
    const auto json_path = out_dir / (args.name + ".json");
    write_file(json_path, doc.dump(2) + "\n");

    // per-feature curves, one value column per model, shared x grid
    for (const auto& cs : curve_sets) {
        if (cs["features"].size() != first_curves.size()) {
            die(kExitData, "models disagree on the feature count");
        }
        for (std::size_t v = 0; v < first_curves.size(); ++v) {
            if (cs["features"][v]["x_std"] != first_curves[v]["x_std"]) {
                die(kExitData, "models have different activation grids; curves need a "
                               "shared x axis (were they trained on the same data?)");
            }
        }
    }
    std::string csv = "feature,x";
    for (const auto& path : args.models) csv += "," + fs::path(path).stem().string();
    csv += "\n";
    for (std::size_t v = 0; v < first_curves.size(); ++v) {
        const auto& xs = first_curves[v]["x_raw"];
        for (std::size_t i = 0; i < xs.size(); ++i) {
            csv += first_curves[v]["name"].get<std::string>();
            csv += "," + fmt(xs[i].get<double>());
            for (const auto& cs : curve_sets) {
                csv += "," + fmt(cs["features"][v]["phi"][i].get<double>());
            }
            csv += "\n";
        }
    }
    const auto curves_path = out_dir / (args.name + "_curves.csv");
    write_file(curves_path, csv);

    for (const auto& r : results) std::cout << r["formula"].get<std::string>() << "\n";
    std::cout << "wrote " << formula_path.string() << ", " << json_path.string() << ", "
              << curves_path.string() << "\n";

    ordered_json config{{"models", args.models},
                        {"decimals", args.decimals},
                        {"points", args.points}};
    write_manifest(out_dir, args.name, "symbolify", config, {}, {},
                   {formula_path, json_path, curves_path}, started);
    return 0;
}

// --- sweep -------------------------------------------------------------------

struct SweepArgs {
    std::string data;
    SchemaFlags schema;
    TrainFlags train;
    std::string axis;
    std::vector<double> values;
    std::vector<std::uint64_t> seeds{1};
    double test_fraction = 0.2;
    std::string config_file;
    std::string out;
    std::string name = "sweep";
};

int run_sweep(SweepArgs& args, const CLI::App* cmd) {
    const auto started = std::chrono::steady_clock::now();
    if (!args.config_file.empty()) {
        const auto cfg = ordered_json::parse(read_file(args.config_file), nullptr, false);
        if (cfg.is_discarded()) die(kExitData, "config file is not valid JSON");
        args.train.merge_config(cmd, cfg);
    }
    auto ds = load_dataset(args.data, args.schema);
    const auto info = dataset_info(ds.h);
    const auto out_dir = prepare_out_dir(args.out);

    std::string csv = "axis,axis_value,seed,horizon,c_index,brier,total_l1\n";
    bool any_failed = false;
    for (const double value : args.values) {
        TrainFlags flags = args.train;
        if (args.axis == "order") {
            flags.order = static_cast<int>(value);
        } else {
            flags.gamma = value;
        }
        for (const auto seed : args.seeds) {
            DatasetGuard split_train, split_test;
            int rc = gcph_dataset_split(ds.h, args.test_fraction, seed, &split_train.h,
                                        &split_test.h);
            ModelGuard model;
            const char* metrics_text = nullptr;
            double total_l1 = 0.0;
            if (rc == GCPH_OK) {
                rc = gcph_train(split_train.h, flags.to_json(seed).dump().c_str(), &model.h,
                                nullptr);
            }
            if (rc == GCPH_OK) rc = gcph_model_l1(model.h, split_train.h, &total_l1);
            if (rc == GCPH_OK) {
                rc = gcph_evaluate(model.h, split_train.h, split_test.h, nullptr,
                                   &metrics_text);
            }
            if (rc != GCPH_OK) {
                any_failed = true;
                std::cerr << "sweep cell " << args.axis << "=" << fmt(value) << " seed="
                          << seed << " failed: " << gcph_last_error() << "\n";
                continue;
            }
            const auto report = ordered_json::parse(metrics_text);
            for (const auto& hm : report["horizons"]) {
                csv += args.axis + "," + fmt(value) + "," + std::to_string(seed) + "," +
                       hm["horizon_label"].get<std::string>() + ",";
                csv += hm["c_index"].is_null() ? "" : fmt(hm["c_index"].get<double>());
                csv += ",";
                csv += hm["brier"].is_null() ? "" : fmt(hm["brier"].get<double>());
                csv += "," + fmt(total_l1) + "\n";
            }
        }
    }

    const auto csv_path = out_dir / (args.name + ".csv");
    write_file(csv_path, csv);
    std::cout << "wrote " << csv_path.string() << (any_failed ? " (with failed cells)" : "")
              << "\n";

    ordered_json config{{"data", args.data},
                        {"axis", args.axis},
                        {"values", args.values},
                        {"test_fraction", args.test_fraction},
                        {"base", args.train.to_json(0)},
                        {"schema", args.schema.to_json()}};
    write_manifest(out_dir, args.name, "sweep", config, args.seeds,
                   {{args.data, info["fingerprint"].get<std::string>()}}, {csv_path}, started);
    return any_failed ? kExitData : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized Cox proportional hazards: KAN log-risk models with "
                 "symbolic distillation"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic survival dataset");
    sim_cmd->add_option("--kind", sim.kind, "linear | nonlinear")
        ->required()
        ->check(CLI::IsMember({"linear", "nonlinear"}));
    sim_cmd->add_option("--n", sim.n, "number of subjects")->required();
    sim_cmd->add_option("--seed", sim.seed, "generator seed")->capture_default_str();
    sim_cmd->add_option("--censor-fraction", sim.censor_fraction)->capture_default_str();
    sim_cmd->add_option("--lambda", sim.lambda)->capture_default_str();
    sim_cmd->add_option("--r", sim.r)->capture_default_str();
    sim_cmd->add_option("--mean-t0", sim.mean_t0)->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "output directory")->required();
    sim_cmd->add_option("--name", sim.name, "artifact base name")->capture_default_str();

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "fit a GCPH model");
    train_cmd->add_option("--data", tr.data, "training CSV")->required();
    tr.schema.add_to(train_cmd);
    tr.train.add_to(train_cmd);
    train_cmd->add_option("--seed", tr.seed, "training seed")->capture_default_str();
    train_cmd->add_option("--seeds", tr.seeds, "train one model per seed")->delimiter(',');
    train_cmd->add_option("--config", tr.config_file, "JSON config (flags take precedence)");
    train_cmd->add_option("--out", tr.out, "output directory")->required();
    train_cmd->add_option("--name", tr.name, "artifact base name")->capture_default_str();

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate models on a train/test pair");
    eval_cmd->add_option("--model", ev.models, "model JSON file(s)")->delimiter(',');
    eval_cmd->add_option("--train", ev.train_csv, "training CSV")->required();
    eval_cmd->add_option("--test", ev.test_csv, "test CSV")->required();
    ev.schema.add_to(eval_cmd);
    eval_cmd->add_flag("--oracle", ev.oracle, "score with the ground-truth column");
    eval_cmd->add_flag("--classic-cindex", ev.classic, "also report Harrell's C-index");
    eval_cmd->add_flag("--surface", ev.surface, "emit f on a grid over [-1,1]^2");
    eval_cmd->add_option("--surface-points", ev.surface_points)->capture_default_str();
    eval_cmd->add_option("--out", ev.out, "output directory")->required();
    eval_cmd->add_option("--name", ev.name, "artifact base name")->capture_default_str();

    SymbolifyArgs sy;
    auto* sym_cmd = app.add_subcommand("symbolify", "distill models into closed forms");
    sym_cmd->add_option("--model", sy.models, "model JSON file(s)")->required()->delimiter(',');
    sym_cmd->add_option("--decimals", sy.decimals)->capture_default_str();
    sym_cmd->add_option("--points", sy.points)->capture_default_str();
    sym_cmd->add_option("--out", sy.out, "output directory")->required();
    sym_cmd->add_option("--name", sy.name, "artifact base name")->capture_default_str();

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "train/eval over an order or gamma grid");
    sweep_cmd->add_option("--data", sw.data, "dataset CSV (split per seed)")->required();
    sw.schema.add_to(sweep_cmd);
    sw.train.add_to(sweep_cmd);
    sweep_cmd->add_option("--axis", sw.axis, "order | gamma")
        ->required()
        ->check(CLI::IsMember({"order", "gamma"}));
    sweep_cmd->add_option("--values", sw.values, "axis values")->required()->delimiter(',');
    sweep_cmd->add_option("--seeds", sw.seeds, "split/train seeds")->delimiter(',');
    sweep_cmd->add_option("--test-fraction", sw.test_fraction)->capture_default_str();
    sweep_cmd->add_option("--config", sw.config_file, "JSON config (flags take precedence)");
    sweep_cmd->add_option("--out", sw.out, "output directory")->required();
    sweep_cmd->add_option("--name", sw.name, "artifact base name")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    if (sim_cmd->parsed()) return run_simulate(sim);
    if (train_cmd->parsed()) return run_train(tr, train_cmd);
    if (eval_cmd->parsed()) return run_eval(ev);
    if (sym_cmd->parsed()) return run_symbolify(sy);
    if (sweep_cmd->parsed()) return run_sweep(sw, sweep_cmd);
    return kExitUsage;
}
