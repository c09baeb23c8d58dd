#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gcph/cox.hpp"
#include "gcph/matrix.hpp"
#include "gcph/model.hpp"

namespace gcph {

enum class SyntheticKind { linear, nonlinear };

// Generator settings. Linear truth: f(x) = x1 + 2 x2. Non-linear truth:
// f(x) = ln(lambda) * exp(-(x1^2 + x2^2) / (2 r^2)). Covariates are U(-1,1),
// the initial death time t0 is exponential with the given mean, t = t0 / e^f,
// and times are capped at the empirical (1 - censor_fraction) quantile with
// capped subjects censored.
struct SyntheticConfig {
    SyntheticKind kind = SyntheticKind::linear;
    std::size_t n = 2000;
    double lambda = 5.0;
    double r = 2.0;
    double mean_t0 = 5.0;
    double censor_fraction = 0.10;
    std::uint64_t seed = 0;
};

// Column roles for CSV ingestion. Columns not named anywhere are numeric
// features and get z-scored; categorical columns are one-hot encoded with the
// lexicographically first level dropped.
struct CsvSchema {
    std::string time_col = "time";
    std::string event_col = "event";
    std::vector<std::string> categorical_cols;
    std::vector<std::string> ignore_cols;
    std::string truth_col = "truth"; // loaded as ground truth when present
};

struct Dataset {
    std::vector<SurvivalRecord> records; // x on the scale described by `stats`
    std::vector<std::string> feature_names;
    std::vector<double> ground_truth; // per-record log-risk; empty if unknown
    std::vector<FeatureStats> stats;  // transform currently applied to raw values
    std::vector<char> standardizable; // z-scored on (re)standardization vs kept as-is
    std::vector<std::pair<double, double>> raw_ranges;

    std::size_t n() const { return records.size(); }
    std::size_t num_features() const { return feature_names.size(); }
    bool has_ground_truth() const { return !ground_truth.empty(); }

    double raw_value(std::size_t i, std::size_t v) const {
        return records[i].x[v] * stats[v].sd + stats[v].mean;
    }
    std::vector<double> times() const;
    std::vector<char> events() const;
    Matrix covariates() const; // current (standardized) scale
};

Dataset generate_synthetic(const SyntheticConfig& cfg);

Dataset load_csv(const std::string& path, const CsvSchema& schema);

// Raw-scale CSV: encoded feature columns, time, event, and truth when known.
void save_csv(const Dataset& ds, const std::string& path);
std::string to_csv(const Dataset& ds);

// Seeded uniform shuffle, then split. Standardization statistics are
// recomputed on the train part only and applied to both.
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t seed);

// Content hash of the canonical CSV serialization.
std::string dataset_fingerprint(const Dataset& ds);

} // namespace gcph
