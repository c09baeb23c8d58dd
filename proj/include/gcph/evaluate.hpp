#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gcph/data.hpp"
#include "gcph/metrics.hpp"
#include "gcph/model.hpp"

namespace gcph {

// One metric value; undefined cells carry the reason instead of crashing the
// whole report.
struct MetricCell {
    std::optional<double> value;
    std::string reason;
};

struct HorizonMetrics {
    std::string label;
    double t = 0.0;
    MetricCell c_index;
    MetricCell brier;
};

struct EvalReport {
    std::vector<HorizonMetrics> horizons;     // p25 / p50 / p75
    MetricCell c_index_untruncated;
    std::optional<double> c_index_classic;    // Harrell variant, when requested
};

struct EvalOptions {
    bool classic_c_index = false;
};

// Horizons, censoring KM and the Breslow baseline come from the train split;
// metrics are computed on the test split.
EvalReport evaluate_scores(const Dataset& train, const Dataset& test,
                           std::span<const double> train_scores,
                           std::span<const double> test_scores,
                           const EvalOptions& opts = {});

// Scores every record through the model (raw covariates, model-internal
// standardization), then evaluates.
EvalReport evaluate_model(const GcphModel& m, const Dataset& train, const Dataset& test,
                          const EvalOptions& opts = {});

// Uses the datasets' ground-truth columns as risk scores.
EvalReport evaluate_oracle(const Dataset& train, const Dataset& test,
                           const EvalOptions& opts = {});

std::string eval_report_to_json(const EvalReport& report);

} // namespace gcph
