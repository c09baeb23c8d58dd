#include "gcph/evaluate.hpp"

#include <limits>

#include "json.hpp"

#include "gcph/cox.hpp"
#include "gcph/errors.hpp"

namespace gcph {

EvalReport evaluate_scores(const Dataset& train, const Dataset& test,
                           std::span<const double> train_scores,
                           std::span<const double> test_scores,
                           const EvalOptions& opts) {
    if (train_scores.size() != train.n() || test_scores.size() != test.n()) {
        throw input_error("score vector lengths must match the datasets");
    }

    const auto train_times = train.times();
    const auto train_events = train.events();
    const auto test_times = test.times();
    const auto test_events = test.events();

    const auto horizons = percentile_horizons(train_times);
    const auto cens_km = censoring_km(train_times, train_events);
    const auto train_idx = build_risk_index(train_times, train_events);
    const auto baseline = breslow_baseline(train_scores, train_idx);

    EvalReport report;
    for (const auto& h : horizons) {
        HorizonMetrics hm;
        hm.label = h.label;
        hm.t = h.t;
        try {
            hm.c_index.value = c_index(test_times, test_events, test_scores, h);
        } catch (const undefined_metric& e) {
            hm.c_index.reason = e.what();
        }
        try {
            std::vector<double> surv(test.n());
            for (std::size_t i = 0; i < test.n(); ++i) {
                surv[i] = predict_survival(test_scores[i], baseline, h.t);
            }
            hm.brier.value = brier_score(test_times, test_events, surv, cens_km, h);
        } catch (const undefined_metric& e) {
            hm.brier.reason = e.what();
        }
        report.horizons.push_back(std::move(hm));
    }

    const Horizon all{std::numeric_limits<double>::infinity(), "all"};
    try {
        report.c_index_untruncated.value = c_index(test_times, test_events, test_scores, all);
    } catch (const undefined_metric& e) {
        report.c_index_untruncated.reason = e.what();
    }
    if (opts.classic_c_index) {
        try {
            report.c_index_classic = c_index(test_times, test_events, test_scores, all, true);
        } catch (const undefined_metric&) {
        }
    }
    return report;
}

EvalReport evaluate_model(const GcphModel& m, const Dataset& train, const Dataset& test,
                          const EvalOptions& opts) {
    validate_model(m);
    if (m.feature_names != train.feature_names || m.feature_names != test.feature_names) {
        throw input_error("model/dataset feature mismatch (check categorical levels and column order)");
    }
    auto score = [&](const Dataset& ds) {
        std::vector<double> out(ds.n());
        std::vector<double> raw(ds.num_features());
        for (std::size_t i = 0; i < ds.n(); ++i) {
            for (std::size_t v = 0; v < ds.num_features(); ++v) raw[v] = ds.raw_value(i, v);
            out[i] = log_risk_raw(m, raw);
        }
        return out;
    };
    const auto train_scores = score(train);
    const auto test_scores = score(test);
    return evaluate_scores(train, test, train_scores, test_scores, opts);
}

EvalReport evaluate_oracle(const Dataset& train, const Dataset& test,
                           const EvalOptions& opts) {
    if (!train.has_ground_truth() || !test.has_ground_truth()) {
        throw input_error("oracle evaluation needs ground-truth columns in both datasets");
    }
    return evaluate_scores(train, test, train.ground_truth, test.ground_truth, opts);
}

namespace {

nlohmann::ordered_json cell_json(const MetricCell& cell) {
    if (cell.value) return *cell.value;
    return nullptr;
}

} // namespace

std::string eval_report_to_json(const EvalReport& report) {
    nlohmann::ordered_json doc;
    doc["horizons"] = nlohmann::ordered_json::array();
    for (const auto& hm : report.horizons) {
        nlohmann::ordered_json row;
        row["horizon_label"] = hm.label;
        row["horizon_t"] = hm.t;
        row["c_index"] = cell_json(hm.c_index);
        if (!hm.c_index.value) row["c_index_reason"] = hm.c_index.reason;
        row["brier"] = cell_json(hm.brier);
        if (!hm.brier.value) row["brier_reason"] = hm.brier.reason;
        doc["horizons"].push_back(std::move(row));
    }
    doc["c_index_untruncated"] = cell_json(report.c_index_untruncated);
    if (!report.c_index_untruncated.value) {
        doc["c_index_untruncated_reason"] = report.c_index_untruncated.reason;
    }
    if (report.c_index_classic) doc["c_index_classic"] = *report.c_index_classic;
    return doc.dump(2) + "\n";
}

} // namespace gcph
