#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "gcph.h"
#include "json.hpp"

using nlohmann::json;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("gcph_capi_test_" + name);
}

struct DatasetGuard {
    GcphDatasetHandle h = nullptr;
    ~DatasetGuard() { gcph_dataset_free(h); }
};

struct ModelGuard {
    GcphModelHandle h = nullptr;
    ~ModelGuard() { gcph_model_free(h); }
};

} // namespace

TEST_CASE("simulate, info, and split through the C surface") {
    DatasetGuard ds;
    REQUIRE(gcph_dataset_simulate(R"({"kind":"linear","n":400,"seed":11})", &ds.h) == GCPH_OK);

    int64_t n = 0, v = 0;
    CHECK(gcph_dataset_num_records(ds.h, &n) == GCPH_OK);
    CHECK(gcph_dataset_num_features(ds.h, &v) == GCPH_OK);
    CHECK(n == 400);
    CHECK(v == 2);

    const char* info_text = nullptr;
    REQUIRE(gcph_dataset_info_json(ds.h, &info_text) == GCPH_OK);
    const auto info = json::parse(info_text);
    CHECK(info["n"] == 400);
    CHECK(info["has_truth"] == true);
    CHECK(info["censor_rate"].get<double>() == doctest::Approx(0.1).epsilon(0.02));
    CHECK(info["fingerprint"].get<std::string>().size() == 16);

    DatasetGuard train, test;
    REQUIRE(gcph_dataset_split(ds.h, 0.25, 7, &train.h, &test.h) == GCPH_OK);
    CHECK(gcph_dataset_num_records(train.h, &n) == GCPH_OK);
    CHECK(n == 300);
    CHECK(gcph_dataset_num_records(test.h, &n) == GCPH_OK);
    CHECK(n == 100);
}

TEST_CASE("CSV round trip through the C surface") {
    DatasetGuard ds;
    REQUIRE(gcph_dataset_simulate(R"({"kind":"nonlinear","n":60,"seed":5})", &ds.h) == GCPH_OK);
    const auto path = temp_path("roundtrip.csv");
    REQUIRE(gcph_dataset_to_csv(ds.h, path.string().c_str()) == GCPH_OK);

    DatasetGuard loaded;
    REQUIRE(gcph_dataset_from_csv(path.string().c_str(), nullptr, &loaded.h) == GCPH_OK);
    int64_t n = 0;
    CHECK(gcph_dataset_num_records(loaded.h, &n) == GCPH_OK);
    CHECK(n == 60);
    std::filesystem::remove(path);
}

TEST_CASE("train, persist, predict, evaluate, symbolify") {
    DatasetGuard full;
    REQUIRE(gcph_dataset_simulate(R"({"kind":"linear","n":500,"seed":21})", &full.h) ==
            GCPH_OK);
    DatasetGuard train, test;
    REQUIRE(gcph_dataset_split(full.h, 0.2, 1, &train.h, &test.h) == GCPH_OK);

    ModelGuard model;
    const char* log_text = nullptr;
    REQUIRE(gcph_train(train.h, R"({"max_steps":200,"seed":2,"linear_only":true})", &model.h,
                       &log_text) == GCPH_OK);
    REQUIRE(log_text != nullptr);
    CHECK(std::string(log_text).rfind("step,nll,l1,entropy,total\n", 0) == 0);

    const auto model_path = temp_path("model.json");
    REQUIRE(gcph_model_save(model.h, model_path.string().c_str()) == GCPH_OK);
    ModelGuard loaded;
    REQUIRE(gcph_model_load(model_path.string().c_str(), &loaded.h) == GCPH_OK);

    const char* m1 = nullptr;
    REQUIRE(gcph_model_to_json(model.h, &m1) == GCPH_OK);
    const std::string first(m1);
    const char* m2 = nullptr;
    REQUIRE(gcph_model_to_json(loaded.h, &m2) == GCPH_OK);
    CHECK(first == std::string(m2));

    const double row[2] = {0.5, -0.5};
    double risk_a = 0.0, risk_b = 0.0;
    REQUIRE(gcph_model_predict(model.h, row, 2, &risk_a) == GCPH_OK);
    REQUIRE(gcph_model_predict(loaded.h, row, 2, &risk_b) == GCPH_OK);
    CHECK(risk_a == risk_b);

    double l1 = -1.0;
    REQUIRE(gcph_model_l1(model.h, train.h, &l1) == GCPH_OK);
    CHECK(l1 > 0.0);

    const char* metrics_text = nullptr;
    REQUIRE(gcph_evaluate(model.h, train.h, test.h, R"({"classic_c_index":true})",
                          &metrics_text) == GCPH_OK);
    const auto metrics = json::parse(metrics_text);
    REQUIRE(metrics["horizons"].size() == 3);
    CHECK(metrics["horizons"][0]["horizon_label"] == "p25");
    CHECK(metrics["horizons"][0]["c_index"].get<double>() > 0.6);
    CHECK(metrics["horizons"][1]["brier"].get<double>() >= 0.0);
    CHECK(metrics.contains("c_index_classic"));

    // oracle mode needs no model
    const char* oracle_text = nullptr;
    REQUIRE(gcph_evaluate(nullptr, train.h, test.h, R"({"oracle":true})", &oracle_text) ==
            GCPH_OK);
    CHECK(json::parse(oracle_text)["horizons"][0]["c_index"].get<double>() > 0.7);

    const char* curves_text = nullptr;
    REQUIRE(gcph_model_curves_json(model.h, 21, &curves_text) == GCPH_OK);
    const auto curves = json::parse(curves_text);
    REQUIRE(curves["features"].size() == 2);
    CHECK(curves["features"][0]["phi"].size() == 21);

    const char* sym_text = nullptr;
    REQUIRE(gcph_symbolify(model.h, nullptr, &sym_text) == GCPH_OK);
    const auto sym = json::parse(sym_text);
    CHECK(sym["formula"].get<std::string>().rfind("f =", 0) == 0);
    CHECK(sym.contains("terms"));
    CHECK(sym.contains("constant"));

    std::filesystem::remove(model_path);
}

TEST_CASE("error codes and messages") {
    CHECK(gcph_dataset_simulate(nullptr, nullptr) == GCPH_ERR_ARG);

    DatasetGuard ds;
    CHECK(gcph_dataset_simulate("{not json", &ds.h) == GCPH_ERR_ARG);
    CHECK(std::strlen(gcph_last_error()) > 0);

    CHECK(gcph_dataset_simulate(R"({"kind":"weird"})", &ds.h) == GCPH_ERR_DATA);
    CHECK(gcph_dataset_from_csv("/does/not/exist.csv", nullptr, &ds.h) == GCPH_ERR_DATA);
    CHECK(std::string(gcph_last_error()).find("exist.csv") != std::string::npos);

    REQUIRE(gcph_dataset_simulate(R"({"kind":"linear","n":50,"seed":1})", &ds.h) == GCPH_OK);
    GcphModelHandle model = nullptr;
    CHECK(gcph_train(ds.h, R"({"max_steps":0})", &model, nullptr) == GCPH_ERR_DATA);
    CHECK(gcph_train(ds.h, R"({"max_steps":2,"init_coeff_sd":1e308})", &model, nullptr) ==
          GCPH_ERR_NUMERIC);

    DatasetGuard train, test;
    CHECK(gcph_dataset_split(ds.h, 1.5, 0, &train.h, &test.h) == GCPH_ERR_DATA);

    // evaluate without model and without oracle flag
    REQUIRE(gcph_dataset_split(ds.h, 0.3, 0, &train.h, &test.h) == GCPH_OK);
    const char* out = nullptr;
    CHECK(gcph_evaluate(nullptr, train.h, test.h, nullptr, &out) == GCPH_ERR_DATA);

    CHECK(gcph_model_load("/does/not/exist.json", &model) == GCPH_ERR_DATA);
}

TEST_CASE("version string") {
    CHECK(std::strlen(gcph_version()) > 0);
}
