/*
 * C API of the GCPH survival-analysis library.
 *
 * Conventions:
 *   - Every function returns GCPH_OK (0) on success or a nonzero error code;
 *     gcph_last_error() gives a thread-local message for the last failure.
 *   - Handles are opaque and must be released with the matching *_free call.
 *   - Returned strings point into thread-local storage and stay valid until
 *     the same thread makes another gcph_* call that returns a string.
 *   - JSON parameters may be NULL or "{}" to take every default.
 */
#ifndef GCPH_H
#define GCPH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define GCPH_OK 0
#define GCPH_ERR_ARG 1     /* caller misuse: null pointer, malformed option JSON */
#define GCPH_ERR_DATA 2    /* bad data or configuration: CSV, schema, model file */
#define GCPH_ERR_NUMERIC 3 /* numerical failure: non-finite loss, divergence */

typedef void* GcphDatasetHandle;
typedef void* GcphModelHandle;

const char* gcph_version(void);
const char* gcph_last_error(void);

/* config: {"kind":"linear"|"nonlinear","n":2000,"seed":0,"lambda":5,"r":2,
            "mean_t0":5,"censor_fraction":0.1} */
int gcph_dataset_simulate(const char* config_json, GcphDatasetHandle* out);

/* schema: {"time_col":"time","event_col":"event","categorical_cols":[],
            "ignore_cols":[],"truth_col":"truth"} */
int gcph_dataset_from_csv(const char* path, const char* schema_json,
                          GcphDatasetHandle* out);

int gcph_dataset_to_csv(GcphDatasetHandle ds, const char* path);

int gcph_dataset_split(GcphDatasetHandle ds, double test_fraction, uint64_t seed,
                       GcphDatasetHandle* train_out, GcphDatasetHandle* test_out);

int gcph_dataset_num_records(GcphDatasetHandle ds, int64_t* out);
int gcph_dataset_num_features(GcphDatasetHandle ds, int64_t* out);

/* {"n","num_features","feature_names","num_events","censor_rate",
    "time_quantiles":{"p25","p50","p75"},"has_truth","fingerprint"} */
int gcph_dataset_info_json(GcphDatasetHandle ds, const char** out);

int gcph_dataset_free(GcphDatasetHandle ds);

/* config: {"num_intervals":5,"order":3,"learning_rate":0.01,"max_steps":2000,
            "seed":0,"linear_only":false,"init_coeff_sd":0.1,
            "mu1":1,"mu2":10,"gamma":0.1}
   train_log_csv_out (optional): "step,nll,l1,entropy,total" lines. */
int gcph_train(GcphDatasetHandle train, const char* config_json,
               GcphModelHandle* model_out, const char** train_log_csv_out);

int gcph_model_save(GcphModelHandle m, const char* path);
int gcph_model_load(const char* path, GcphModelHandle* out);
int gcph_model_to_json(GcphModelHandle m, const char** out);

/* Log-risk of one raw (unstandardized) covariate row. */
int gcph_model_predict(GcphModelHandle m, const double* raw_row, int64_t len,
                       double* log_risk_out);

/* Total of the per-activation L1 norms over the dataset's covariates. */
int gcph_model_l1(GcphModelHandle m, GcphDatasetHandle ds, double* total_l1_out);

/* Per-feature activation curves on n_points uniform points over each
   feature's training range:
   {"features":[{"index","name","x_raw":[..],"x_std":[..],"phi":[..]}]} */
int gcph_model_curves_json(GcphModelHandle m, int64_t n_points, const char** out);

int gcph_model_free(GcphModelHandle m);

/* options: {"oracle":false,"classic_c_index":false}. With "oracle":true the
   datasets' ground-truth columns are used as risk scores and `m` may be NULL.
   Output: {"horizons":[{"horizon_label","horizon_t","c_index","brier"}],
            "c_index_untruncated", ...}; undefined metrics are null cells with
   a *_reason field. */
int gcph_evaluate(GcphModelHandle m, GcphDatasetHandle train, GcphDatasetHandle test,
                  const char* options_json, const char** metrics_json_out);

/* options: {"decimals":2,"n_points":201}
   Output: {"formula","terms":[{"feature","candidate","alpha","r2"}],
            "dropped":[..],"constant"} */
int gcph_symbolify(GcphModelHandle m, const char* options_json,
                   const char** result_json_out);

#ifdef __cplusplus
}
#endif

#endif /* GCPH_H */
