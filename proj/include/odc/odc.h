/*
 * Copyright 2026 ODC library developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the ODC local-regression library.
 *
 * All functions return odc_status; every non-OK return leaves a message
 * retrievable via odc_last_error() (thread-local).  Objects are opaque
 * handles that must be released with their matching *_free function.
 * Configuration crosses the boundary as JSON text; numeric data as
 * row-major double arrays.
 */

#ifndef ODC_ODC_H_
#define ODC_ODC_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum odc_status {
  ODC_OK = 0,
  ODC_ERR_INVALID_ARGUMENT = 1,
  ODC_ERR_CONFIG = 2,
  ODC_ERR_DATA = 3,
  ODC_ERR_IO = 4,
  ODC_ERR_CORRUPT_MODEL = 5,
  ODC_ERR_VERSION_MISMATCH = 6,
  ODC_ERR_SINGULAR_MATRIX = 7,
  ODC_ERR_NUMERIC = 8,
  ODC_ERR_INTERNAL = 9
} odc_status;

typedef struct odc_dataset odc_dataset; /* opaque */
typedef struct odc_model odc_model;     /* opaque */

/* Library version string, e.g. "1.0.0". Static storage; do not free. */
const char* odc_version(void);

/* Message of the most recent failure on this thread ("" if none).
 * Valid until the next failing call on the same thread; do not free. */
const char* odc_last_error(void);

/* Frees a string returned by the *_json functions below. */
void odc_string_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

/* outputs_path may be NULL or empty: the dataset then carries features
 * only (d_y = 0), which is enough for prediction inputs. */
odc_status odc_dataset_load_csv(const char* features_path,
                                const char* outputs_path,
                                odc_dataset** out);

/* spec_json: {"kind":"manifold"|"blobs","n":...,"d_x":...,"d_y":...,
 *             "noise":...,"seed":...,"blobs":...} (all optional). */
odc_status odc_dataset_synth(const char* spec_json, odc_dataset** out);

/* Wraps caller arrays (copied): X is n*d_x row-major, Y is n*d_y. */
odc_status odc_dataset_from_arrays(const double* X, const double* Y,
                                   int64_t n, int64_t d_x, int64_t d_y,
                                   odc_dataset** out);

odc_status odc_dataset_dims(const odc_dataset* data, int64_t* n,
                            int64_t* d_x, int64_t* d_y);

/* Copies the dataset into caller buffers (row-major; X_out holds n*d_x
 * doubles, Y_out n*d_y).  Either pointer may be NULL to skip it. */
odc_status odc_dataset_copy(const odc_dataset* data, double* X_out,
                            double* Y_out);

void odc_dataset_free(odc_dataset* data);

/* ---- training / persistence ------------------------------------------- */

/* config_json keys: M, p, t, kprime, machine ("gpr"|"tgp"|"iwtgp"),
 * clustering ("ab"|"imda"|"rpc"), seed, threads, preset, and any
 * hyper-parameter overrides (rho_x2, rho_y2, lambda_x, lambda_y,
 * sigma_n2, rulsif_alpha, rulsif_tau2, rulsif_nu, squared_norm). */
odc_status odc_train(const odc_dataset* data, const char* config_json,
                     odc_model** out);

odc_status odc_model_save(const odc_model* model, const char* path);
odc_status odc_model_load(const char* path, odc_model** out);
void odc_model_free(odc_model* model);

/* Manifest of a trained model (JSON; caller frees with odc_string_free). */
odc_status odc_model_manifest_json(const odc_model* model, char** out);

/* Manifest of an archive on disk without loading the matrix payload. */
odc_status odc_model_inspect(const char* path, char** out);

/* ---- prediction -------------------------------------------------------- */

odc_status odc_model_dims(const odc_model* model, int64_t* d_x, int64_t* d_y,
                          int64_t* num_subdomains);

/* x: d_x values; y_out: buffer for d_y values. */
odc_status odc_predict(const odc_model* model, const double* x, int64_t d_x,
                       double* y_out, int64_t d_y);

/* X: n*d_x row-major; Y_out: buffer for n*d_y row-major results. */
odc_status odc_predict_batch(const odc_model* model, const double* X,
                             int64_t n, int64_t d_x, double* Y_out,
                             int64_t d_y, int threads);

/* ---- metrics ----------------------------------------------------------- */

/* Mean wrapped per-dimension angular difference, degrees in [0, 180]. */
odc_status odc_metric_angle(const double* y_hat, const double* y_true,
                            int64_t dim, double* out);

/* Mean per-block Euclidean distance over `joints` equal blocks. */
odc_status odc_metric_euclid(const double* y_hat, const double* y_true,
                             int64_t dim, int64_t joints, double* out);

/* ---- harness ----------------------------------------------------------- */

/* Runs a sweep described by config_json (see the CLI documentation for
 * the schema); writes the report to the configured output path and
 * returns it as JSON in *report_json (caller frees). */
odc_status odc_run_experiment(const char* config_json, char** report_json);

/* Precomputed-vs-per-query timing benchmark; result JSON in *out. */
odc_status odc_speedup_bench(const char* config_json, char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ODC_ODC_H_ */
