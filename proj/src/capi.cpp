// Copyright 2026 ODC library developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "odc/odc.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "odc/dataset.hpp"
#include "odc/errors.hpp"
#include "odc/experiment.hpp"
#include "odc/metrics.hpp"
#include "odc/model.hpp"
#include "odc/serialize.hpp"
#include "odc/version.hpp"

struct odc_dataset {
  odc::Dataset data;
};

struct odc_model {
  odc::OdcModel model;
};

namespace {

using json = nlohmann::json;

thread_local std::string g_last_error;

template <typename Fn>
odc_status guarded(Fn&& fn) {
  try {
    fn();
    return ODC_OK;
  } catch (const odc::Error& e) {
    g_last_error = e.what();
    return static_cast<odc_status>(static_cast<int>(e.code()));
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return ODC_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ODC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ODC_ERR_INTERNAL;
  }
}

void need(bool ok, const char* what) {
  odc::require(ok, odc::ErrorCode::invalid_argument, what);
}

json parse_json_text(const char* text, const char* what) {
  need(text != nullptr, "JSON text is null");
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    odc::fail(odc::ErrorCode::config_error,
              std::string(what) + " is not valid JSON");
  }
  return doc;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

/// Flat training config: geometry, machine/clustering choice, run
/// controls, and hyper-parameter overrides all at one level.
struct TrainConfig {
  odc::OdcConfig config;
  odc::HyperParams hyper;
  std::uint64_t seed = 0;
  int threads = 1;
};

TrainConfig parse_train_config(const json& doc) {
  static constexpr const char* kHyperKeys[] = {
      "preset",      "rho_x2",       "rho_y2",           "lambda_x",
      "lambda_y",    "sigma_n2",     "sigma_n2_default", "rulsif_alpha",
      "rulsif_tau2", "rulsif_nu",    "squared_norm"};
  static constexpr const char* kOwnKeys[] = {"M",      "p",       "t",
                                             "kprime", "machine", "clustering",
                                             "seed",   "threads"};
  json hyper_doc = json::object();
  for (const auto& item : doc.items()) {
    bool known = false;
    for (const char* key : kOwnKeys) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    for (const char* key : kHyperKeys) {
      if (item.key() == key) {
        hyper_doc[item.key()] = item.value();
        known = true;
        break;
      }
    }
    if (!known) {
      odc::fail(odc::ErrorCode::config_error,
                "unknown key '" + item.key() + "' in train config");
    }
  }

  TrainConfig out;
  out.hyper = odc::parse_hyper_params(hyper_doc);
  if (doc.contains("M")) out.config.M = doc.at("M").get<int>();
  if (doc.contains("p")) out.config.p = doc.at("p").get<double>();
  if (doc.contains("t")) out.config.t = doc.at("t").get<double>();
  if (doc.contains("kprime")) out.config.kprime = doc.at("kprime").get<int>();
  if (doc.contains("machine")) {
    out.config.machine =
        odc::machine_kind_from_string(doc.at("machine").get<std::string>());
  }
  if (doc.contains("clustering")) {
    out.config.clustering = odc::clustering_kind_from_string(
        doc.at("clustering").get<std::string>());
  }
  if (doc.contains("seed")) out.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("threads")) out.threads = doc.at("threads").get<int>();
  odc::require(out.threads >= 1, odc::ErrorCode::config_error,
               "threads must be >= 1");
  return out;
}

}  // namespace

extern "C" {

const char* odc_version(void) { return odc::kVersionString; }

const char* odc_last_error(void) { return g_last_error.c_str(); }

void odc_string_free(char* s) { delete[] s; }

odc_status odc_dataset_load_csv(const char* features_path,
                                const char* outputs_path, odc_dataset** out) {
  return guarded([&] {
    need(features_path && out, "null argument");
    auto handle = std::make_unique<odc_dataset>();
    if (outputs_path && *outputs_path) {
      handle->data = odc::load_dataset(features_path, outputs_path);
    } else {
      handle->data.X =
          odc::load_csv_matrix(features_path, &handle->data.feature_names);
      handle->data.Y.resize(handle->data.X.rows(), 0);
    }
    *out = handle.release();
  });
}

odc_status odc_dataset_synth(const char* spec_json, odc_dataset** out) {
  return guarded([&] {
    need(out != nullptr, "null output pointer");
    const json doc = spec_json && *spec_json
                         ? parse_json_text(spec_json, "synth spec")
                         : json::object();
    auto handle = std::make_unique<odc_dataset>();
    handle->data = odc::synth_dataset(odc::parse_synth_spec(doc));
    *out = handle.release();
  });
}

odc_status odc_dataset_from_arrays(const double* X, const double* Y, int64_t n,
                                   int64_t d_x, int64_t d_y,
                                   odc_dataset** out) {
  return guarded([&] {
    need(X && Y && out, "null argument");
    need(n >= 1 && d_x >= 1 && d_y >= 1, "dimensions must be positive");
    auto handle = std::make_unique<odc_dataset>();
    handle->data.X.resize(n, d_x);
    handle->data.Y.resize(n, d_y);
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t j = 0; j < d_x; ++j) handle->data.X(i, j) = X[i * d_x + j];
      for (int64_t j = 0; j < d_y; ++j) handle->data.Y(i, j) = Y[i * d_y + j];
    }
    *out = handle.release();
  });
}

odc_status odc_dataset_dims(const odc_dataset* data, int64_t* n, int64_t* d_x,
                            int64_t* d_y) {
  return guarded([&] {
    need(data != nullptr, "null dataset");
    if (n) *n = data->data.X.rows();
    if (d_x) *d_x = data->data.X.cols();
    if (d_y) *d_y = data->data.Y.cols();
  });
}

odc_status odc_dataset_copy(const odc_dataset* data, double* X_out,
                            double* Y_out) {
  return guarded([&] {
    need(data != nullptr, "null dataset");
    if (X_out) {
      const odc::Matrix& X = data->data.X;
      for (odc::Index i = 0; i < X.rows(); ++i) {
        for (odc::Index j = 0; j < X.cols(); ++j) {
          X_out[i * X.cols() + j] = X(i, j);
        }
      }
    }
    if (Y_out) {
      const odc::Matrix& Y = data->data.Y;
      for (odc::Index i = 0; i < Y.rows(); ++i) {
        for (odc::Index j = 0; j < Y.cols(); ++j) {
          Y_out[i * Y.cols() + j] = Y(i, j);
        }
      }
    }
  });
}

void odc_dataset_free(odc_dataset* data) { delete data; }

odc_status odc_train(const odc_dataset* data, const char* config_json,
                     odc_model** out) {
  return guarded([&] {
    need(data && out, "null argument");
    const json doc = config_json && *config_json
                         ? parse_json_text(config_json, "train config")
                         : json::object();
    const TrainConfig cfg = parse_train_config(doc);
    auto handle = std::make_unique<odc_model>();
    handle->model =
        odc::train_odc_model(data->data.X, data->data.Y, cfg.config, cfg.hyper,
                             cfg.seed, cfg.threads);
    handle->model.feature_names = data->data.feature_names;
    handle->model.output_names = data->data.output_names;
    *out = handle.release();
  });
}

odc_status odc_model_save(const odc_model* model, const char* path) {
  return guarded([&] {
    need(model && path, "null argument");
    odc::save_model(model->model, path);
  });
}

odc_status odc_model_load(const char* path, odc_model** out) {
  return guarded([&] {
    need(path && out, "null argument");
    auto handle = std::make_unique<odc_model>();
    handle->model = odc::load_model(path);
    *out = handle.release();
  });
}

void odc_model_free(odc_model* model) { delete model; }

odc_status odc_model_manifest_json(const odc_model* model, char** out) {
  return guarded([&] {
    need(model && out, "null argument");
    *out = dup_string(odc::model_manifest(model->model).dump(2));
  });
}

odc_status odc_model_inspect(const char* path, char** out) {
  return guarded([&] {
    need(path && out, "null argument");
    *out = dup_string(odc::inspect_model(path));
  });
}

odc_status odc_model_dims(const odc_model* model, int64_t* d_x, int64_t* d_y,
                          int64_t* num_subdomains) {
  return guarded([&] {
    need(model != nullptr, "null model");
    if (d_x) *d_x = model->model.d_x;
    if (d_y) *d_y = model->model.d_y;
    if (num_subdomains) {
      *num_subdomains = static_cast<int64_t>(model->model.subdomains.size());
    }
  });
}

odc_status odc_predict(const odc_model* model, const double* x, int64_t d_x,
                       double* y_out, int64_t d_y) {
  return guarded([&] {
    need(model && x && y_out, "null argument");
    need(d_x == model->model.d_x, "query dimension does not match the model");
    need(d_y == model->model.d_y, "output buffer does not match the model");
    odc::Vector xv(d_x);
    for (int64_t j = 0; j < d_x; ++j) xv(j) = x[j];
    const odc::Vector y = odc::odc_predict(model->model, xv);
    for (int64_t j = 0; j < d_y; ++j) y_out[j] = y(j);
  });
}

odc_status odc_predict_batch(const odc_model* model, const double* X,
                             int64_t n, int64_t d_x, double* Y_out,
                             int64_t d_y, int threads) {
  return guarded([&] {
    need(model && X && Y_out, "null argument");
    need(n >= 1, "batch must contain at least one row");
    need(d_x == model->model.d_x, "query dimension does not match the model");
    need(d_y == model->model.d_y, "output buffer does not match the model");
    need(threads >= 1, "threads must be >= 1");
    odc::Matrix Xm(n, d_x);
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t j = 0; j < d_x; ++j) Xm(i, j) = X[i * d_x + j];
    }
    odc::PredictOptions options;
    options.threads = threads;
    const odc::Matrix Y = odc::odc_predict_batch(model->model, Xm, options);
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t j = 0; j < d_y; ++j) Y_out[i * d_y + j] = Y(i, j);
    }
  });
}

odc_status odc_metric_angle(const double* y_hat, const double* y_true,
                            int64_t dim, double* out) {
  return guarded([&] {
    need(y_hat && y_true && out, "null argument");
    need(dim >= 1, "dim must be positive");
    odc::Vector a(dim), b(dim);
    for (int64_t j = 0; j < dim; ++j) {
      a(j) = y_hat[j];
      b(j) = y_true[j];
    }
    *out = odc::angle_error(a, b);
  });
}

odc_status odc_metric_euclid(const double* y_hat, const double* y_true,
                             int64_t dim, int64_t joints, double* out) {
  return guarded([&] {
    need(y_hat && y_true && out, "null argument");
    need(dim >= 1, "dim must be positive");
    odc::Vector a(dim), b(dim);
    for (int64_t j = 0; j < dim; ++j) {
      a(j) = y_hat[j];
      b(j) = y_true[j];
    }
    *out = odc::euclid_error(a, b, static_cast<int>(joints));
  });
}

odc_status odc_run_experiment(const char* config_json, char** report_json) {
  return guarded([&] {
    const json doc = config_json && *config_json
                         ? parse_json_text(config_json, "experiment config")
                         : json::object();
    const odc::ExperimentConfig config = odc::parse_experiment_config(doc);
    const odc::Report report = odc::run_experiment(config);
    if (!config.output_path.empty()) {
      odc::write_report(report, config.output_path, config.format);
    }
    if (report_json) {
      *report_json = dup_string(odc::report_to_json(report).dump(2));
    }
  });
}

odc_status odc_speedup_bench(const char* config_json, char** out) {
  return guarded([&] {
    const json doc = config_json && *config_json
                         ? parse_json_text(config_json, "bench config")
                         : json::object();
    const odc::BenchConfig config = odc::parse_bench_config(doc);
    const odc::BenchResult result = odc::speedup_bench(config);
    if (out) *out = dup_string(odc::bench_to_json(result).dump(2));
  });
}

} /* extern "C" */
