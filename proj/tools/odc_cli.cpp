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

// Command-line front end.  All numerical work goes through the public C
// API; this file only handles flags, JSON plumbing, and console output.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "odc/odc.h"

namespace {

using json = nlohmann::json;

// Exit codes: 0 success, 2 configuration/usage errors, 3 runtime errors
// (data, I/O, model, numeric).
int exit_code_for(odc_status status) {
  switch (status) {
    case ODC_OK:
      return 0;
    case ODC_ERR_INVALID_ARGUMENT:
    case ODC_ERR_CONFIG:
      return 2;
    default:
      return 3;
  }
}

void check(odc_status status) {
  if (status != ODC_OK) {
    std::cerr << "error: " << odc_last_error() << "\n";
    std::exit(exit_code_for(status));
  }
}

[[noreturn]] void die_config(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  std::exit(2);
}

struct DatasetHandle {
  odc_dataset* ptr = nullptr;
  ~DatasetHandle() { odc_dataset_free(ptr); }
};

struct ModelHandle {
  odc_model* ptr = nullptr;
  ~ModelHandle() { odc_model_free(ptr); }
};

struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { odc_string_free(ptr); }
};

json load_json_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) die_config("cannot open config file '" + path + "'");
  json doc = json::parse(file, nullptr, false);
  if (doc.is_discarded()) die_config("'" + path + "' is not valid JSON");
  return doc;
}

json parse_inline_json(const std::string& text, const std::string& what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) die_config(what + " is not valid JSON");
  return doc;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream file(path);
  if (!file) {
    std::cerr << "error: cannot write '" << path << "'\n";
    std::exit(3);
  }
  file << text;
}

void write_prediction_csv(std::ostream& out, const std::vector<double>& Y,
                          std::size_t n, std::size_t d_y) {
  char buffer[64];
  for (std::size_t j = 0; j < d_y; ++j) {
    out << (j ? ",y" : "y") << j;
  }
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d_y; ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", Y[i * d_y + j]);
      out << (j ? "," : "") << buffer;
    }
    out << '\n';
  }
}

std::string format_seconds(double s) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", s);
  return buffer;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string config_path;
  std::string features, outputs, synth_spec;
  std::string model_out;
  int M = 0;
  double p = -1.0, t = 0.0;
  int kprime = 0;
  std::string machine, clustering, preset;
  std::uint64_t seed = 0;
  int threads = 0;
};

int run_train(const CLI::App& cmd, const TrainArgs& args) {
  json cfg = args.config_path.empty() ? json::object()
                                      : load_json_file(args.config_path);
  if (cmd.count("--subdomain-size")) cfg["M"] = args.M;
  if (cmd.count("--overlap")) cfg["p"] = args.p;
  if (cmd.count("--spread")) cfg["t"] = args.t;
  if (cmd.count("--kprime")) cfg["kprime"] = args.kprime;
  if (cmd.count("--machine")) cfg["machine"] = args.machine;
  if (cmd.count("--clustering")) cfg["clustering"] = args.clustering;
  if (cmd.count("--preset")) cfg["preset"] = args.preset;
  if (cmd.count("--seed")) cfg["seed"] = args.seed;
  if (cmd.count("--threads")) cfg["threads"] = args.threads;

  DatasetHandle data;
  if (!args.synth_spec.empty()) {
    const json spec = parse_inline_json(args.synth_spec, "--synth spec");
    check(odc_dataset_synth(spec.dump().c_str(), &data.ptr));
  } else if (!args.features.empty() && !args.outputs.empty()) {
    check(odc_dataset_load_csv(args.features.c_str(), args.outputs.c_str(),
                               &data.ptr));
  } else {
    die_config("train needs --features plus --outputs, or --synth");
  }

  int64_t n = 0, d_x = 0, d_y = 0;
  check(odc_dataset_dims(data.ptr, &n, &d_x, &d_y));
  if (d_y == 0) die_config("training data has no output columns");

  ModelHandle model;
  check(odc_train(data.ptr, cfg.dump().c_str(), &model.ptr));
  check(odc_model_save(model.ptr, args.model_out.c_str()));

  StringHandle manifest;
  check(odc_model_manifest_json(model.ptr, &manifest.ptr));
  const json info = json::parse(manifest.ptr);
  std::cout << "trained on " << n << " points (d_x=" << d_x << ", d_y=" << d_y
            << "): K=" << info.at("dims").at("K").get<int>() << " subdomains, "
            << "machine=" << info.at("config").at("machine").get<std::string>()
            << ", model written to " << args.model_out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string model_path;
  std::string features, outputs, output_path;
  std::string metric = "euclid";
  int joints = 0;
  int threads = 1;
};

int run_predict(const PredictArgs& args) {
  ModelHandle model;
  check(odc_model_load(args.model_path.c_str(), &model.ptr));
  int64_t d_x = 0, d_y = 0, subdomains = 0;
  check(odc_model_dims(model.ptr, &d_x, &d_y, &subdomains));

  DatasetHandle data;
  check(odc_dataset_load_csv(args.features.c_str(),
                             args.outputs.empty() ? nullptr
                                                  : args.outputs.c_str(),
                             &data.ptr));
  int64_t n = 0, data_dx = 0, data_dy = 0;
  check(odc_dataset_dims(data.ptr, &n, &data_dx, &data_dy));
  if (data_dx != d_x) {
    die_config("feature file has " + std::to_string(data_dx) +
               " columns but the model expects " + std::to_string(d_x));
  }

  std::vector<double> X(static_cast<std::size_t>(n * d_x));
  std::vector<double> Y_true(static_cast<std::size_t>(n * data_dy));
  check(odc_dataset_copy(data.ptr, X.data(),
                         data_dy > 0 ? Y_true.data() : nullptr));

  std::vector<double> Y(static_cast<std::size_t>(n * d_y));
  check(odc_predict_batch(model.ptr, X.data(), n, d_x, Y.data(), d_y,
                          args.threads));

  if (args.output_path.empty()) {
    write_prediction_csv(std::cout, Y, static_cast<std::size_t>(n),
                         static_cast<std::size_t>(d_y));
  } else {
    std::ostringstream buffer;
    write_prediction_csv(buffer, Y, static_cast<std::size_t>(n),
                         static_cast<std::size_t>(d_y));
    write_text_file(args.output_path, buffer.str());
    std::cout << "predictions written to " << args.output_path << "\n";
  }

  if (data_dy > 0) {
    if (data_dy != d_y) {
      die_config("truth file has " + std::to_string(data_dy) +
                 " columns but the model predicts " + std::to_string(d_y));
    }
    double total = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      double value = 0.0;
      if (args.metric == "angle") {
        check(odc_metric_angle(Y.data() + i * d_y, Y_true.data() + i * d_y,
                               d_y, &value));
      } else if (args.metric == "euclid") {
        int64_t joints = args.joints;
        if (joints <= 0) joints = (d_y % 3 == 0) ? d_y / 3 : 1;
        check(odc_metric_euclid(Y.data() + i * d_y, Y_true.data() + i * d_y,
                                d_y, joints, &value));
      } else {
        die_config("--metric must be euclid or angle");
      }
      total += value;
    }
    std::cout << args.metric << " error: "
              << total / static_cast<double>(n) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string config_path;
  std::string output_path, format;
  std::uint64_t seed = 0;
  int threads = 0;
  bool deterministic = false;
};

int run_sweep(const CLI::App& cmd, const SweepArgs& args) {
  json cfg = load_json_file(args.config_path);
  if (cmd.count("--output")) cfg["output"] = args.output_path;
  if (cmd.count("--format")) cfg["format"] = args.format;
  if (cmd.count("--seed")) cfg["seed"] = args.seed;
  if (cmd.count("--threads")) cfg["threads"] = args.threads;
  if (cmd.count("--deterministic")) cfg["deterministic"] = args.deterministic;

  StringHandle report_json;
  check(odc_run_experiment(cfg.dump().c_str(), &report_json.ptr));
  const json report = json::parse(report_json.ptr);

  std::printf("%6s %8s %6s %7s %14s %10s %12s  %s\n", "M", "p", "t", "kprime",
              "error", "t_c[s]", "t_p[s]", "note");
  for (const auto& row : report.at("rows")) {
    const double error = row.at("error").is_number()
                             ? row.at("error").get<double>()
                             : std::nan("");
    const double t_c = row.at("t_c").is_number() ? row.at("t_c").get<double>()
                                                 : std::nan("");
    const double t_p = row.at("t_p").is_number() ? row.at("t_p").get<double>()
                                                 : std::nan("");
    std::printf("%6d %8.3f %6.2f %7d %14.6g %10.3f %12.6f  %s\n",
                row.at("M").get<int>(), row.at("p").get<double>(),
                row.at("t").get<double>(), row.at("kprime").get<int>(), error,
                t_c, t_p, row.at("skip_reason").get<std::string>().c_str());
  }
  if (cfg.contains("output") && !cfg.at("output").get<std::string>().empty()) {
    std::cout << "report written to " << cfg.at("output").get<std::string>()
              << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string config_path;
  std::string output_path;
  std::vector<int> M_values;
  int n_train = 0, n_test = 0;
  std::string machine;
  std::uint64_t seed = 0;
};

int run_bench(const CLI::App& cmd, const BenchArgs& args) {
  json cfg = args.config_path.empty() ? json::object()
                                      : load_json_file(args.config_path);
  if (cmd.count("--subdomain-sizes")) cfg["M"] = args.M_values;
  if (cmd.count("--n-train")) cfg["n_train"] = args.n_train;
  if (cmd.count("--n-test")) cfg["n_test"] = args.n_test;
  if (cmd.count("--machine")) cfg["machine"] = args.machine;
  if (cmd.count("--seed")) cfg["seed"] = args.seed;

  StringHandle result_json;
  check(odc_speedup_bench(cfg.dump().c_str(), &result_json.ptr));
  const json result = json::parse(result_json.ptr);

  std::printf("%6s %16s %16s %8s %12s %12s\n", "M", "precomputed[s]",
              "per-query[s]", "speedup", "err(pre)", "err(query)");
  for (const auto& row : result.at("rows")) {
    std::printf("%6d %16.6f %16.6f %8.2f %12.6g %12.6g\n",
                row.at("M").get<int>(), row.at("odc_per_query").get<double>(),
                row.at("nn_per_query").get<double>(),
                row.at("ratio").get<double>(),
                row.at("error_odc").get<double>(),
                row.at("error_nn").get<double>());
  }
  std::printf("log-log cost slopes: precomputed %.3f, per-query %.3f\n",
              result.at("odc_slope").get<double>(),
              result.at("nn_slope").get<double>());
  if (!args.output_path.empty()) {
    write_text_file(args.output_path, std::string(result_json.ptr) + "\n");
    std::cout << "result written to " << args.output_path << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// inspect-model
// ---------------------------------------------------------------------------

int run_inspect(const std::string& path) {
  StringHandle manifest;
  check(odc_model_inspect(path.c_str(), &manifest.ptr));
  std::cout << manifest.ptr << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local kernel regression over an overlapping subdomain cover"};
  app.require_subcommand(1);
  app.set_version_flag("--version", odc_version());
  app.failure_message(CLI::FailureMessage::help);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand(
      "train", "Cluster, build the cover, precompute machines, save a model");
  train->add_option("--config", train_args.config_path,
                    "JSON config file (flags below override it)");
  train->add_option("--features", train_args.features, "training features CSV");
  train->add_option("--outputs", train_args.outputs, "training outputs CSV");
  train->add_option("--synth", train_args.synth_spec,
                    "inline JSON synthetic-data spec instead of CSVs");
  train->add_option("--model", train_args.model_out, "output model path")
      ->required();
  train->add_option("--subdomain-size", train_args.M, "points per subdomain");
  train->add_option("--overlap", train_args.p,
                    "borrowed fraction per subdomain, in [0, 1 - 1/M]");
  train->add_option("--spread", train_args.t, "donor-ring spread factor");
  train->add_option("--kprime", train_args.kprime,
                    "machines combined per query");
  train->add_option("--machine", train_args.machine, "gpr | tgp | iwtgp");
  train->add_option("--clustering", train_args.clustering, "ab | imda | rpc");
  train->add_option("--preset", train_args.preset,
                    "hyper-parameter preset: poser | humaneva | human36m");
  train->add_option("--seed", train_args.seed, "clustering seed");
  train->add_option("--threads", train_args.threads, "training threads");

  PredictArgs predict_args;
  CLI::App* predict =
      app.add_subcommand("predict", "Predict outputs for a feature CSV");
  predict->add_option("--model", predict_args.model_path, "model path")
      ->required();
  predict->add_option("--features", predict_args.features, "query features CSV")
      ->required();
  predict->add_option("--outputs", predict_args.outputs,
                      "optional truth CSV; prints the error metric");
  predict->add_option("--output", predict_args.output_path,
                      "prediction CSV path (default: stdout)");
  predict->add_option("--metric", predict_args.metric, "euclid | angle");
  predict->add_option("--joints", predict_args.joints,
                      "block count for the euclid metric (0 = auto)");
  predict->add_option("--threads", predict_args.threads, "prediction threads");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Train/evaluate every (M, p, t, kprime) cell of a config");
  sweep->add_option("--config", sweep_args.config_path, "sweep JSON config")
      ->required();
  sweep->add_option("--output", sweep_args.output_path, "report destination");
  sweep->add_option("--format", sweep_args.format, "csv | json");
  sweep->add_option("--seed", sweep_args.seed, "experiment seed");
  sweep->add_option("--threads", sweep_args.threads, "worker threads");
  sweep->add_flag("--deterministic", sweep_args.deterministic,
                  "force single-threaded, bit-reproducible runs");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand(
      "bench", "Time precomputed prediction against the per-query baseline");
  bench->add_option("--config", bench_args.config_path, "bench JSON config");
  bench->add_option("--subdomain-sizes", bench_args.M_values,
                    "subdomain sizes to time");
  bench->add_option("--n-train", bench_args.n_train, "training points");
  bench->add_option("--n-test", bench_args.n_test, "timed queries");
  bench->add_option("--machine", bench_args.machine, "gpr | tgp | iwtgp");
  bench->add_option("--seed", bench_args.seed, "data seed");
  bench->add_option("--output", bench_args.output_path,
                    "write the JSON result here");

  std::string inspect_path;
  CLI::App* inspect = app.add_subcommand(
      "inspect-model", "Print the manifest of a saved model");
  inspect->add_option("path", inspect_path, "model path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (train->parsed()) return run_train(*train, train_args);
  if (predict->parsed()) return run_predict(predict_args);
  if (sweep->parsed()) return run_sweep(*sweep, sweep_args);
  if (bench->parsed()) return run_bench(*bench, bench_args);
  if (inspect->parsed()) return run_inspect(inspect_path);
  return 2;
}
