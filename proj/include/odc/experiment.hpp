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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "odc/dataset.hpp"
#include "odc/model.hpp"

namespace odc {

/// Where the experiment data comes from: CSV files (with either a
/// dedicated test pair or a held-out fraction) or a generated dataset.
struct DataSpec {
  bool use_synth = true;
  SynthSpec synth;
  std::string features_path;
  std::string outputs_path;
  std::string test_features_path;  ///< optional explicit test pair
  std::string test_outputs_path;
  double test_fraction = 0.2;  ///< used when no explicit test pair

  /// Resolves to a train/test pair (loads or generates, then splits).
  SplitDataset resolve(std::uint64_t seed) const;
};

/// Full description of a sweep run.  Single-value lists make it a
/// single train/predict cell.
struct ExperimentConfig {
  DataSpec data;
  std::vector<int> M_values{100};
  std::vector<double> p_values{0.0};
  std::vector<double> t_values{1.0};
  std::vector<int> kprime_values{1};
  MachineKind machine = MachineKind::tgp;
  ClusteringKind clustering = ClusteringKind::ab;
  HyperParams hyper;
  std::string metric = "euclid";  ///< "euclid" | "angle"
  int joints = 0;                 ///< block count for euclid; 0 = auto
  std::uint64_t seed = 0;
  int threads = 1;
  bool deterministic = false;  ///< forces threads = 1
  std::string output_path;     ///< report destination ("" = stdout only)
  std::string format = "csv";  ///< "csv" | "json"
};

/// Parses a config JSON document (unknown keys fail with config_error;
/// scalar values are accepted where lists are expected).
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

/// Shared JSON sub-parsers (unknown keys fail with config_error).
SynthSpec parse_synth_spec(const nlohmann::json& doc);
HyperParams parse_hyper_params(const nlohmann::json& doc);

/// One sweep cell.  Times are seconds: t_c covers clustering + cover +
/// machine precomputation, predict_time is the whole test batch, t_p is
/// predict_time per query.  An infeasible cell keeps NaN metrics and a
/// non-empty skip_reason instead of aborting the sweep.
struct SweepRow {
  int M = 0;
  double p = 0.0;
  double t = 1.0;
  int kprime = 1;
  double error = std::numeric_limits<double>::quiet_NaN();
  double t_c = std::numeric_limits<double>::quiet_NaN();
  double t_p = std::numeric_limits<double>::quiet_NaN();
  double predict_time = std::numeric_limits<double>::quiet_NaN();
  std::string skip_reason;
};

struct Report {
  std::vector<SweepRow> rows;  ///< nested sweep order: M, p, t, kprime
  std::string metric;
  int n_train = 0;
  int n_test = 0;
};

/// Runs every sweep cell on a shared train/test split.
Report run_experiment(const ExperimentConfig& config);

std::string report_to_csv(const Report& report);
nlohmann::json report_to_json(const Report& report);
void write_report(const Report& report, const std::string& path,
                  const std::string& format);

/// Head-to-head timing of precomputed cover prediction vs the per-query
/// nearest-neighbor baseline, over a list of subdomain sizes.
struct BenchConfig {
  std::vector<int> M_values{100, 200, 400};
  int n_train = 4000;
  int n_test = 200;
  int d_x = 10;
  int d_y = 3;
  double p = 0.5;
  double t = 1.0;
  int kprime = 1;
  MachineKind machine = MachineKind::tgp;
  HyperParams hyper;
  std::uint64_t seed = 0;
  int warmup = 5;       ///< unmeasured leading queries per timing loop
  int timing_reps = 3;  ///< timed passes per cell; the fastest pass is kept
};

BenchConfig parse_bench_config(const nlohmann::json& doc);

struct BenchRow {
  int M = 0;
  double odc_per_query = 0.0;  ///< seconds
  double nn_per_query = 0.0;
  double ratio = 0.0;  ///< nn / odc
  double error_odc = 0.0;
  double error_nn = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  double odc_slope = 0.0;  ///< log-log cost exponent over M
  double nn_slope = 0.0;
};

BenchResult speedup_bench(const BenchConfig& config);
std::string bench_to_csv(const BenchResult& result);
nlohmann::json bench_to_json(const BenchResult& result);

}  // namespace odc
