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

#include <doctest.h>

#include <json.hpp>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "odc/errors.hpp"
#include "odc/experiment.hpp"

namespace {

using nlohmann::json;

json tiny_sweep_doc() {
  return json{
      {"data",
       {{"synth",
         {{"kind", "manifold"},
          {"n", 120},
          {"d_x", 3},
          {"d_y", 2},
          {"noise", 0.01},
          {"seed", 4}}},
        {"test_fraction", 0.2}}},
      {"M", {24}},
      {"p", {0.0, 0.5}},
      {"t", 1.0},
      {"kprime", {1, 2}},
      {"machine", "gpr"},
      {"clustering", "ab"},
      {"hyper",
       {{"rho_x2", 2.0},
        {"rho_y2", 20.0},
        {"sigma_n2", 1e-4}}},
      {"metric", "euclid"},
      {"seed", 1},
  };
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config parsing: defaults, scalars, and lists") {
  const auto config = odc::parse_experiment_config(tiny_sweep_doc());
  CHECK(config.M_values == std::vector<int>{24});
  CHECK(config.p_values == std::vector<double>{0.0, 0.5});
  // A bare scalar is promoted to a one-element list.
  CHECK(config.t_values == std::vector<double>{1.0});
  CHECK(config.kprime_values == std::vector<int>{1, 2});
  CHECK(config.machine == odc::MachineKind::gpr);
  CHECK(config.clustering == odc::ClusteringKind::ab);
  CHECK(config.metric == "euclid");
  CHECK(config.hyper.rho_x2 == 2.0);
  CHECK(config.hyper.rho_y2 == 20.0);
  CHECK(config.data.use_synth);
  CHECK(config.data.synth.n == 120);
  CHECK(config.data.test_fraction == 0.2);
  CHECK(config.format == "csv");
  CHECK(config.threads == 1);

  // Round trip through the emitter.
  const auto back = odc::parse_experiment_config(
      odc::experiment_config_to_json(config));
  CHECK(back.M_values == config.M_values);
  CHECK(back.p_values == config.p_values);
  CHECK(back.machine == config.machine);
  CHECK(back.data.synth.seed == config.data.synth.seed);
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
  auto doc = tiny_sweep_doc();
  doc["surprise"] = 1;
  CHECK_THROWS_WITH_AS(odc::parse_experiment_config(doc),
                       doctest::Contains("surprise"), odc::Error);

  auto bad_machine = tiny_sweep_doc();
  bad_machine["machine"] = "svm";
  CHECK_THROWS_AS(odc::parse_experiment_config(bad_machine), odc::Error);

  auto bad_format = tiny_sweep_doc();
  bad_format["format"] = "xml";
  CHECK_THROWS_AS(odc::parse_experiment_config(bad_format), odc::Error);

  auto bad_synth = tiny_sweep_doc();
  bad_synth["data"]["synth"]["weird"] = true;
  CHECK_THROWS_WITH_AS(odc::parse_experiment_config(bad_synth),
                       doctest::Contains("weird"), odc::Error);

  auto bad_hyper = tiny_sweep_doc();
  bad_hyper["hyper"]["rho"] = 1.0;
  CHECK_THROWS_AS(odc::parse_experiment_config(bad_hyper), odc::Error);

  // CSV data requires both paths.
  json csv_doc = tiny_sweep_doc();
  csv_doc["data"] = {{"kind", "csv"}, {"features", "/tmp/x.csv"}};
  CHECK_THROWS_AS(odc::parse_experiment_config(csv_doc), odc::Error);
}

TEST_CASE("a sweep visits every cell and skips infeasible ones in place") {
  auto doc = tiny_sweep_doc();
  // With n = 120 and test_fraction 0.2 the training side has 96 rows:
  // M = 24, p = 0 gives K = 4, so kprime = 8 cannot run.
  doc["kprime"] = {1, 8};
  const auto config = odc::parse_experiment_config(doc);
  const auto report = odc::run_experiment(config);
  CHECK(report.n_train == 96);
  CHECK(report.n_test == 24);
  CHECK(report.metric == "euclid");
  REQUIRE(report.rows.size() == 4);  // 1 M x 2 p x 1 t x 2 kprime

  // Nested order: p is the outer of the two varying axes.
  CHECK(report.rows[0].p == 0.0);
  CHECK(report.rows[0].kprime == 1);
  CHECK(report.rows[1].p == 0.0);
  CHECK(report.rows[1].kprime == 8);
  CHECK(report.rows[2].p == 0.5);
  CHECK(report.rows[3].kprime == 8);

  // p = 0: K = 4 < 8 -> skipped with NaN metrics.
  CHECK(report.rows[0].skip_reason.empty());
  CHECK(std::isfinite(report.rows[0].error));
  CHECK(report.rows[0].t_c > 0.0);
  CHECK(report.rows[0].t_p > 0.0);
  CHECK_FALSE(report.rows[1].skip_reason.empty());
  CHECK(report.rows[1].skip_reason.find("kprime 8") != std::string::npos);
  CHECK(std::isnan(report.rows[1].error));
  CHECK(std::isnan(report.rows[1].t_c));
  CHECK(std::isnan(report.rows[1].t_p));
  // p = 0.5: K = 8, so kprime = 8 is feasible again.
  CHECK(report.rows[3].skip_reason.empty());
  CHECK(std::isfinite(report.rows[3].error));
}

TEST_CASE("csv and json reports carry the same numbers") {
  auto doc = tiny_sweep_doc();
  doc["p"] = {0.0};
  doc["kprime"] = {1};
  const auto report = odc::run_experiment(odc::parse_experiment_config(doc));
  REQUIRE(report.rows.size() == 1);

  const std::string csv = odc::report_to_csv(report);
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header ==
        "M,p,t,kprime,error,t_c,t_p,predict_time,skip_reason");
  CHECK(row.rfind("24,0,1,1,", 0) == 0);

  const auto j = odc::report_to_json(report);
  CHECK(j.at("metric").get<std::string>() == "euclid");
  CHECK(j.at("n_train").get<int>() == 96);
  REQUIRE(j.at("rows").size() == 1);
  CHECK(j.at("rows")[0].at("M").get<int>() == 24);
  CHECK(j.at("rows")[0].at("error").get<double>() ==
        doctest::Approx(report.rows[0].error).epsilon(1e-12));

  // write_report produces the same csv on disk.
  const std::string path =
      "/tmp/odc_report_" + std::to_string(::getpid()) + ".csv";
  odc::write_report(report, path, "csv");
  std::ifstream in(path);
  std::stringstream disk;
  disk << in.rdbuf();
  CHECK(disk.str() == csv);
  std::remove(path.c_str());
}

TEST_CASE("identical seeds give identical sweep results") {
  auto doc = tiny_sweep_doc();
  doc["p"] = {0.5};
  doc["kprime"] = {2};
  doc["deterministic"] = true;
  const auto config = odc::parse_experiment_config(doc);
  const auto a = odc::run_experiment(config);
  const auto b = odc::run_experiment(config);
  REQUIRE(a.rows.size() == b.rows.size());
  CHECK(a.rows[0].error == b.rows[0].error);
}

TEST_CASE("bench config parses with overrides and rejects junk") {
  const json doc{{"M", {20, 40}}, {"n_train", 300}, {"n_test", 30},
                 {"d_x", 4},      {"d_y", 2},       {"machine", "gpr"},
                 {"seed", 3},     {"warmup", 1},    {"timing_reps", 2}};
  const auto config = odc::parse_bench_config(doc);
  CHECK(config.M_values == std::vector<int>{20, 40});
  CHECK(config.n_train == 300);
  CHECK(config.machine == odc::MachineKind::gpr);
  CHECK(config.warmup == 1);
  CHECK(config.timing_reps == 2);
  CHECK(odc::parse_bench_config(json::object()).timing_reps == 3);

  json bad = doc;
  bad["mystery"] = 0;
  CHECK_THROWS_WITH_AS(odc::parse_bench_config(bad),
                       doctest::Contains("mystery"), odc::Error);

  json zero_reps = doc;
  zero_reps["timing_reps"] = 0;
  CHECK_THROWS_WITH_AS(odc::parse_bench_config(zero_reps),
                       doctest::Contains("timing_reps"), odc::Error);
}

TEST_CASE("the timing bench produces positive times and both errors") {
  json doc{{"M", {20, 40}}, {"n_train", 240}, {"n_test", 12},
           {"d_x", 3},      {"d_y", 2},       {"machine", "gpr"},
           {"p", 0.5},      {"seed", 3},      {"warmup", 1}};
  const auto result = odc::speedup_bench(odc::parse_bench_config(doc));
  REQUIRE(result.rows.size() == 2);
  for (const auto& row : result.rows) {
    CHECK(row.odc_per_query > 0.0);
    CHECK(row.nn_per_query > 0.0);
    CHECK(row.ratio ==
          doctest::Approx(row.nn_per_query / row.odc_per_query)
              .epsilon(1e-9));
    CHECK(std::isfinite(row.error_odc));
    CHECK(std::isfinite(row.error_nn));
  }
  CHECK(result.rows[0].M == 20);
  CHECK(result.rows[1].M == 40);
  CHECK(std::isfinite(result.odc_slope));
  CHECK(std::isfinite(result.nn_slope));

  const std::string csv = odc::bench_to_csv(result);
  CHECK(csv.find("odc_slope") != std::string::npos);
  const auto j = odc::bench_to_json(result);
  CHECK(j.at("rows").size() == 2);
  CHECK(j.at("odc_slope").is_number());
}

}  // TEST_SUITE
