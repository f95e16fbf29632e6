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

#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "odc/dataset.hpp"
#include "odc/metrics.hpp"
#include "odc/model.hpp"
#include "odc/odc.h"
#include "odc/version.hpp"

namespace {

using nlohmann::json;

constexpr const char* kSynthSpec =
    R"({"kind":"blobs","n":60,"d_x":2,"d_y":2,"noise":0.5,"seed":7,"blobs":3})";
constexpr const char* kTrainConfig =
    R"({"M":20,"p":0.2,"kprime":2,"machine":"gpr","clustering":"ab",)"
    R"("seed":5,"rho_x2":4.0,"rho_y2":40.0,"sigma_n2":1e-6})";

/// The C++ twin of kSynthSpec / kTrainConfig, built by hand so parity
/// checks do not reuse the C parsing path under test.
odc::Dataset cpp_dataset() {
  odc::SynthSpec spec;
  spec.kind = "blobs";
  spec.n = 60;
  spec.d_x = 2;
  spec.d_y = 2;
  spec.noise = 0.5;
  spec.seed = 7;
  spec.blobs = 3;
  return odc::synth_dataset(spec);
}

odc::OdcModel cpp_model(const odc::Dataset& data) {
  odc::OdcConfig config;
  config.M = 20;
  config.p = 0.2;
  config.kprime = 2;
  config.machine = odc::MachineKind::gpr;
  config.clustering = odc::ClusteringKind::ab;
  odc::HyperParams hyper;
  hyper.rho_x2 = 4.0;
  hyper.rho_y2 = 40.0;
  hyper.sigma_n2.resize(0);
  hyper.sigma_n2_default = 1e-6;
  return odc::train_odc_model(data.X, data.Y, config, hyper, 5, 1);
}

std::string temp_path(const char* name) {
  return "/tmp/odc_capi_" + std::to_string(::getpid()) + "_" + name;
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version string matches the library constant") {
  const char* v = odc_version();
  REQUIRE(v != nullptr);
  CHECK(std::string(v) == odc::kVersionString);
}

TEST_CASE("failures set a status code and a retrievable message") {
  odc_dataset* data = nullptr;
  CHECK(odc_dataset_synth("{not json", &data) == ODC_ERR_CONFIG);
  CHECK(data == nullptr);
  CHECK(std::string(odc_last_error()).find("not valid JSON") !=
        std::string::npos);

  // Unknown keys are named in the message.
  CHECK(odc_dataset_synth(R"({"n_points":5})", &data) == ODC_ERR_CONFIG);
  CHECK(std::string(odc_last_error()).find("n_points") != std::string::npos);

  // Null output pointers are invalid-argument, not crashes.
  CHECK(odc_dataset_synth("{}", nullptr) == ODC_ERR_INVALID_ARGUMENT);
  CHECK(odc_dataset_dims(nullptr, nullptr, nullptr, nullptr) ==
        ODC_ERR_INVALID_ARGUMENT);
  CHECK(odc_train(nullptr, "{}", nullptr) == ODC_ERR_INVALID_ARGUMENT);
  CHECK(odc_model_load("/nonexistent/odc_model.bin", nullptr) ==
        ODC_ERR_INVALID_ARGUMENT);

  odc_model* model = nullptr;
  CHECK(odc_model_load("/nonexistent/odc_model.bin", &model) == ODC_ERR_IO);
  CHECK(model == nullptr);
  CHECK(std::string(odc_last_error()).find("odc_model.bin") !=
        std::string::npos);
}

TEST_CASE("synth datasets match the library generator bit for bit") {
  odc_dataset* data = nullptr;
  REQUIRE(odc_dataset_synth(kSynthSpec, &data) == ODC_OK);
  REQUIRE(data != nullptr);

  int64_t n = 0, d_x = 0, d_y = 0;
  REQUIRE(odc_dataset_dims(data, &n, &d_x, &d_y) == ODC_OK);
  CHECK(n == 60);
  CHECK(d_x == 2);
  CHECK(d_y == 2);

  std::vector<double> X(n * d_x), Y(n * d_y);
  REQUIRE(odc_dataset_copy(data, X.data(), Y.data()) == ODC_OK);
  const odc::Dataset twin = cpp_dataset();
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < d_x; ++j) CHECK(X[i * d_x + j] == twin.X(i, j));
    for (int64_t j = 0; j < d_y; ++j) CHECK(Y[i * d_y + j] == twin.Y(i, j));
  }

  // Either destination may be skipped.
  std::vector<double> X2(n * d_x, -1.0);
  REQUIRE(odc_dataset_copy(data, X2.data(), nullptr) == ODC_OK);
  CHECK(X2 == X);
  odc_dataset_free(data);
}

TEST_CASE("array datasets round trip through the handle") {
  const double X[6] = {1, 2, 3, 4, 5, 6};
  const double Y[3] = {10, 20, 30};
  odc_dataset* data = nullptr;
  REQUIRE(odc_dataset_from_arrays(X, Y, 3, 2, 1, &data) == ODC_OK);
  int64_t n = 0, d_x = 0, d_y = 0;
  REQUIRE(odc_dataset_dims(data, &n, &d_x, &d_y) == ODC_OK);
  CHECK(n == 3);
  CHECK(d_x == 2);
  CHECK(d_y == 1);
  double X_out[6] = {0}, Y_out[3] = {0};
  REQUIRE(odc_dataset_copy(data, X_out, Y_out) == ODC_OK);
  CHECK(std::memcmp(X, X_out, sizeof(X)) == 0);
  CHECK(std::memcmp(Y, Y_out, sizeof(Y)) == 0);
  odc_dataset_free(data);

  CHECK(odc_dataset_from_arrays(nullptr, Y, 3, 2, 1, &data) ==
        ODC_ERR_INVALID_ARGUMENT);
  CHECK(odc_dataset_from_arrays(X, Y, 0, 2, 1, &data) ==
        ODC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("csv loading accepts a features-only file") {
  const std::string path = temp_path("features.csv");
  {
    std::ofstream out(path);
    out << "a,b\n1,2\n3,4\n";
  }
  odc_dataset* data = nullptr;
  REQUIRE(odc_dataset_load_csv(path.c_str(), nullptr, &data) == ODC_OK);
  int64_t n = 0, d_x = 0, d_y = 0;
  REQUIRE(odc_dataset_dims(data, &n, &d_x, &d_y) == ODC_OK);
  CHECK(n == 2);
  CHECK(d_x == 2);
  CHECK(d_y == 0);
  odc_dataset_free(data);
  std::remove(path.c_str());

  CHECK(odc_dataset_load_csv("/nonexistent/x.csv", nullptr, &data) ==
        ODC_ERR_IO);
}

TEST_CASE("training through the C surface matches the library") {
  odc_dataset* data = nullptr;
  REQUIRE(odc_dataset_synth(kSynthSpec, &data) == ODC_OK);
  odc_model* model = nullptr;
  REQUIRE(odc_train(data, kTrainConfig, &model) == ODC_OK);
  REQUIRE(model != nullptr);

  int64_t d_x = 0, d_y = 0, num_subdomains = 0;
  REQUIRE(odc_model_dims(model, &d_x, &d_y, &num_subdomains) == ODC_OK);
  CHECK(d_x == 2);
  CHECK(d_y == 2);
  CHECK(num_subdomains >= 1);

  const odc::Dataset twin_data = cpp_dataset();
  const odc::OdcModel twin = cpp_model(twin_data);
  CHECK(num_subdomains == static_cast<int64_t>(twin.subdomains.size()));

  // Same queries through both surfaces give identical answers.
  const double queries[3][2] = {{0.0, 0.0}, {20.0, 0.0}, {-1.5, 19.0}};
  for (const auto& q : queries) {
    double y[2] = {0, 0};
    REQUIRE(odc_predict(model, q, 2, y, 2) == ODC_OK);
    const odc::Vector yv =
        odc::odc_predict(twin, (odc::Vector(2) << q[0], q[1]).finished());
    CHECK(y[0] == yv(0));
    CHECK(y[1] == yv(1));
  }

  // Batch prediction agrees with the per-query loop.
  double batch[6] = {0, 0, 20, 0, -1.5, 19};
  double Y_batch[6] = {0};
  REQUIRE(odc_predict_batch(model, batch, 3, 2, Y_batch, 2, 1) == ODC_OK);
  for (int i = 0; i < 3; ++i) {
    double y[2] = {0, 0};
    REQUIRE(odc_predict(model, batch + 2 * i, 2, y, 2) == ODC_OK);
    CHECK(Y_batch[2 * i] == y[0]);
    CHECK(Y_batch[2 * i + 1] == y[1]);
  }

  // Dimension mismatches are rejected before any math runs.
  double y3[3] = {0};
  CHECK(odc_predict(model, queries[0], 3, y3, 2) == ODC_ERR_INVALID_ARGUMENT);
  CHECK(odc_predict(model, queries[0], 2, y3, 3) == ODC_ERR_INVALID_ARGUMENT);
  CHECK(odc_predict_batch(model, batch, 0, 2, Y_batch, 2, 1) ==
        ODC_ERR_INVALID_ARGUMENT);
  CHECK(odc_predict_batch(model, batch, 3, 2, Y_batch, 2, 0) ==
        ODC_ERR_INVALID_ARGUMENT);

  // Config errors: malformed JSON, unknown keys, junk values.
  odc_model* reject = nullptr;
  CHECK(odc_train(data, "{oops", &reject) == ODC_ERR_CONFIG);
  CHECK(odc_train(data, R"({"M":20,"mystery":1})", &reject) == ODC_ERR_CONFIG);
  CHECK(std::string(odc_last_error()).find("mystery") != std::string::npos);
  CHECK(odc_train(data, R"({"machine":"svm"})", &reject) == ODC_ERR_CONFIG);
  CHECK(reject == nullptr);

  odc_model_free(model);
  odc_dataset_free(data);
}

TEST_CASE("models survive a save/load round trip with equal answers") {
  odc_dataset* data = nullptr;
  REQUIRE(odc_dataset_synth(kSynthSpec, &data) == ODC_OK);
  odc_model* model = nullptr;
  REQUIRE(odc_train(data, kTrainConfig, &model) == ODC_OK);

  const std::string path = temp_path("model.odc");
  REQUIRE(odc_model_save(model, path.c_str()) == ODC_OK);
  odc_model* loaded = nullptr;
  REQUIRE(odc_model_load(path.c_str(), &loaded) == ODC_OK);
  REQUIRE(loaded != nullptr);

  const double q[2] = {3.0, -2.0};
  double y_orig[2] = {0}, y_loaded[2] = {0};
  REQUIRE(odc_predict(model, q, 2, y_orig, 2) == ODC_OK);
  REQUIRE(odc_predict(loaded, q, 2, y_loaded, 2) == ODC_OK);
  CHECK(y_orig[0] == y_loaded[0]);
  CHECK(y_orig[1] == y_loaded[1]);

  // The in-memory manifest and the on-disk inspection agree.
  char* manifest_text = nullptr;
  REQUIRE(odc_model_manifest_json(model, &manifest_text) == ODC_OK);
  REQUIRE(manifest_text != nullptr);
  const json manifest = json::parse(manifest_text);
  odc_string_free(manifest_text);
  CHECK(manifest.at("format").get<std::string>() == "odc-model");
  CHECK(manifest.at("config").at("machine").get<std::string>() == "gpr");
  CHECK(manifest.at("dims").at("N").get<int>() == 60);

  char* inspect_text = nullptr;
  REQUIRE(odc_model_inspect(path.c_str(), &inspect_text) == ODC_OK);
  const json inspected = json::parse(inspect_text);
  odc_string_free(inspect_text);
  CHECK(inspected.at("dims") == manifest.at("dims"));
  CHECK(inspected.at("config").at("M").get<int>() ==
        manifest.at("config").at("M").get<int>());

  // A truncated archive is reported as corrupt, not mis-loaded.
  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(),
              static_cast<std::streamsize>(bytes.size() * 2 / 3));
  }
  odc_model* corrupt = nullptr;
  CHECK(odc_model_load(path.c_str(), &corrupt) == ODC_ERR_CORRUPT_MODEL);
  CHECK(corrupt == nullptr);

  odc_model_free(model);
  odc_model_free(loaded);
  odc_dataset_free(data);
  std::remove(path.c_str());
}

TEST_CASE("metric wrappers agree with their library twins") {
  const double a[4] = {10.0, 350.0, 1.0, 2.0};
  const double b[4] = {350.0, 10.0, 1.5, 0.5};
  double angle = -1.0, euclid = -1.0;
  REQUIRE(odc_metric_angle(a, b, 4, &angle) == ODC_OK);
  REQUIRE(odc_metric_euclid(a, b, 4, 2, &euclid) == ODC_OK);

  odc::Vector av(4), bv(4);
  for (int j = 0; j < 4; ++j) {
    av(j) = a[j];
    bv(j) = b[j];
  }
  CHECK(angle == odc::angle_error(av, bv));
  CHECK(euclid == odc::euclid_error(av, bv, 2));

  CHECK(odc_metric_angle(nullptr, b, 4, &angle) == ODC_ERR_INVALID_ARGUMENT);
  CHECK(odc_metric_euclid(a, b, 0, 1, &euclid) == ODC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("the harness entry points run end to end") {
  const char* sweep_config =
      R"({"data":{"synth":{"kind":"manifold","n":100,"d_x":3,"d_y":2,)"
      R"("seed":2},"test_fraction":0.2},"M":[20],"p":[0.0],"kprime":[1],)"
      R"("machine":"gpr","hyper":{"rho_x2":2.0,"rho_y2":20.0,)"
      R"("sigma_n2":1e-4},"seed":1})";
  char* report_text = nullptr;
  REQUIRE(odc_run_experiment(sweep_config, &report_text) == ODC_OK);
  REQUIRE(report_text != nullptr);
  const json report = json::parse(report_text);
  odc_string_free(report_text);
  CHECK(report.at("rows").size() == 1);
  CHECK(report.at("rows")[0].at("skip_reason").get<std::string>().empty());

  CHECK(odc_run_experiment(R"({"M":[20],"what":1})", nullptr) ==
        ODC_ERR_CONFIG);

  const char* bench_config =
      R"({"M":[20,40],"n_train":200,"n_test":10,"d_x":3,"d_y":2,)"
      R"("machine":"gpr","warmup":0,"seed":3})";
  char* bench_text = nullptr;
  REQUIRE(odc_speedup_bench(bench_config, &bench_text) == ODC_OK);
  const json bench = json::parse(bench_text);
  odc_string_free(bench_text);
  CHECK(bench.at("rows").size() == 2);
  CHECK(bench.at("rows")[0].at("odc_per_query").get<double>() > 0.0);
  CHECK(bench.at("odc_slope").is_number());
}

}  // TEST_SUITE
