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

#include <cstdio>
#include <fstream>
#include <string>

#include "helpers.hpp"
#include "odc/errors.hpp"
#include "odc/model.hpp"
#include "odc/serialize.hpp"

namespace {

using odc::Matrix;
using odc::Vector;

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name)
      : path("/tmp/odc_ser_" + std::to_string(::getpid()) + "_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in),
          std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

odc::OdcModel tiny_model(odc::MachineKind kind) {
  Matrix X(60, 2), Y(60, 2);
  odc::Rng rng(1000);
  const double cx[3] = {0.0, 20.0, 0.0};
  const double cy[3] = {0.0, 0.0, 20.0};
  for (int b = 0; b < 3; ++b) {
    for (int i = 0; i < 20; ++i) {
      const int row = b * 20 + i;
      X(row, 0) = cx[b] + rng.uniform(-1.0, 1.0);
      X(row, 1) = cy[b] + rng.uniform(-1.0, 1.0);
      Y(row, 0) = 2.0 * X(row, 0) - X(row, 1);
      Y(row, 1) = X(row, 0) + X(row, 1);
    }
  }
  odc::OdcConfig config;
  config.M = 25;
  config.p = 0.2;
  config.t = 1.0;
  config.kprime = 2;
  config.machine = kind;
  config.clustering = odc::ClusteringKind::ab;
  odc::HyperParams hyper;
  hyper.rho_x2 = 5.0;
  hyper.rho_y2 = 50.0;
  hyper.lambda_x = 1e-4;
  hyper.lambda_y = 1e-4;
  hyper.sigma_n2_default = 1e-6;
  auto model = odc::train_odc_model(X, Y, config, hyper, 17);
  model.feature_names = {"u", "v"};
  model.output_names = {"a", "b"};
  return model;
}

}  // namespace

TEST_SUITE("serialize") {

TEST_CASE("checksum matches the published test vector") {
  const char* probe = "123456789";
  CHECK(odc::crc32(probe, 9) == 0xCBF43926u);
  CHECK(odc::crc32(probe, 0) == 0u);
  // Streaming: feeding the tail with the head's checksum as seed equals
  // one pass over the whole buffer.
  const std::uint32_t head = odc::crc32(probe, 4);
  CHECK(odc::crc32(probe + 4, 5, head) == 0xCBF43926u);
}

TEST_CASE("a save/load round trip reproduces predictions bit for bit") {
  for (odc::MachineKind kind :
       {odc::MachineKind::gpr, odc::MachineKind::tgp,
        odc::MachineKind::iwtgp}) {
    const auto model = tiny_model(kind);
    TempFile file("roundtrip.bin");
    odc::save_model(model, file.path);
    const auto loaded = odc::load_model(file.path);

    CHECK(loaded.N == model.N);
    CHECK(loaded.d_x == model.d_x);
    CHECK(loaded.d_y == model.d_y);
    CHECK(loaded.config.M == model.config.M);
    CHECK(loaded.config.p == model.config.p);
    CHECK(loaded.config.kprime == model.config.kprime);
    CHECK(loaded.config.machine == model.config.machine);
    CHECK(loaded.hyper.rho_x2 == model.hyper.rho_x2);
    CHECK(loaded.hyper.sigma_n2_default == model.hyper.sigma_n2_default);
    CHECK(loaded.clustering.labels == model.clustering.labels);
    CHECK(loaded.feature_names == model.feature_names);
    CHECK(loaded.output_names == model.output_names);
    REQUIRE(loaded.subdomains.size() == model.subdomains.size());
    for (std::size_t i = 0; i < model.subdomains.size(); ++i) {
      CHECK(loaded.subdomains[i].indices == model.subdomains[i].indices);
      CHECK(loaded.subdomains[i].core_size == model.subdomains[i].core_size);
      CHECK((loaded.subdomains[i].prec - model.subdomains[i].prec)
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }

    const Matrix queries =
        odc::test::random_matrix(5, 2, 1400, -1.0, 21.0);
    const Matrix before = odc::odc_predict_batch(model, queries);
    const Matrix after = odc::odc_predict_batch(loaded, queries);
    CHECK((before - after).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("an unknown format version is reported with both numbers") {
  const auto model = tiny_model(odc::MachineKind::gpr);
  TempFile file("version.bin");
  odc::save_model(model, file.path);
  std::string bytes = slurp(file.path);
  REQUIRE(bytes.size() > 12);
  bytes[8] = 99;  // little-endian u32 version right after the magic
  bytes[9] = 0;
  bytes[10] = 0;
  bytes[11] = 0;
  spit(file.path, bytes);
  try {
    odc::load_model(file.path);
    FAIL("expected a version failure");
  } catch (const odc::Error& err) {
    CHECK(err.code() == odc::ErrorCode::version_mismatch);
    CHECK(std::string(err.what()).find("99") != std::string::npos);
    CHECK(std::string(err.what()).find('1') != std::string::npos);
  }
}

TEST_CASE("corruption anywhere in the payload is detected") {
  const auto model = tiny_model(odc::MachineKind::tgp);
  TempFile file("corrupt.bin");
  odc::save_model(model, file.path);
  const std::string clean = slurp(file.path);

  {
    std::string bytes = clean;  // flip a bit in the final payload byte
    bytes.back() = static_cast<char>(bytes.back() ^ 0x40);
    spit(file.path, bytes);
    CHECK_THROWS_AS(odc::load_model(file.path), odc::Error);
  }
  {
    std::string bytes = clean;  // flip a byte in the middle
    bytes[bytes.size() / 2] =
        static_cast<char>(bytes[bytes.size() / 2] ^ 0x01);
    spit(file.path, bytes);
    CHECK_THROWS_AS(odc::load_model(file.path), odc::Error);
  }
  {
    std::string bytes = clean.substr(0, clean.size() * 2 / 3);  // truncated
    spit(file.path, bytes);
    CHECK_THROWS_AS(odc::load_model(file.path), odc::Error);
  }
  {
    std::string bytes = clean;  // wrong magic
    bytes[0] = 'X';
    spit(file.path, bytes);
    try {
      odc::load_model(file.path);
      FAIL("expected a magic failure");
    } catch (const odc::Error& err) {
      CHECK(err.code() == odc::ErrorCode::corrupt_model);
    }
  }
  // The intact file still loads after all that.
  spit(file.path, clean);
  CHECK_NOTHROW(odc::load_model(file.path));
}

TEST_CASE("a syntactically broken manifest is a corrupt model") {
  TempFile file("manifest.bin");
  std::string bytes = "ODCMODEL";
  bytes.push_back(1);  // version 1, little endian
  bytes.push_back(0);
  bytes.push_back(0);
  bytes.push_back(0);
  bytes.push_back(4);  // manifest size 4
  for (int i = 0; i < 7; ++i) bytes.push_back(0);
  bytes += "abcd";  // not JSON
  spit(file.path, bytes);
  try {
    odc::load_model(file.path);
    FAIL("expected a manifest failure");
  } catch (const odc::Error& err) {
    CHECK(err.code() == odc::ErrorCode::corrupt_model);
  }
}

TEST_CASE("inspection returns the manifest without loading blocks") {
  const auto model = tiny_model(odc::MachineKind::iwtgp);
  TempFile file("inspect.bin");
  odc::save_model(model, file.path);
  const std::string text = odc::inspect_model(file.path);
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc.at("format").get<std::string>() == "odc-model");
  CHECK(doc.at("dims").at("N").get<int>() == 60);
  CHECK(doc.at("dims").at("K").get<int>() == model.clustering.K);
  CHECK(doc.contains("blocks"));
  CHECK(doc.at("config").at("machine").get<std::string>() == "iwtgp");

  // The in-memory manifest matches the persisted one apart from the
  // block directory.
  auto mem = odc::model_manifest(model);
  auto disk = doc;
  disk.erase("blocks");
  CHECK(mem == disk);
}

TEST_CASE("io failures surface as such") {
  const auto model = tiny_model(odc::MachineKind::gpr);
  try {
    odc::save_model(model, "/nonexistent_dir/m.bin");
    FAIL("expected an io failure");
  } catch (const odc::Error& err) {
    CHECK(err.code() == odc::ErrorCode::io_error);
  }
  try {
    odc::load_model("/nonexistent_dir/m.bin");
    FAIL("expected an io failure");
  } catch (const odc::Error& err) {
    CHECK(err.code() == odc::ErrorCode::io_error);
  }
}

}  // TEST_SUITE
