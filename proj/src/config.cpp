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

#include "odc/config.hpp"

#include <cmath>

#include "odc/errors.hpp"

namespace odc {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::data_error: return "data_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::corrupt_model: return "corrupt_model";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::singular_matrix: return "singular_matrix";
    case ErrorCode::numeric_error: return "numeric_error";
    case ErrorCode::internal_error: return "internal_error";
  }
  return "unknown";
}

MachineKind machine_kind_from_string(const std::string& name) {
  if (name == "gpr") return MachineKind::gpr;
  if (name == "tgp") return MachineKind::tgp;
  if (name == "iwtgp") return MachineKind::iwtgp;
  fail(ErrorCode::config_error,
       "unknown machine kind '" + name + "' (expected gpr, tgp, or iwtgp)");
}

const char* machine_kind_name(MachineKind kind) {
  switch (kind) {
    case MachineKind::gpr: return "gpr";
    case MachineKind::tgp: return "tgp";
    case MachineKind::iwtgp: return "iwtgp";
  }
  return "unknown";
}

ClusteringKind clustering_kind_from_string(const std::string& name) {
  if (name == "ab") return ClusteringKind::ab;
  if (name == "imda") return ClusteringKind::imda;
  if (name == "rpc") return ClusteringKind::rpc;
  fail(ErrorCode::config_error,
       "unknown clustering kind '" + name + "' (expected ab, imda, or rpc)");
}

const char* clustering_kind_name(ClusteringKind kind) {
  switch (kind) {
    case ClusteringKind::ab: return "ab";
    case ClusteringKind::imda: return "imda";
    case ClusteringKind::rpc: return "rpc";
  }
  return "unknown";
}

void HyperParams::validate(int d_y) const {
  require(rho_x2 > 0.0, ErrorCode::config_error, "rho_x2 must be > 0");
  require(rho_y2 > 0.0, ErrorCode::config_error, "rho_y2 must be > 0");
  require(lambda_x >= 0.0, ErrorCode::config_error, "lambda_x must be >= 0");
  require(lambda_y >= 0.0, ErrorCode::config_error, "lambda_y must be >= 0");
  require(sigma_n2_default >= 0.0, ErrorCode::config_error,
          "sigma_n2 must be >= 0");
  if (sigma_n2.size() > 0) {
    require(sigma_n2.size() == 1 || sigma_n2.size() == d_y,
            ErrorCode::config_error,
            "sigma_n2 must be a scalar or have one entry per output dim");
    require((sigma_n2.array() >= 0.0).all(), ErrorCode::config_error,
            "sigma_n2 entries must be >= 0");
  }
  require(rulsif_alpha >= 0.0 && rulsif_alpha < 1.0, ErrorCode::config_error,
          "rulsif_alpha must lie in [0, 1)");
  require(rulsif_nu > 0.0, ErrorCode::config_error, "rulsif_nu must be > 0");
}

double HyperParams::sigma_n2_for(Index j) const {
  if (sigma_n2.size() == 0) return sigma_n2_default;
  if (sigma_n2.size() == 1) return sigma_n2(0);
  require(j >= 0 && j < sigma_n2.size(), ErrorCode::invalid_argument,
          "sigma_n2_for: output dim out of range");
  return sigma_n2(j);
}

HyperParams hyper_preset(const std::string& name) {
  HyperParams h;
  if (name == "poser") {
    h.rho_x2 = 5.0;
    h.rho_y2 = 5000.0;
    h.lambda_x = h.lambda_y = 1e-4;
  } else if (name == "humaneva") {
    h.rho_x2 = 5.0;
    h.rho_y2 = 500000.0;
    h.lambda_x = h.lambda_y = 1e-3;
  } else if (name == "human36m") {
    h.rho_x2 = 5.0;
    h.rho_y2 = 500000.0;
    h.lambda_x = h.lambda_y = 1e-3;
  } else {
    fail(ErrorCode::config_error,
         "unknown hyper-parameter preset '" + name +
             "' (expected poser, humaneva, or human36m)");
  }
  return h;
}

void OdcConfig::validate() const {
  require(M >= 1, ErrorCode::config_error, "M must be >= 1");
  require(t >= 1.0, ErrorCode::config_error, "t must be >= 1");
  require(kprime >= 1, ErrorCode::config_error, "kprime must be >= 1");
  // p may reach at most 1 - 1/M: at least one core point per subdomain.
  const double p_max = 1.0 - 1.0 / static_cast<double>(M);
  require(p >= 0.0 && p <= p_max + 1e-12, ErrorCode::config_error,
          "p must lie in [0, 1 - 1/M]");
}

int OdcConfig::derived_K(int N) const {
  require(N >= 1, ErrorCode::invalid_argument, "derived_K: N must be >= 1");
  const double per_cluster = (1.0 - p) * static_cast<double>(M);
  // ceil() on the exact ratio; the epsilon absorbs the float rounding of
  // (1-p)*M (e.g. p = 0.9, M = 200 must give exactly K = N/20).
  const double ratio = static_cast<double>(N) / per_cluster;
  int K = static_cast<int>(std::ceil(ratio - 1e-9));
  if (K < 1) K = 1;
  return K;
}

int OdcConfig::ring_size() const {
  if (p <= 0.0) return 0;
  const double raw = t * p / (1.0 - p);
  return static_cast<int>(std::ceil(raw - 1e-9));
}

}  // namespace odc
