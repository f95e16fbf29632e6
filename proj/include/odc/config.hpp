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

#include <string>

#include "odc/clustering.hpp"
#include "odc/errors.hpp"
#include "odc/types.hpp"

namespace odc {

/// The three local-machine families a model can precompute.
enum class MachineKind { gpr, tgp, iwtgp };

MachineKind machine_kind_from_string(const std::string& name);
const char* machine_kind_name(MachineKind kind);

/// Kernel and regularization settings shared by all machines of a model.
/// rho_x2 / rho_y2 are the full kernel denominators (2*rho^2), stored in
/// that form because the shipped presets quote them that way.
struct HyperParams {
  double rho_x2 = 5.0;   ///< input-kernel denominator 2*rho_x^2
  double rho_y2 = 5000.0;///< output-kernel denominator 2*rho_y^2
  double lambda_x = 1e-4;///< input Gram regularizer
  double lambda_y = 1e-4;///< output Gram regularizer
  Vector sigma_n2;       ///< per-output-dim noise variance (GPR); empty
                         ///< broadcasts sigma_n2_default to every dim
  double sigma_n2_default = 1e-4;
  double rulsif_alpha = 0.1;  ///< relative density-ratio mixing
  double rulsif_tau2 = 0.0;   ///< weight-kernel denominator 2*tau^2; <= 0
                              ///< selects the median-distance heuristic
  double rulsif_nu = 1e-3;    ///< RuLSIF ridge
  bool squared_norm = false;  ///< opt-in squared-exponent kernel variant

  void validate(int d_y) const;
  /// Noise variance for output dim j after broadcasting.
  double sigma_n2_for(Index j) const;
};

/// Named presets ("poser", "humaneva", "human36m") carrying the
/// cross-validated kernel settings for the motion-capture datasets.
HyperParams hyper_preset(const std::string& name);

/// Geometry of a model: subdomain size M, overlap fraction p, overlap
/// spread factor t, and the number K' of machines combined per query.
struct OdcConfig {
  int M = 100;
  double p = 0.0;       ///< fraction of each subdomain borrowed from neighbors
  double t = 1.0;       ///< widens the ring of donor clusters
  int kprime = 1;       ///< machines combined per prediction
  MachineKind machine = MachineKind::tgp;
  ClusteringKind clustering = ClusteringKind::ab;

  /// Throws config_error unless M >= 1, 0 <= p <= 1 - 1/M, t >= 1,
  /// kprime >= 1.
  void validate() const;

  /// Number of clusters K = ceil(N / ((1-p) * M)).
  int derived_K(int N) const;

  /// Donor-ring size r = ceil(t * p / (1 - p)); 0 exactly when p = 0.
  int ring_size() const;
};

}  // namespace odc
