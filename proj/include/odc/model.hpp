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
#include <utility>
#include <vector>

#include "odc/cover.hpp"
#include "odc/machines.hpp"

namespace odc {

/// A trained model: the cover geometry plus one precomputed machine per
/// subdomain.  Machines embed their own training rows, so a model
/// predicts without access to the original dataset.
struct OdcModel {
  OdcConfig config;
  HyperParams hyper;
  int N = 0;
  int d_x = 0;
  int d_y = 0;
  EqualClustering clustering;
  std::vector<Subdomain> subdomains;
  std::vector<LocalMachine> machines;  ///< machines[i] belongs to subdomains[i]
  std::vector<std::string> feature_names;
  std::vector<std::string> output_names;
};

struct TrainTimings {
  double clustering_seconds = 0.0;
  double cover_seconds = 0.0;
  double machines_seconds = 0.0;
  double total_seconds = 0.0;
};

/// Clusters, builds the cover, and precomputes every machine.  Throws
/// config_error when the geometry is infeasible for this dataset
/// (e.g. kprime > K, or the borrow demand exceeds available points).
OdcModel train_odc_model(const Eigen::Ref<const Matrix>& X,
                         const Eigen::Ref<const Matrix>& Y,
                         const OdcConfig& config, const HyperParams& hyper,
                         std::uint64_t seed, int threads = 1,
                         TrainTimings* timings = nullptr);

/// All subdomains sorted by the covariance-scaled distance
/// (x - mu_i)^T prec_i (x - mu_i), ascending; equal distances keep
/// subdomain-index order.
std::vector<std::pair<int, double>> rank_subdomains(
    const OdcModel& model, const Eigen::Ref<const Vector>& x);

/// Distance-weighted average of per-machine predictions: weights
/// a_i = (1/D_i) / sum_j (1/D_j).  Any zero distance switches to the
/// uniform average over the zero-distance subset.  Weights sum to 1.
Vector combine_predictions(const Matrix& predictions,
                           const std::vector<double>& distances);

struct PredictOptions {
  OptimizeOptions optimizer;
  int threads = 1;
  InverseMode inverse_mode = InverseMode::automatic;  ///< IWTGP only
};

/// Predicts one query: ranks subdomains, runs the kprime closest
/// machines, and combines their outputs.  For IWTGP the query itself is
/// the density-ratio test batch.
Vector odc_predict(const OdcModel& model, const Eigen::Ref<const Vector>& x,
                   const PredictOptions& options = {});

/// Batch prediction.  For IWTGP machines the density-ratio weights (and
/// the weighted inverses) are computed once per (subdomain, batch) pair
/// and shared across all rows that rank that subdomain.
Matrix odc_predict_batch(const OdcModel& model,
                         const Eigen::Ref<const Matrix>& X_test,
                         const PredictOptions& options = {});

}  // namespace odc
