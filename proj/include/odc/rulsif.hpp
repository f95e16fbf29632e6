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

#include <vector>

#include "odc/types.hpp"

namespace odc {

/// Fitted relative density-ratio estimator.  Kernel centers are the
/// test points; the weight kernel is exp(-||x - c|| / tau2_denom) with
/// the same unsquared-norm convention as every other kernel here.
struct RulsifModel {
  Matrix centers;      ///< n_te x d kernel centers (the test batch)
  Vector theta;        ///< ridge solution (H + nu I)^-1 h
  double alpha = 0.1;
  double tau2_denom = 1.0;  ///< resolved denominator 2*tau^2
  double nu = 1e-3;
  bool squared = false;
};

/// Least-squares fit of the relative density ratio between a training
/// sample and a test sample.
///
///   H(l,l') = (1-alpha)/n_te * sum_i k(xte_i, c_l) k(xte_i, c_l')
///           +      alpha/n_tr * sum_j k(xtr_j, c_l) k(xtr_j, c_l')
///   h(l)    = 1/n_te * sum_i k(xte_i, c_l)
///   theta   = (H + nu I)^-1 h
///
/// tau2_denom <= 0 selects the median pairwise distance of the test
/// batch (deterministic; falls back to 1 when the median is 0).
RulsifModel rulsif_fit(const Eigen::Ref<const Matrix>& X_train,
                       const Eigen::Ref<const Matrix>& X_test, double alpha,
                       double tau2_denom, double nu, bool squared = false);

/// Ratio estimates w(x) = max(0, sum_l theta_l k(x, c_l)) for each row
/// of Xq.
Vector rulsif_weights(const RulsifModel& model,
                      const Eigen::Ref<const Matrix>& Xq);

/// Empirical squared-loss criterion of a fitted model on given samples
/// (lower is better); used for model selection.
double rulsif_j_criterion(const RulsifModel& model,
                          const Eigen::Ref<const Matrix>& X_train,
                          const Eigen::Ref<const Matrix>& X_test);

/// Coarse grid search over (alpha, tau2_denom, nu): fits on the even
/// half of the test batch, scores J on the odd half, returns the
/// arg-min triple (ties keep the earlier grid entry).
struct RulsifGrid {
  std::vector<double> alphas{0.0, 0.1, 0.5};
  std::vector<double> tau2_denoms{0.0};  ///< 0 = median heuristic
  std::vector<double> nus{1e-3, 1e-1};
};

struct RulsifSelection {
  double alpha;
  double tau2_denom;
  double nu;
  double j_value;
};

RulsifSelection rulsif_select(const Eigen::Ref<const Matrix>& X_train,
                              const Eigen::Ref<const Matrix>& X_test,
                              const RulsifGrid& grid, bool squared = false);

}  // namespace odc
