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

#include <variant>
#include <vector>

#include "odc/config.hpp"
#include "odc/optimizer.hpp"
#include "odc/rulsif.hpp"
#include "odc/types.hpp"

namespace odc {

// ---------------------------------------------------------------------------
// Gaussian-process regression machine
// ---------------------------------------------------------------------------

/// Precomputed GPR machine over one subdomain.  Output dims that share a
/// noise variance share one inverse through inv_pool/inv_index; alpha
/// column j is (K + sigma_j^2 I)^-1 y_j.
struct GprMachine {
  std::vector<int> indices;      ///< rows of the full training set
  Matrix X;                      ///< M x d_x training inputs
  Matrix alpha;                  ///< M x d_y
  std::vector<Matrix> inv_pool;  ///< distinct (K + sigma^2 I)^-1 matrices
  std::vector<int> inv_index;    ///< output dim -> pool entry
};

struct GprPrediction {
  Vector mean;
  Vector variance;  ///< 1 - k*^T inv k*, clamped at >= 0, per output dim
};

GprMachine gpr_train(const Eigen::Ref<const Matrix>& X,
                     const Eigen::Ref<const Matrix>& Y,
                     const HyperParams& hyper,
                     const std::vector<int>& indices = {});

GprPrediction gpr_predict(const GprMachine& machine, const HyperParams& hyper,
                          const Eigen::Ref<const Vector>& x);

// ---------------------------------------------------------------------------
// Twin-Gaussian-process machine
// ---------------------------------------------------------------------------

/// Precomputed TGP machine: regularized Gram inverses on both the input
/// and the output side, ready for per-query structured prediction.
struct TgpMachine {
  std::vector<int> indices;
  Matrix X;       ///< M x d_x
  Matrix Y;       ///< M x d_y
  Matrix Kx_inv;  ///< (K_X + lambda_x I)^-1
  Matrix Ky_inv;  ///< (K_Y + lambda_y I)^-1
};

struct TgpPrediction {
  Vector y;
  double objective_init = 0.0;
  double objective = 0.0;  ///< never exceeds objective_init
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool degenerate = false;  ///< optimizer could not leave the init point
};

TgpMachine tgp_train(const Eigen::Ref<const Matrix>& X,
                     const Eigen::Ref<const Matrix>& Y,
                     const HyperParams& hyper,
                     const std::vector<int>& indices = {});

/// KL-matching objective at candidate output y for query x:
///
///   1 - 2 ky(y)^T u - eta * log(1 - ky(y)^T Ky_inv ky(y)),
///   u = Kx_inv kx(x),  eta = 1 - kx(x)^T u.
///
/// Returns +infinity (zero gradient) when the log argument is <= 0.
/// The gradient of ky(y)_i uses the unsquared-norm kernel derivative
/// -ky_i * (y - y_i)/(rho_y2 * ||y - y_i||), taken as 0 at y == y_i.
double tgp_objective(const TgpMachine& machine, const HyperParams& hyper,
                     const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& y,
                     Vector* grad = nullptr);

/// Minimizes the objective from the training output of the input-space
/// nearest neighbor of x inside the subdomain.
TgpPrediction tgp_predict(const TgpMachine& machine, const HyperParams& hyper,
                          const Eigen::Ref<const Vector>& x,
                          const OptimizeOptions& options = {});

// ---------------------------------------------------------------------------
// Importance-weighted TGP machine
// ---------------------------------------------------------------------------

/// IWTGP machine: stores raw jittered Gram inverses (and their squares,
/// so the scaled-inverse expansion stays O(M^2) at query time); the
/// importance-weighted inverses are formed per test batch.
struct IwtgpMachine {
  std::vector<int> indices;
  Matrix X;
  Matrix Y;
  double jitter = 0.0;  ///< 1e-8 * M, regularizer of the raw inverses
  Matrix Kx_inv;        ///< (K_X + jitter I)^-1
  Matrix Ky_inv;
  Matrix Kx_inv2;       ///< Kx_inv * Kx_inv, precomputed
  Matrix Ky_inv2;
};

IwtgpMachine iwtgp_train(const Eigen::Ref<const Matrix>& X,
                         const Eigen::Ref<const Matrix>& Y,
                         const HyperParams& hyper,
                         const std::vector<int>& indices = {});

/// How the weighted inverses are produced.
enum class InverseMode {
  automatic,  ///< scaled expansion, direct fallback on residual > 1e-3
  miller,     ///< always the scaled expansion
  direct      ///< always exact (rebuild + factorize, O(M^3))
};

/// Weighted inverses sandwiched with W^(1/2) on both sides, i.e. the
/// exact drop-in replacements for Kx_inv / Ky_inv in the objective:
/// Bx = W^(1/2) (W^(1/2) K_X W^(1/2) + lambda_x I)^-1 W^(1/2).
struct WeightedInverses {
  Matrix Bx;
  Matrix By;
  double residual_x = 0.0;  ///< probe residual of the expansion
  double residual_y = 0.0;
  bool fallback_x = false;  ///< true when the exact path was used
  bool fallback_y = false;
};

/// Forms the weighted inverses for a weight vector (one entry per
/// training point, floored at 1e-8).  automatic mode uses the O(M^2)
/// expansion when its probe residual is <= 1e-3, the exact path
/// otherwise; an all-ones weight vector short-circuits to the exact
/// path so that the TGP identity holds exactly.
WeightedInverses iwtgp_form_inverses(const IwtgpMachine& machine,
                                     const HyperParams& hyper,
                                     const Eigen::Ref<const Vector>& weights,
                                     InverseMode mode = InverseMode::automatic);

double iwtgp_objective(const IwtgpMachine& machine, const HyperParams& hyper,
                       const WeightedInverses& inverses,
                       const Eigen::Ref<const Vector>& x,
                       const Eigen::Ref<const Vector>& y,
                       Vector* grad = nullptr);

TgpPrediction iwtgp_predict(const IwtgpMachine& machine,
                            const HyperParams& hyper,
                            const WeightedInverses& inverses,
                            const Eigen::Ref<const Vector>& x,
                            const OptimizeOptions& options = {});

/// Convenience overload: computes weights for this machine from a
/// RuLSIF fit between the machine's inputs and the given test batch,
/// forms the inverses, and predicts each batch row.
Matrix iwtgp_predict_batch(const IwtgpMachine& machine,
                           const HyperParams& hyper,
                           const Eigen::Ref<const Matrix>& X_test,
                           const OptimizeOptions& options = {},
                           InverseMode mode = InverseMode::automatic);

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

using LocalMachine = std::variant<GprMachine, TgpMachine, IwtgpMachine>;

LocalMachine train_machine(MachineKind kind, const Eigen::Ref<const Matrix>& X,
                           const Eigen::Ref<const Matrix>& Y,
                           const HyperParams& hyper,
                           const std::vector<int>& indices = {});

/// Classic local baseline: gather the M nearest training inputs of x
/// (Euclidean, ties on lower index), train a fresh machine on them, and
/// predict.  The per-query O(M^3) factorization cost is the point of
/// comparison for the precomputed cover.
struct NnPrediction {
  Vector y;
  std::vector<int> neighbor_indices;
};

NnPrediction nn_local_predict(const Eigen::Ref<const Matrix>& X,
                              const Eigen::Ref<const Matrix>& Y,
                              const Eigen::Ref<const Vector>& x, int M,
                              MachineKind kind, const HyperParams& hyper,
                              const OptimizeOptions& options = {});

}  // namespace odc
