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

#include "odc/machines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "odc/kernels.hpp"
#include "odc/linalg.hpp"

namespace odc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWeightFloor = 1e-8;
constexpr double kMillerResidualLimit = 1e-3;

void check_training_data(const Eigen::Ref<const Matrix>& X,
                         const Eigen::Ref<const Matrix>& Y) {
  require(X.rows() >= 1, ErrorCode::invalid_argument,
          "machine training: empty subdomain");
  require(X.rows() == Y.rows(), ErrorCode::invalid_argument,
          "machine training: X and Y row counts differ");
  require(X.allFinite() && Y.allFinite(), ErrorCode::numeric_error,
          "machine training: non-finite training values");
}

// Row of X nearest to x in Euclidean distance; ties keep the lower row.
Index nearest_row(const Matrix& X, const Eigen::Ref<const Vector>& x) {
  Index best = 0;
  double best_d = (X.row(0).transpose() - x).squaredNorm();
  for (Index i = 1; i < X.rows(); ++i) {
    const double d = (X.row(i).transpose() - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// Shared KL-matching objective at candidate y, parameterized by the
// (possibly importance-weighted) input/output inverses through the
// precomputed u and eta:
//   value = 1 - 2 ky^T u - eta * log(1 - ky^T Ay ky).
double structured_objective(const Matrix& Y, const Matrix& Ay, double rho_y2,
                            bool squared, const Vector& u, double eta,
                            const Eigen::Ref<const Vector>& y, Vector* grad) {
  const Index m = Y.rows();
  const Vector ky = kernel_vector(Y, y, rho_y2, squared);
  const Vector w = Ay * ky;
  const double s = 1.0 - ky.dot(w);
  if (grad) grad->setZero();
  if (!(s > 0.0)) return kInf;  // outside the log domain

  const double value = 1.0 - 2.0 * ky.dot(u) - eta * std::log(s);
  if (grad) {
    // d ky_i / dy = -ky_i (y - y_i) / (rho_y2 ||y - y_i||)   (unsquared)
    //            = -ky_i * 2 (y - y_i) / rho_y2              (squared)
    // and the objective gradient collects them with coefficients
    // (-2 u_i + (2 eta / s) w_i).
    for (Index i = 0; i < m; ++i) {
      const Vector diff = y - Y.row(i).transpose();
      const double norm = diff.norm();
      if (!squared && norm == 0.0) continue;  // subgradient choice: 0
      const double coef = -2.0 * u(i) + (2.0 * eta / s) * w(i);
      const double scale =
          squared ? -ky(i) * 2.0 / rho_y2 : -ky(i) / (rho_y2 * norm);
      *grad += (coef * scale) * diff;
    }
  }
  return value;
}

TgpPrediction structured_predict(const Matrix& X, const Matrix& Y,
                                 const Matrix& Ax, const Matrix& Ay,
                                 const HyperParams& hyper,
                                 const Eigen::Ref<const Vector>& x,
                                 const OptimizeOptions& options) {
  require(x.size() == X.cols(), ErrorCode::invalid_argument,
          "predict: query dimension mismatch");
  const Vector kx = kernel_vector(X, x, hyper.rho_x2, hyper.squared_norm);
  const Vector u = Ax * kx;
  // eta >= 0 holds in exact arithmetic for PSD Gram matrices; clamp the
  // rounding-level negatives so the log term cannot flip sign.
  const double eta = std::max(0.0, 1.0 - kx.dot(u));

  Objective objective = [&](const Vector& y, Vector& grad) {
    return structured_objective(Y, Ay, hyper.rho_y2, hyper.squared_norm, u,
                                eta, y, &grad);
  };

  const Vector y0 = Y.row(nearest_row(X, x)).transpose();
  Vector g0(Y.cols());
  const double f0 =
      structured_objective(Y, Ay, hyper.rho_y2, hyper.squared_norm, u, eta,
                           y0, &g0);

  OptimizeResult opt = minimize_lbfgs(objective, y0, options);

  TgpPrediction pred;
  pred.objective_init = f0;
  pred.y = std::move(opt.x);
  pred.objective = opt.value;
  pred.iterations = opt.iterations;
  pred.evaluations = opt.evaluations + 1;  // + the explicit init eval
  pred.converged = opt.converged;
  pred.degenerate = opt.degenerate;
  return pred;
}

}  // namespace

// ---------------------------------------------------------------------------
// GPR
// ---------------------------------------------------------------------------

GprMachine gpr_train(const Eigen::Ref<const Matrix>& X,
                     const Eigen::Ref<const Matrix>& Y,
                     const HyperParams& hyper, const std::vector<int>& indices) {
  check_training_data(X, Y);
  hyper.validate(static_cast<int>(Y.cols()));

  GprMachine machine;
  machine.indices = indices;
  machine.X = X;
  const Matrix K = kernel_matrix(X, hyper.rho_x2, hyper.squared_norm);

  // Output dims sharing a noise variance share one inverse.
  machine.inv_index.resize(static_cast<std::size_t>(Y.cols()));
  std::vector<double> pool_sigma;
  for (Index j = 0; j < Y.cols(); ++j) {
    const double sigma = hyper.sigma_n2_for(j);
    int slot = -1;
    for (std::size_t q = 0; q < pool_sigma.size(); ++q) {
      if (pool_sigma[q] == sigma) {
        slot = static_cast<int>(q);
        break;
      }
    }
    if (slot < 0) {
      Matrix regularized = K;
      regularized.diagonal().array() += sigma;
      machine.inv_pool.push_back(spd_inverse(regularized));
      pool_sigma.push_back(sigma);
      slot = static_cast<int>(machine.inv_pool.size() - 1);
    }
    machine.inv_index[static_cast<std::size_t>(j)] = slot;
  }

  machine.alpha.resize(X.rows(), Y.cols());
  for (Index j = 0; j < Y.cols(); ++j) {
    const Matrix& inv =
        machine.inv_pool[static_cast<std::size_t>(
            machine.inv_index[static_cast<std::size_t>(j)])];
    machine.alpha.col(j) = inv * Y.col(j);
  }
  return machine;
}

GprPrediction gpr_predict(const GprMachine& machine, const HyperParams& hyper,
                          const Eigen::Ref<const Vector>& x) {
  require(x.size() == machine.X.cols(), ErrorCode::invalid_argument,
          "gpr_predict: query dimension mismatch");
  const Vector k = kernel_vector(machine.X, x, hyper.rho_x2,
                                 hyper.squared_norm);
  GprPrediction pred;
  const Index d_y = machine.alpha.cols();
  pred.mean = machine.alpha.transpose() * k;
  pred.variance.resize(d_y);
  // One quadratic form per distinct inverse, shared across its dims.
  std::vector<double> pool_q(machine.inv_pool.size(),
                             std::numeric_limits<double>::quiet_NaN());
  for (Index j = 0; j < d_y; ++j) {
    const std::size_t slot =
        static_cast<std::size_t>(machine.inv_index[static_cast<std::size_t>(j)]);
    if (std::isnan(pool_q[slot])) {
      pool_q[slot] = k.dot(machine.inv_pool[slot] * k);
    }
    pred.variance(j) = std::max(0.0, 1.0 - pool_q[slot]);
  }
  return pred;
}

// ---------------------------------------------------------------------------
// TGP
// ---------------------------------------------------------------------------

TgpMachine tgp_train(const Eigen::Ref<const Matrix>& X,
                     const Eigen::Ref<const Matrix>& Y,
                     const HyperParams& hyper, const std::vector<int>& indices) {
  check_training_data(X, Y);
  hyper.validate(static_cast<int>(Y.cols()));

  TgpMachine machine;
  machine.indices = indices;
  machine.X = X;
  machine.Y = Y;

  Matrix kx = kernel_matrix(X, hyper.rho_x2, hyper.squared_norm);
  kx.diagonal().array() += hyper.lambda_x;
  machine.Kx_inv = spd_inverse(kx);

  Matrix ky = kernel_matrix(Y, hyper.rho_y2, hyper.squared_norm);
  ky.diagonal().array() += hyper.lambda_y;
  machine.Ky_inv = spd_inverse(ky);
  return machine;
}

double tgp_objective(const TgpMachine& machine, const HyperParams& hyper,
                     const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& y, Vector* grad) {
  require(x.size() == machine.X.cols() && y.size() == machine.Y.cols(),
          ErrorCode::invalid_argument, "tgp_objective: dimension mismatch");
  const Vector kx = kernel_vector(machine.X, x, hyper.rho_x2,
                                  hyper.squared_norm);
  const Vector u = machine.Kx_inv * kx;
  const double eta = std::max(0.0, 1.0 - kx.dot(u));
  return structured_objective(machine.Y, machine.Ky_inv, hyper.rho_y2,
                              hyper.squared_norm, u, eta, y, grad);
}

TgpPrediction tgp_predict(const TgpMachine& machine, const HyperParams& hyper,
                          const Eigen::Ref<const Vector>& x,
                          const OptimizeOptions& options) {
  return structured_predict(machine.X, machine.Y, machine.Kx_inv,
                            machine.Ky_inv, hyper, x, options);
}

// ---------------------------------------------------------------------------
// IWTGP
// ---------------------------------------------------------------------------

IwtgpMachine iwtgp_train(const Eigen::Ref<const Matrix>& X,
                         const Eigen::Ref<const Matrix>& Y,
                         const HyperParams& hyper,
                         const std::vector<int>& indices) {
  check_training_data(X, Y);
  hyper.validate(static_cast<int>(Y.cols()));

  IwtgpMachine machine;
  machine.indices = indices;
  machine.X = X;
  machine.Y = Y;
  machine.jitter = 1e-8 * static_cast<double>(X.rows());

  Matrix kx = kernel_matrix(X, hyper.rho_x2, hyper.squared_norm);
  kx.diagonal().array() += machine.jitter;
  machine.Kx_inv = spd_inverse(kx);
  machine.Kx_inv2 = machine.Kx_inv * machine.Kx_inv;

  Matrix ky = kernel_matrix(Y, hyper.rho_y2, hyper.squared_norm);
  ky.diagonal().array() += machine.jitter;
  machine.Ky_inv = spd_inverse(ky);
  machine.Ky_inv2 = machine.Ky_inv * machine.Ky_inv;
  return machine;
}

namespace {

// One weighted inverse B = D M^-1 D with M = D K D + lambda I and
// D = diag(sqrt(w)): expansion path with probe-residual check, exact
// rebuild otherwise.
Matrix weighted_inverse(const Matrix& points, const Matrix& K_inv,
                        const Matrix& K_inv2, double kernel_denom,
                        bool squared, const Vector& sqrt_w, double lambda,
                        InverseMode mode, bool identity_weights,
                        double* residual, bool* fallback) {
  *residual = 0.0;
  *fallback = false;

  Matrix K;  // rebuilt lazily: needed for the residual probe and fallback
  auto ensure_K = [&]() {
    if (K.size() == 0) {
      K = kernel_matrix(points, kernel_denom, squared);
    }
  };

  if (mode != InverseMode::direct && !identity_weights) {
    const Matrix approx = miller_inverse(K_inv, K_inv2, sqrt_w, lambda);
    ensure_K();
    *residual = miller_residual(approx, K, sqrt_w, lambda);
    if (mode == InverseMode::miller || *residual <= kMillerResidualLimit) {
      return sqrt_w.asDiagonal() * approx * sqrt_w.asDiagonal();
    }
  }

  // Exact path: identity weights (so the unweighted identity holds
  // exactly), explicit request, or expansion residual out of budget.
  *fallback = true;
  ensure_K();
  Matrix target = sqrt_w.asDiagonal() * K * sqrt_w.asDiagonal();
  target.diagonal().array() += lambda;
  const Matrix inv = spd_inverse(target);
  return sqrt_w.asDiagonal() * inv * sqrt_w.asDiagonal();
}

}  // namespace

WeightedInverses iwtgp_form_inverses(const IwtgpMachine& machine,
                                     const HyperParams& hyper,
                                     const Eigen::Ref<const Vector>& weights,
                                     InverseMode mode) {
  require(weights.size() == machine.X.rows(), ErrorCode::invalid_argument,
          "iwtgp_form_inverses: one weight per training point required");
  const Vector w = weights.cwiseMax(kWeightFloor);
  const bool identity = (w.array() == 1.0).all();
  const Vector sqrt_w = w.cwiseSqrt();

  WeightedInverses out;
  out.Bx = weighted_inverse(machine.X, machine.Kx_inv, machine.Kx_inv2,
                            hyper.rho_x2, hyper.squared_norm, sqrt_w,
                            hyper.lambda_x, mode, identity, &out.residual_x,
                            &out.fallback_x);
  out.By = weighted_inverse(machine.Y, machine.Ky_inv, machine.Ky_inv2,
                            hyper.rho_y2, hyper.squared_norm, sqrt_w,
                            hyper.lambda_y, mode, identity, &out.residual_y,
                            &out.fallback_y);
  return out;
}

double iwtgp_objective(const IwtgpMachine& machine, const HyperParams& hyper,
                       const WeightedInverses& inverses,
                       const Eigen::Ref<const Vector>& x,
                       const Eigen::Ref<const Vector>& y, Vector* grad) {
  require(x.size() == machine.X.cols() && y.size() == machine.Y.cols(),
          ErrorCode::invalid_argument, "iwtgp_objective: dimension mismatch");
  const Vector kx = kernel_vector(machine.X, x, hyper.rho_x2,
                                  hyper.squared_norm);
  const Vector u = inverses.Bx * kx;
  const double eta = std::max(0.0, 1.0 - kx.dot(u));
  return structured_objective(machine.Y, inverses.By, hyper.rho_y2,
                              hyper.squared_norm, u, eta, y, grad);
}

TgpPrediction iwtgp_predict(const IwtgpMachine& machine,
                            const HyperParams& hyper,
                            const WeightedInverses& inverses,
                            const Eigen::Ref<const Vector>& x,
                            const OptimizeOptions& options) {
  return structured_predict(machine.X, machine.Y, inverses.Bx, inverses.By,
                            hyper, x, options);
}

Matrix iwtgp_predict_batch(const IwtgpMachine& machine,
                           const HyperParams& hyper,
                           const Eigen::Ref<const Matrix>& X_test,
                           const OptimizeOptions& options, InverseMode mode) {
  require(X_test.rows() >= 1, ErrorCode::invalid_argument,
          "iwtgp_predict_batch: empty batch");
  const RulsifModel ratio =
      rulsif_fit(machine.X, X_test, hyper.rulsif_alpha, hyper.rulsif_tau2,
                 hyper.rulsif_nu, hyper.squared_norm);
  const Vector weights = rulsif_weights(ratio, machine.X);
  const WeightedInverses inverses =
      iwtgp_form_inverses(machine, hyper, weights, mode);

  Matrix Y(X_test.rows(), machine.Y.cols());
  for (Index i = 0; i < X_test.rows(); ++i) {
    Y.row(i) = iwtgp_predict(machine, hyper, inverses,
                             X_test.row(i).transpose(), options)
                   .y.transpose();
  }
  return Y;
}

// ---------------------------------------------------------------------------
// Dispatch + nearest-neighbor baseline
// ---------------------------------------------------------------------------

LocalMachine train_machine(MachineKind kind, const Eigen::Ref<const Matrix>& X,
                           const Eigen::Ref<const Matrix>& Y,
                           const HyperParams& hyper,
                           const std::vector<int>& indices) {
  switch (kind) {
    case MachineKind::gpr: return gpr_train(X, Y, hyper, indices);
    case MachineKind::tgp: return tgp_train(X, Y, hyper, indices);
    case MachineKind::iwtgp: return iwtgp_train(X, Y, hyper, indices);
  }
  fail(ErrorCode::internal_error, "train_machine: unknown machine kind");
}

NnPrediction nn_local_predict(const Eigen::Ref<const Matrix>& X,
                              const Eigen::Ref<const Matrix>& Y,
                              const Eigen::Ref<const Vector>& x, int M,
                              MachineKind kind, const HyperParams& hyper,
                              const OptimizeOptions& options) {
  require(M >= 1 && M <= X.rows(), ErrorCode::invalid_argument,
          "nn_local_predict: need 1 <= M <= N");
  require(X.rows() == Y.rows(), ErrorCode::invalid_argument,
          "nn_local_predict: X and Y row counts differ");
  require(x.size() == X.cols(), ErrorCode::invalid_argument,
          "nn_local_predict: query dimension mismatch");

  // Exact brute-force scan; ties resolve to the lower index via the
  // lexicographic pair sort. Distances accumulate column by column so the
  // passes run over contiguous column-major storage.
  Vector d2 = Vector::Zero(X.rows());
  for (Index c = 0; c < X.cols(); ++c) {
    d2.array() += (X.col(c).array() - x(c)).square();
  }
  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(static_cast<std::size_t>(X.rows()));
  for (Index i = 0; i < X.rows(); ++i) {
    ranked.emplace_back(d2(i), static_cast<int>(i));
  }
  std::partial_sort(ranked.begin(), ranked.begin() + M, ranked.end());

  NnPrediction pred;
  pred.neighbor_indices.reserve(static_cast<std::size_t>(M));
  Matrix Xm(M, X.cols());
  Matrix Ym(M, Y.cols());
  for (int i = 0; i < M; ++i) {
    const int idx = ranked[static_cast<std::size_t>(i)].second;
    pred.neighbor_indices.push_back(idx);
    Xm.row(i) = X.row(idx);
    Ym.row(i) = Y.row(idx);
  }

  switch (kind) {
    case MachineKind::gpr: {
      const GprMachine machine = gpr_train(Xm, Ym, hyper);
      pred.y = gpr_predict(machine, hyper, x).mean;
      break;
    }
    case MachineKind::tgp: {
      const TgpMachine machine = tgp_train(Xm, Ym, hyper);
      pred.y = tgp_predict(machine, hyper, x, options).y;
      break;
    }
    case MachineKind::iwtgp: {
      const IwtgpMachine machine = iwtgp_train(Xm, Ym, hyper);
      Matrix batch(1, x.size());
      batch.row(0) = x.transpose();
      pred.y = iwtgp_predict_batch(machine, hyper, batch, options)
                   .row(0)
                   .transpose();
      break;
    }
  }
  return pred;
}

}  // namespace odc
