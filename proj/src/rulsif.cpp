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

#include "odc/rulsif.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "odc/errors.hpp"
#include "odc/kernels.hpp"

namespace odc {

namespace {

// Median pairwise Euclidean distance of the rows; 1.0 when degenerate.
double median_pairwise_distance(const Eigen::Ref<const Matrix>& X) {
  const Index n = X.rows();
  if (n < 2) return 1.0;
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      dists.push_back((X.row(i) - X.row(j)).norm());
    }
  }
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid),
                   dists.end());
  const double median = dists[mid];
  return median > 0.0 ? median : 1.0;
}

// Feature matrix Phi(i, l) = k(rows_i, centers_l).
Matrix feature_matrix(const Eigen::Ref<const Matrix>& rows,
                      const Matrix& centers, double denom, bool squared) {
  Matrix phi(rows.rows(), centers.rows());
  for (Index i = 0; i < rows.rows(); ++i) {
    phi.row(i) =
        kernel_vector(centers, rows.row(i).transpose(), denom, squared)
            .transpose();
  }
  return phi;
}

}  // namespace

RulsifModel rulsif_fit(const Eigen::Ref<const Matrix>& X_train,
                       const Eigen::Ref<const Matrix>& X_test, double alpha,
                       double tau2_denom, double nu, bool squared) {
  require(X_train.rows() >= 1 && X_test.rows() >= 1,
          ErrorCode::invalid_argument, "rulsif_fit: empty sample");
  require(X_train.cols() == X_test.cols(), ErrorCode::invalid_argument,
          "rulsif_fit: dimension mismatch");
  require(alpha >= 0.0 && alpha < 1.0, ErrorCode::invalid_argument,
          "rulsif_fit: alpha must lie in [0, 1)");
  require(nu > 0.0, ErrorCode::invalid_argument, "rulsif_fit: nu must be > 0");

  RulsifModel model;
  model.centers = X_test;
  model.alpha = alpha;
  model.nu = nu;
  model.squared = squared;
  model.tau2_denom =
      tau2_denom > 0.0 ? tau2_denom : median_pairwise_distance(X_test);

  const Index n_te = X_test.rows();
  const Index n_tr = X_train.rows();
  const Matrix phi_te =
      feature_matrix(X_test, model.centers, model.tau2_denom, squared);
  const Matrix phi_tr =
      feature_matrix(X_train, model.centers, model.tau2_denom, squared);

  Matrix H = ((1.0 - alpha) / static_cast<double>(n_te)) *
                 (phi_te.transpose() * phi_te) +
             (alpha / static_cast<double>(n_tr)) *
                 (phi_tr.transpose() * phi_tr);
  H.diagonal().array() += nu;
  const Vector h = phi_te.colwise().mean().transpose();

  Eigen::LDLT<Matrix> ldlt(H);
  require(ldlt.info() == Eigen::Success, ErrorCode::singular_matrix,
          "rulsif_fit: ridge system is not factorizable");
  model.theta = ldlt.solve(h);
  return model;
}

Vector rulsif_weights(const RulsifModel& model,
                      const Eigen::Ref<const Matrix>& Xq) {
  require(Xq.cols() == model.centers.cols(), ErrorCode::invalid_argument,
          "rulsif_weights: dimension mismatch");
  const Matrix phi =
      feature_matrix(Xq, model.centers, model.tau2_denom, model.squared);
  return (phi * model.theta).cwiseMax(0.0);
}

double rulsif_j_criterion(const RulsifModel& model,
                          const Eigen::Ref<const Matrix>& X_train,
                          const Eigen::Ref<const Matrix>& X_test) {
  const Vector w_tr = rulsif_weights(model, X_train);
  const Vector w_te = rulsif_weights(model, X_test);
  const double n_tr = static_cast<double>(X_train.rows());
  const double n_te = static_cast<double>(X_test.rows());
  // Empirical quadratic loss matching the fit objective: the alpha mix
  // weights the train term, (1 - alpha) the test term.
  return model.alpha / (2.0 * n_tr) * w_tr.squaredNorm() +
         (1.0 - model.alpha) / (2.0 * n_te) * w_te.squaredNorm() -
         w_te.mean();
}

RulsifSelection rulsif_select(const Eigen::Ref<const Matrix>& X_train,
                              const Eigen::Ref<const Matrix>& X_test,
                              const RulsifGrid& grid, bool squared) {
  require(!grid.alphas.empty() && !grid.tau2_denoms.empty() &&
              !grid.nus.empty(),
          ErrorCode::invalid_argument, "rulsif_select: empty grid");

  // Deterministic even/odd split of the test rows: fit on one half,
  // score on the other; a single test row uses itself for both.
  const Index n_te = X_test.rows();
  std::vector<Index> fit_rows, score_rows;
  for (Index i = 0; i < n_te; ++i) {
    (i % 2 == 0 ? fit_rows : score_rows).push_back(i);
  }
  if (score_rows.empty()) score_rows = fit_rows;
  Matrix te_fit(static_cast<Index>(fit_rows.size()), X_test.cols());
  for (std::size_t i = 0; i < fit_rows.size(); ++i) {
    te_fit.row(static_cast<Index>(i)) = X_test.row(fit_rows[i]);
  }
  Matrix te_score(static_cast<Index>(score_rows.size()), X_test.cols());
  for (std::size_t i = 0; i < score_rows.size(); ++i) {
    te_score.row(static_cast<Index>(i)) = X_test.row(score_rows[i]);
  }

  RulsifSelection best{grid.alphas.front(), grid.tau2_denoms.front(),
                       grid.nus.front(),
                       std::numeric_limits<double>::infinity()};
  for (double alpha : grid.alphas) {
    for (double tau2 : grid.tau2_denoms) {
      for (double nu : grid.nus) {
        const RulsifModel model =
            rulsif_fit(X_train, te_fit, alpha, tau2, nu, squared);
        const double j = rulsif_j_criterion(model, X_train, te_score);
        if (j < best.j_value) {
          best = {alpha, tau2, nu, j};
        }
      }
    }
  }
  return best;
}

}  // namespace odc
