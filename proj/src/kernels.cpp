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

#include "odc/kernels.hpp"

#include <cmath>

namespace odc {

Matrix kernel_matrix(const Eigen::Ref<const Matrix>& X, double denom,
                     bool squared) {
  require(denom > 0.0, ErrorCode::invalid_argument,
          "kernel_matrix: denom must be > 0");
  const Index n = X.rows();
  Matrix K(n, n);
  for (Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Index j = i + 1; j < n; ++j) {
      const double d2 = (X.row(i) - X.row(j)).squaredNorm();
      const double v = std::exp(-(squared ? d2 : std::sqrt(d2)) / denom);
      K(i, j) = v;
      K(j, i) = v;  // fill both triangles so symmetry is exact
    }
  }
  return K;
}

Vector kernel_vector(const Eigen::Ref<const Matrix>& X,
                     const Eigen::Ref<const Vector>& x, double denom,
                     bool squared) {
  require(denom > 0.0, ErrorCode::invalid_argument,
          "kernel_vector: denom must be > 0");
  require(X.cols() == x.size(), ErrorCode::invalid_argument,
          "kernel_vector: dimension mismatch");

  // Squared distances column by column in direct-difference form: contiguous
  // passes, and no cancellation for rows that coincide with the query.
  Vector d2 = Vector::Zero(X.rows());
  for (Index c = 0; c < X.cols(); ++c) {
    d2.array() += (X.col(c).array() - x(c)).square();
  }

  if (squared) {
    return (-d2.array() / denom).exp();
  }
  return (-d2.array().sqrt() / denom).exp();
}

}  // namespace odc
