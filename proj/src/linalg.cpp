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

#include "odc/linalg.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace odc {

Matrix spd_inverse(const Eigen::Ref<const Matrix>& A) {
  require(A.rows() == A.cols(), ErrorCode::invalid_argument,
          "spd_inverse: matrix must be square");
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::singular_matrix,
         "spd_inverse: matrix is not numerically positive definite");
  }
  Matrix inv = llt.solve(Matrix::Identity(A.rows(), A.cols()));
  // The solve is exact-symmetric only up to rounding; make it exact so
  // downstream quadratic forms cannot pick up an asymmetric component.
  inv = ((inv + inv.transpose()) * 0.5).eval();
  return inv;
}

double inverse_residual(const Eigen::Ref<const Matrix>& A,
                        const Eigen::Ref<const Matrix>& inv) {
  return (inv * A - Matrix::Identity(A.rows(), A.cols()))
      .cwiseAbs()
      .maxCoeff();
}

Matrix miller_inverse(const Eigen::Ref<const Matrix>& A_inv,
                      const Eigen::Ref<const Vector>& D, double lambda) {
  const Matrix A_inv2 = A_inv * A_inv;
  return miller_inverse(A_inv, A_inv2, D, lambda);
}

Matrix miller_inverse(const Eigen::Ref<const Matrix>& A_inv,
                      const Eigen::Ref<const Matrix>& A_inv2,
                      const Eigen::Ref<const Vector>& D, double lambda) {
  const Index n = A_inv.rows();
  require(A_inv.cols() == n && A_inv2.rows() == n && A_inv2.cols() == n,
          ErrorCode::invalid_argument, "miller_inverse: size mismatch");
  require(D.size() == n, ErrorCode::invalid_argument,
          "miller_inverse: diagonal size mismatch");
  require(lambda >= 0.0, ErrorCode::invalid_argument,
          "miller_inverse: lambda must be >= 0");
  require((D.array() > 0.0).all(), ErrorCode::invalid_argument,
          "miller_inverse: diagonal entries must be > 0");

  const Vector d_inv = D.cwiseInverse();
  const Vector d_inv2 = d_inv.cwiseProduct(d_inv);

  // First term: D^-1 A^-1 D^-1 (row/column scaling).
  Matrix first = d_inv.asDiagonal() * A_inv * d_inv.asDiagonal();
  if (lambda == 0.0) return first;

  const double trace_first = first.trace();
  Matrix second = d_inv2.asDiagonal() * A_inv2 * d_inv2.asDiagonal();
  return first - (lambda / (1.0 + lambda * trace_first)) * second;
}

double miller_residual(const Eigen::Ref<const Matrix>& approx_inv,
                       const Eigen::Ref<const Matrix>& A,
                       const Eigen::Ref<const Vector>& D, double lambda) {
  const Index n = A.rows();
  // Fixed deterministic probe with sign alternation so that structured
  // errors cannot cancel against a constant vector.
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = (i % 2 == 0) ? 1.0 : -1.0;
  const Vector dv = D.cwiseProduct(v);
  const Vector bv = D.cwiseProduct(A * dv) + lambda * v;  // (DAD + lambda I) v
  const double denom = v.norm();
  return (approx_inv * bv - v).norm() / denom;
}

}  // namespace odc
