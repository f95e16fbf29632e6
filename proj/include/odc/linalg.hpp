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

#include "odc/errors.hpp"
#include "odc/types.hpp"

namespace odc {

/// Inverse of a symmetric positive-definite matrix via Cholesky.
/// Throws ErrorCode::singular_matrix when the factorization reports the
/// matrix is not numerically positive definite (e.g. duplicate kernel
/// rows with zero regularization).
Matrix spd_inverse(const Eigen::Ref<const Matrix>& A);

/// Max-norm residual ||inv * A - I||_inf; the cheap post-factorization
/// quality probe used by tests and diagnostics.
double inverse_residual(const Eigen::Ref<const Matrix>& A,
                        const Eigen::Ref<const Matrix>& inv);

/// One-term expansion of (D*A*D + lambda*I)^-1 around (D*A*D)^-1:
///
///   D^-1 A^-1 D^-1  -  lambda * D^-2 A^-2 D^-2 / (1 + lambda * tr(D^-1 A^-1 D^-1))
///
/// computed exactly as written.  Exact only for 1x1 matrices or
/// lambda = 0; otherwise an approximation whose quality callers must
/// check (see miller_residual) before trusting the result.  `D` holds
/// the diagonal of the (positive) scaling matrix.  Cost is O(M^2) given
/// both A^-1 and A^-2 = A^-1 * A^-1; pass A_inv2 precomputed to stay in
/// that budget (when omitted it is formed here at O(M^3)).
Matrix miller_inverse(const Eigen::Ref<const Matrix>& A_inv,
                      const Eigen::Ref<const Vector>& D, double lambda);
Matrix miller_inverse(const Eigen::Ref<const Matrix>& A_inv,
                      const Eigen::Ref<const Matrix>& A_inv2,
                      const Eigen::Ref<const Vector>& D, double lambda);

/// Relative probe residual ||approx_inv * (B v) - v|| / ||v|| for the
/// target matrix B = D*A*D + lambda*I, with v a fixed deterministic
/// probe vector.  O(M^2); rebuilding B exactly is the caller's job when
/// it wants the O(M^3) exact residual instead.
double miller_residual(const Eigen::Ref<const Matrix>& approx_inv,
                       const Eigen::Ref<const Matrix>& A,
                       const Eigen::Ref<const Vector>& D, double lambda);

}  // namespace odc
