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

/// Exponential kernel k(a, b) = exp(-||a - b|| / denom).
///
/// The exponent uses the UNSQUARED Euclidean norm; that convention is
/// load-bearing for every machine in this library and for the shipped
/// preset denominators (denom = 2*rho^2).  `squared` switches to the
/// squared-norm variant and defaults to off everywhere.
inline double se_kernel(const Eigen::Ref<const Vector>& a,
                        const Eigen::Ref<const Vector>& b, double denom,
                        bool squared = false) {
  require(denom > 0.0, ErrorCode::invalid_argument,
          "se_kernel: denom must be > 0");
  const double d2 = (a - b).squaredNorm();
  return std::exp(-(squared ? d2 : std::sqrt(d2)) / denom);
}

/// Gram matrix K with K(i,j) = se_kernel(X.row(i), X.row(j), denom).
/// Symmetric with unit diagonal; entries lie in (0, 1].
Matrix kernel_matrix(const Eigen::Ref<const Matrix>& X, double denom,
                     bool squared = false);

/// Cross-kernel vector k with k(i) = se_kernel(X.row(i), x, denom).
Vector kernel_vector(const Eigen::Ref<const Matrix>& X,
                     const Eigen::Ref<const Vector>& x, double denom,
                     bool squared = false);

}  // namespace odc
