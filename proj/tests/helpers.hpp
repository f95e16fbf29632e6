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

#include <algorithm>
#include <string>
#include <vector>

#include "odc/rng.hpp"
#include "odc/types.hpp"

namespace odc::test {

/// Matrix with i.i.d. uniform entries in [lo, hi).
inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed,
                            double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) M(i, j) = rng.uniform(lo, hi);
  }
  return M;
}

/// Matrix with i.i.d. standard normal entries.
inline Matrix normal_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) M(i, j) = rng.normal();
  }
  return M;
}

/// Well-conditioned SPD matrix A = B^T B / n + ridge I.
inline Matrix random_spd(Index n, std::uint64_t seed, double ridge = 0.5) {
  const Matrix B = normal_matrix(n, n, seed);
  Matrix A = (B.transpose() * B) / static_cast<double>(n);
  A += ridge * Matrix::Identity(n, n);
  return (A + A.transpose()) / 2.0;
}

inline double max_abs_diff(const Matrix& A, const Matrix& B) {
  return (A - B).cwiseAbs().maxCoeff();
}

/// Sorted copy, for set-like comparisons of index lists.
inline std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace odc::test
