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

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "odc/errors.hpp"
#include "odc/linalg.hpp"

using namespace odc;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("spd_inverse matches a hand-computed 2x2 inverse") {
  Matrix A(2, 2);
  A << 4.0, 1.0, 1.0, 3.0;
  // det = 11, inverse = [[3, -1], [-1, 4]] / 11
  const Matrix inv = spd_inverse(A);
  CHECK(inv(0, 0) == doctest::Approx(3.0 / 11.0).epsilon(1e-14));
  CHECK(inv(0, 1) == doctest::Approx(-1.0 / 11.0).epsilon(1e-14));
  CHECK(inv(1, 0) == inv(0, 1));  // symmetrized exactly
  CHECK(inv(1, 1) == doctest::Approx(4.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("spd_inverse of random SPD matrices has tiny residual") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix A = test::random_spd(30, seed);
    const Matrix inv = spd_inverse(A);
    CHECK(inverse_residual(A, inv) < 1e-10);
    CHECK(test::max_abs_diff(inv, inv.transpose()) == 0.0);
  }
}

TEST_CASE("spd_inverse rejects an indefinite matrix") {
  Matrix A(2, 2);
  A << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(spd_inverse(A), Error);
  try {
    spd_inverse(A);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_matrix);
  }
}

TEST_CASE("inverse_residual is the max-norm of inv*A - I") {
  Matrix A(2, 2);
  A << 2.0, 0.0, 0.0, 4.0;
  Matrix wrong(2, 2);
  wrong << 0.5, 0.0, 0.0, 0.5;  // right for (0,0), off by 1 at (1,1)
  CHECK(inverse_residual(A, wrong) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(inverse_residual(A, spd_inverse(A)) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("scaled-inverse expansion is exact for 1x1 matrices") {
  Matrix A(1, 1);
  A << 2.0;
  Matrix A_inv(1, 1);
  A_inv << 0.5;
  Vector D(1);
  D << 3.0;
  const double lambda = 0.7;
  // Target (D*A*D + lambda)^-1 = 1 / (18 + 0.7)
  const Matrix approx = miller_inverse(A_inv, D, lambda);
  CHECK(approx(0, 0) == doctest::Approx(1.0 / 18.7).epsilon(1e-12));
}

TEST_CASE("scaled-inverse expansion is exact at lambda = 0") {
  const Matrix A = test::random_spd(12, 7);
  const Matrix A_inv = spd_inverse(A);
  Vector D(12);
  for (Index i = 0; i < 12; ++i) D(i) = 0.5 + 0.1 * static_cast<double>(i);
  const Matrix approx = miller_inverse(A_inv, D, 0.0);
  const Matrix target = D.asDiagonal() * A * D.asDiagonal();
  CHECK(inverse_residual(target, approx) < 1e-9);
}

TEST_CASE("expansion error grows with lambda and the probe sees it") {
  const Matrix A = test::random_spd(20, 9);
  const Matrix A_inv = spd_inverse(A);
  const Matrix A_inv2 = A_inv * A_inv;
  Vector D(20);
  Rng rng(13);
  for (Index i = 0; i < 20; ++i) D(i) = rng.uniform(0.8, 1.2);

  const double small_lambda = 1e-6;
  const double large_lambda = 10.0;
  const Matrix near = miller_inverse(A_inv, A_inv2, D, small_lambda);
  const Matrix far = miller_inverse(A_inv, A_inv2, D, large_lambda);

  const double res_near = miller_residual(near, A, D, small_lambda);
  const double res_far = miller_residual(far, A, D, large_lambda);
  CHECK(res_near < 1e-3);  // expansion trustworthy for tiny ridges
  CHECK(res_far > res_near);

  // The probe residual reflects the true quality: compare against the
  // exact inverse of the rebuilt target.
  const Matrix target =
      D.asDiagonal() * A * D.asDiagonal() +
      small_lambda * Matrix::Identity(20, 20);
  CHECK(inverse_residual(target, near) < 1e-2);
}

TEST_CASE("the two- and three-argument expansions agree") {
  const Matrix A = test::random_spd(10, 21);
  const Matrix A_inv = spd_inverse(A);
  const Matrix A_inv2 = A_inv * A_inv;
  Vector D = Vector::Constant(10, 1.1);
  const double lambda = 0.01;
  CHECK(test::max_abs_diff(miller_inverse(A_inv, D, lambda),
                           miller_inverse(A_inv, A_inv2, D, lambda)) < 1e-14);
}

TEST_CASE("probe residual is exactly zero for a perfect inverse") {
  const Matrix A = test::random_spd(8, 30);
  Vector D(8);
  for (Index i = 0; i < 8; ++i) D(i) = 1.0 + 0.05 * static_cast<double>(i);
  const double lambda = 0.3;
  const Matrix target = Matrix(D.asDiagonal()) * A * Matrix(D.asDiagonal()) +
                        lambda * Matrix::Identity(8, 8);
  const Matrix exact = spd_inverse(target);
  CHECK(miller_residual(exact, A, D, lambda) < 1e-12);
}

TEST_SUITE_END();
