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

#include <Eigen/Cholesky>
#include <cmath>

#include "helpers.hpp"
#include "odc/errors.hpp"
#include "odc/kernels.hpp"
#include "odc/linalg.hpp"
#include "odc/machines.hpp"
#include "odc/rulsif.hpp"

namespace {

using odc::Matrix;
using odc::Vector;

odc::HyperParams small_hyper() {
  odc::HyperParams hyper;
  hyper.rho_x2 = 2.0;
  hyper.rho_y2 = 2.0;
  hyper.lambda_x = 1e-3;
  hyper.lambda_y = 1e-3;
  return hyper;
}

struct Fixture {
  Matrix X;
  Matrix Y;
  odc::HyperParams hyper;
  odc::IwtgpMachine machine;

  Fixture(int m, int seed)
      : X(odc::test::random_matrix(m, 2, seed, -1.0, 1.0)),
        Y(odc::test::normal_matrix(m, 2, seed + 1)),
        hyper(small_hyper()),
        machine(odc::iwtgp_train(X, Y, hyper)) {}
};

// The exact weighted inverse, from scratch: D (D K D + lambda I)^-1 D.
Matrix oracle_weighted_inverse(const Matrix& points, double denom,
                               const Vector& w, double lambda) {
  const Vector sw = w.cwiseMax(1e-8).cwiseSqrt();
  Matrix target = sw.asDiagonal() * odc::kernel_matrix(points, denom, false) *
                  sw.asDiagonal();
  target.diagonal().array() += lambda;
  const Matrix inv =
      Eigen::LDLT<Matrix>(target).solve(Matrix::Identity(points.rows(),
                                                         points.rows()));
  return sw.asDiagonal() * inv * sw.asDiagonal();
}

}  // namespace

TEST_SUITE("iwtgp") {

TEST_CASE("training stores jittered inverses and their exact squares") {
  Fixture f(10, 201);
  CHECK(f.machine.jitter == doctest::Approx(1e-7).epsilon(1e-12));
  Matrix kx = odc::kernel_matrix(f.X, f.hyper.rho_x2, false);
  kx.diagonal().array() += f.machine.jitter;
  CHECK((f.machine.Kx_inv * kx - Matrix::Identity(10, 10))
            .cwiseAbs()
            .maxCoeff() < 1e-6);
  CHECK((f.machine.Kx_inv2 - f.machine.Kx_inv * f.machine.Kx_inv).norm() ==
        0.0);
  CHECK((f.machine.Ky_inv2 - f.machine.Ky_inv * f.machine.Ky_inv).norm() ==
        0.0);
}

TEST_CASE("unit weights reproduce the unweighted machine exactly") {
  Fixture f(12, 203);
  const auto tgp = odc::tgp_train(f.X, f.Y, f.hyper);
  const auto inv =
      odc::iwtgp_form_inverses(f.machine, f.hyper, Vector::Ones(12));
  // Identity weights short-circuit to the exact path.
  CHECK(inv.fallback_x);
  CHECK(inv.fallback_y);
  CHECK((inv.Bx - tgp.Kx_inv).cwiseAbs().maxCoeff() == 0.0);
  CHECK((inv.By - tgp.Ky_inv).cwiseAbs().maxCoeff() == 0.0);

  // Objective and prediction coincide with the unweighted machine.
  const Vector x = Vector::Constant(2, 0.3);
  const Vector y = Vector::Constant(2, -0.2);
  CHECK(odc::iwtgp_objective(f.machine, f.hyper, inv, x, y) ==
        doctest::Approx(odc::tgp_objective(tgp, f.hyper, x, y))
            .epsilon(1e-14));
  const auto a = odc::iwtgp_predict(f.machine, f.hyper, inv, x);
  const auto b = odc::tgp_predict(tgp, f.hyper, x);
  CHECK((a.y - b.y).norm() == 0.0);
  CHECK(a.objective == b.objective);
}

TEST_CASE("the exact mode matches an independent factorization") {
  Fixture f(10, 205);
  const Vector w =
      odc::test::random_matrix(10, 1, 206, 0.5, 2.0).col(0);
  const auto inv = odc::iwtgp_form_inverses(f.machine, f.hyper, w,
                                            odc::InverseMode::direct);
  CHECK(inv.fallback_x);
  CHECK(inv.fallback_y);
  CHECK((inv.Bx - oracle_weighted_inverse(f.X, f.hyper.rho_x2, w,
                                          f.hyper.lambda_x))
            .cwiseAbs()
            .maxCoeff() < 1e-8);
  CHECK((inv.By - oracle_weighted_inverse(f.Y, f.hyper.rho_y2, w,
                                          f.hyper.lambda_y))
            .cwiseAbs()
            .maxCoeff() < 1e-8);
}

TEST_CASE("the expansion mode is the sandwiched series formula") {
  Fixture f(10, 207);
  const Vector w =
      odc::test::random_matrix(10, 1, 208, 0.8, 1.2).col(0);
  const Vector sw = w.cwiseMax(1e-8).cwiseSqrt();
  const auto inv = odc::iwtgp_form_inverses(f.machine, f.hyper, w,
                                            odc::InverseMode::miller);
  CHECK_FALSE(inv.fallback_x);
  CHECK_FALSE(inv.fallback_y);
  const Matrix expected_x =
      sw.asDiagonal() *
      odc::miller_inverse(f.machine.Kx_inv, f.machine.Kx_inv2, sw,
                          f.hyper.lambda_x) *
      sw.asDiagonal();
  CHECK((inv.Bx - expected_x).cwiseAbs().maxCoeff() == 0.0);

  // For mild weights the expansion is close to the exact inverse.
  const Matrix exact = oracle_weighted_inverse(f.X, f.hyper.rho_x2, w,
                                               f.hyper.lambda_x);
  CHECK((inv.Bx - exact).cwiseAbs().maxCoeff() < 1e-2);
  CHECK(inv.residual_x >= 0.0);
}

TEST_CASE("automatic mode honors the residual budget") {
  Fixture f(12, 209);
  for (int trial = 1; trial < 6; ++trial) {
    // Weight spreads from mild to violent.  (All-equal weights take the
    // documented identity short-circuit instead and are covered above.)
    const double spread = std::pow(10.0, trial);
    Vector w = odc::test::random_matrix(12, 1, 300 + trial, 0.0, 1.0).col(0);
    w = (w.array() * std::log(spread)).exp();  // in [1, spread]
    const auto inv = odc::iwtgp_form_inverses(f.machine, f.hyper, w,
                                              odc::InverseMode::automatic);
    // Wherever the probe residual exceeds the budget the exact path
    // takes over, otherwise the expansion is kept.
    CHECK(inv.fallback_x == (inv.residual_x > 1e-3));
    CHECK(inv.fallback_y == (inv.residual_y > 1e-3));
    // Either way the result is a usable inverse: compare against the
    // exact recomputation with a bound that scales with the residual.
    const Matrix exact = oracle_weighted_inverse(f.X, f.hyper.rho_x2, w,
                                                 f.hyper.lambda_x);
    if (inv.fallback_x) {
      CHECK((inv.Bx - exact).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("weights are floored before use") {
  Fixture f(8, 211);
  Vector dirty = Vector::Ones(8);
  dirty(0) = 0.0;
  dirty(1) = -5.0;
  Vector clean = Vector::Ones(8);
  clean(0) = 1e-8;
  clean(1) = 1e-8;
  const auto a = odc::iwtgp_form_inverses(f.machine, f.hyper, dirty);
  const auto b = odc::iwtgp_form_inverses(f.machine, f.hyper, clean);
  CHECK((a.Bx - b.Bx).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.By - b.By).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.Bx.allFinite());
}

TEST_CASE("batch prediction computes the ratio weights once and reuses them") {
  Fixture f(8, 213);
  const Matrix batch = odc::test::random_matrix(3, 2, 214, -1.0, 1.0);
  const Matrix got = odc::iwtgp_predict_batch(f.machine, f.hyper, batch);

  // Reproduce the documented pipeline step by step.
  const auto ratio =
      odc::rulsif_fit(f.X, batch, f.hyper.rulsif_alpha, f.hyper.rulsif_tau2,
                      f.hyper.rulsif_nu, false);
  const Vector weights = odc::rulsif_weights(ratio, f.X);
  const auto inv = odc::iwtgp_form_inverses(f.machine, f.hyper, weights);
  for (odc::Index i = 0; i < batch.rows(); ++i) {
    const auto pred = odc::iwtgp_predict(f.machine, f.hyper, inv,
                                         batch.row(i).transpose());
    CHECK((got.row(i).transpose() - pred.y).norm() == 0.0);
  }
}

TEST_CASE("structured descent contract holds under weighting") {
  Fixture f(12, 215);
  const Matrix batch = odc::test::random_matrix(4, 2, 216, -1.5, 1.5);
  const auto ratio =
      odc::rulsif_fit(f.X, batch, 0.1, 0.0, 1e-3, false);
  const auto inv = odc::iwtgp_form_inverses(
      f.machine, f.hyper, odc::rulsif_weights(ratio, f.X));
  for (odc::Index i = 0; i < batch.rows(); ++i) {
    const auto pred = odc::iwtgp_predict(f.machine, f.hyper, inv,
                                         batch.row(i).transpose());
    CHECK(pred.objective <= pred.objective_init + 1e-12);
    CHECK(pred.y.allFinite());
  }
}

TEST_CASE("argument validation") {
  Fixture f(6, 217);
  CHECK_THROWS_AS(
      odc::iwtgp_form_inverses(f.machine, f.hyper, Vector::Ones(5)),
      odc::Error);
  CHECK_THROWS_AS(
      odc::iwtgp_predict_batch(f.machine, f.hyper, Matrix(0, 2)),
      odc::Error);
  const auto inv =
      odc::iwtgp_form_inverses(f.machine, f.hyper, Vector::Ones(6));
  CHECK_THROWS_AS(odc::iwtgp_objective(f.machine, f.hyper, inv,
                                       Vector::Zero(3), Vector::Zero(2)),
                  odc::Error);
}

}  // TEST_SUITE
