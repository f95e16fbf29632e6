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

#include "odc/metrics.hpp"

#include <cmath>

#include "odc/errors.hpp"

namespace odc {

namespace {

// min(|d| mod 360, 360 - |d| mod 360): the circle distance in degrees.
double wrap_degrees(double d) {
  double a = std::fmod(std::abs(d), 360.0);
  return std::min(a, 360.0 - a);
}

}  // namespace

double angle_error(const Eigen::Ref<const Vector>& y_hat,
                   const Eigen::Ref<const Vector>& y_true) {
  require(y_hat.size() == y_true.size() && y_hat.size() > 0,
          ErrorCode::invalid_argument,
          "angle_error: vectors must be non-empty and equally sized");
  double sum = 0.0;
  for (Index i = 0; i < y_hat.size(); ++i) {
    sum += wrap_degrees(y_hat(i) - y_true(i));
  }
  return sum / static_cast<double>(y_hat.size());
}

double euclid_error(const Eigen::Ref<const Vector>& y_hat,
                    const Eigen::Ref<const Vector>& y_true, int L) {
  require(y_hat.size() == y_true.size() && y_hat.size() > 0,
          ErrorCode::invalid_argument,
          "euclid_error: vectors must be non-empty and equally sized");
  require(L >= 1, ErrorCode::invalid_argument, "euclid_error: L must be >= 1");
  require(y_hat.size() % L == 0, ErrorCode::invalid_argument,
          "euclid_error: output dim must be divisible by the block count");
  const Index block = y_hat.size() / L;
  double sum = 0.0;
  for (int j = 0; j < L; ++j) {
    sum += (y_hat.segment(j * block, block) - y_true.segment(j * block, block))
               .norm();
  }
  return sum / static_cast<double>(L);
}

double angle_error_mean(const Eigen::Ref<const Matrix>& Y_hat,
                        const Eigen::Ref<const Matrix>& Y_true) {
  require(Y_hat.rows() == Y_true.rows() && Y_hat.cols() == Y_true.cols() &&
              Y_hat.rows() > 0,
          ErrorCode::invalid_argument, "angle_error_mean: shape mismatch");
  double sum = 0.0;
  for (Index i = 0; i < Y_hat.rows(); ++i) {
    sum += angle_error(Y_hat.row(i).transpose(), Y_true.row(i).transpose());
  }
  return sum / static_cast<double>(Y_hat.rows());
}

double euclid_error_mean(const Eigen::Ref<const Matrix>& Y_hat,
                         const Eigen::Ref<const Matrix>& Y_true, int L) {
  require(Y_hat.rows() == Y_true.rows() && Y_hat.cols() == Y_true.cols() &&
              Y_hat.rows() > 0,
          ErrorCode::invalid_argument, "euclid_error_mean: shape mismatch");
  double sum = 0.0;
  for (Index i = 0; i < Y_hat.rows(); ++i) {
    sum += euclid_error(Y_hat.row(i).transpose(), Y_true.row(i).transpose(), L);
  }
  return sum / static_cast<double>(Y_hat.rows());
}

}  // namespace odc
