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

#include "odc/types.hpp"

namespace odc {

/// Mean over output dims of the wrapped angular difference in degrees:
/// wrap(d) = min(|d| mod 360, 360 - |d| mod 360), always in [0, 180].
double angle_error(const Eigen::Ref<const Vector>& y_hat,
                   const Eigen::Ref<const Vector>& y_true);

/// Mean over L equal-size coordinate blocks of the Euclidean norm of
/// the per-block difference; dim(y) must be divisible by L.
double euclid_error(const Eigen::Ref<const Vector>& y_hat,
                    const Eigen::Ref<const Vector>& y_true, int L);

/// Row-wise means over prediction matrices.
double angle_error_mean(const Eigen::Ref<const Matrix>& Y_hat,
                        const Eigen::Ref<const Matrix>& Y_true);
double euclid_error_mean(const Eigen::Ref<const Matrix>& Y_hat,
                         const Eigen::Ref<const Matrix>& Y_true, int L);

}  // namespace odc
