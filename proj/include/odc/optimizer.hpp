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

#include <functional>

#include "odc/types.hpp"

namespace odc {

/// Objective callback: returns f(x) and fills grad (same size as x).
/// May return +infinity outside the feasible region (grad is then
/// ignored); the line search treats such points as failed trial steps.
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct OptimizeOptions {
  int max_iterations = 100;  ///< outer quasi-Newton iterations
  double grad_tol = 1e-6;    ///< stop when ||grad||_2 <= grad_tol
  double c1 = 1e-4;          ///< sufficient-decrease (Armijo) constant
  double c2 = 0.9;           ///< curvature constant
  int memory = 10;           ///< L-BFGS history pairs
};

struct OptimizeResult {
  Vector x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;   ///< gradient tolerance reached
  bool degenerate = false;  ///< no line search ever succeeded; x == x0
};

/// Limited-memory BFGS with a strong-Wolfe line search using cubic
/// interpolation.  Monotone: the returned value never exceeds f(x0).
OptimizeResult minimize_lbfgs(const Objective& f, const Vector& x0,
                              const OptimizeOptions& options = {});

}  // namespace odc
