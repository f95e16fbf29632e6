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

#include "odc/optimizer.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "odc/errors.hpp"

namespace odc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineSearchResult {
  bool ok = false;
  double alpha = 0.0;
  double value = 0.0;
  Vector x;
  Vector grad;
  int evaluations = 0;
};

// Minimizer of the cubic through (a, fa, da) and (b, fb, db); falls back
// to the midpoint when the interpolant has no interior minimum.
double cubic_minimizer(double a, double fa, double da, double b, double fb,
                       double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (!(disc >= 0.0)) return 0.5 * (a + b);
  const double d2 = (b >= a ? 1.0 : -1.0) * std::sqrt(disc);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return 0.5 * (a + b);
  double t = b - (b - a) * ((db + d2 - d1) / denom);
  if (!std::isfinite(t)) return 0.5 * (a + b);
  const double lo = std::min(a, b), hi = std::max(a, b);
  // Keep the trial strictly interior; interpolation collapsing onto an
  // endpoint would stall the bracket.
  const double margin = 0.1 * (hi - lo);
  if (t < lo + margin) t = lo + margin;
  if (t > hi - margin) t = hi - margin;
  return t;
}

// Strong-Wolfe line search (bracket + zoom, cubic interpolation).
// Trial points with infinite objective count as sufficient-decrease
// violations, which drives the zoom back into the feasible region.
LineSearchResult line_search(const Objective& f, const Vector& x0, double f0,
                             const Vector& g0, const Vector& dir, double c1,
                             double c2, double alpha_init) {
  LineSearchResult out;
  const double dphi0 = g0.dot(dir);
  if (!(dphi0 < 0.0)) return out;  // not a descent direction

  const int n = static_cast<int>(x0.size());
  Vector x_try(n), g_try(n);
  auto eval = [&](double alpha, double& value, double& slope) {
    x_try = x0 + alpha * dir;
    value = f(x_try, g_try);
    slope = std::isfinite(value) ? g_try.dot(dir) : 0.0;
    out.evaluations++;
  };

  // Precondition: the last eval() was at `alpha`, so x_try/g_try match.
  auto accept = [&](double alpha, double value) {
    out.ok = true;
    out.alpha = alpha;
    out.value = value;
    out.x = x_try;
    out.grad = g_try;
  };

  auto zoom = [&](double lo, double f_lo, double d_lo, double hi, double f_hi,
                  double d_hi) {
    for (int i = 0; i < 30; ++i) {
      double alpha;
      if (std::isfinite(f_hi)) {
        alpha = cubic_minimizer(lo, f_lo, d_lo, hi, f_hi, d_hi);
      } else {
        alpha = 0.5 * (lo + hi);  // shrink toward the feasible side
      }
      double value, slope;
      eval(alpha, value, slope);
      if (!std::isfinite(value) || value > f0 + c1 * alpha * dphi0 ||
          value >= f_lo) {
        hi = alpha;
        f_hi = value;
        d_hi = slope;
      } else {
        if (std::abs(slope) <= -c2 * dphi0) {
          accept(alpha, value);
          return;
        }
        if (slope * (hi - lo) >= 0.0) {
          hi = lo;
          f_hi = f_lo;
          d_hi = d_lo;
        }
        lo = alpha;
        f_lo = value;
        d_lo = slope;
      }
      if (std::abs(hi - lo) <= 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    // Interval collapsed: take the best admissible point if it at least
    // satisfies sufficient decrease.
    if (std::isfinite(f_lo) && f_lo <= f0 + c1 * lo * dphi0 && lo > 0.0) {
      double value, slope;
      eval(lo, value, slope);
      if (std::isfinite(value) && value <= f0 + c1 * lo * dphi0) {
        accept(lo, value);
      }
    }
  };

  double a_prev = 0.0, f_prev = f0, d_prev = dphi0;
  double alpha = alpha_init;
  constexpr double kAlphaMax = 1e8;
  for (int i = 0; i < 25; ++i) {
    double value, slope;
    eval(alpha, value, slope);
    if (!std::isfinite(value) || value > f0 + c1 * alpha * dphi0 ||
        (i > 0 && value >= f_prev)) {
      zoom(a_prev, f_prev, d_prev, alpha, value, slope);
      return out;
    }
    if (std::abs(slope) <= -c2 * dphi0) {
      accept(alpha, value);
      return out;
    }
    if (slope >= 0.0) {
      zoom(alpha, value, slope, a_prev, f_prev, d_prev);
      return out;
    }
    a_prev = alpha;
    f_prev = value;
    d_prev = slope;
    alpha = std::min(2.0 * alpha, kAlphaMax);
    if (alpha >= kAlphaMax) break;
  }
  return out;
}

}  // namespace

OptimizeResult minimize_lbfgs(const Objective& f, const Vector& x0,
                              const OptimizeOptions& options) {
  require(options.max_iterations >= 1, ErrorCode::invalid_argument,
          "minimize_lbfgs: max_iterations must be >= 1");
  require(options.memory >= 1, ErrorCode::invalid_argument,
          "minimize_lbfgs: memory must be >= 1");

  OptimizeResult result;
  const int n = static_cast<int>(x0.size());
  Vector x = x0;
  Vector g(n);
  double fx = f(x, g);
  result.evaluations = 1;
  if (!std::isfinite(fx)) {
    // Infeasible start: nothing to do.
    result.x = x;
    result.value = fx;
    result.grad_norm = kInf;
    result.degenerate = true;
    return result;
  }

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const double gnorm = g.norm();
    if (gnorm <= options.grad_tol) {
      result.converged = true;
      break;
    }

    // Two-loop recursion for d = -H g.
    Vector d = -g;
    if (!s_hist.empty()) {
      const std::size_t m = s_hist.size();
      std::vector<double> alpha_coef(m);
      for (std::size_t i = m; i-- > 0;) {
        alpha_coef[i] = rho_hist[i] * s_hist[i].dot(d);
        d -= alpha_coef[i] * y_hist[i];
      }
      const double gamma =
          s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      d *= gamma;
      for (std::size_t i = 0; i < m; ++i) {
        const double beta = rho_hist[i] * y_hist[i].dot(d);
        d += (alpha_coef[i] - beta) * s_hist[i];
      }
    }
    if (!(g.dot(d) < 0.0)) {
      // Numerically lost descent; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g;
    }

    const double alpha_init =
        s_hist.empty() ? std::min(1.0, 1.0 / std::max(gnorm, 1e-12)) : 1.0;
    LineSearchResult ls = line_search(f, x, fx, g, d, options.c1, options.c2,
                                      alpha_init);
    result.evaluations += ls.evaluations;
    if (!ls.ok) {
      if (iter == 0) result.degenerate = true;
      break;
    }

    const Vector s = ls.x - x;
    const Vector yv = ls.grad - g;
    const double sy = s.dot(yv);
    if (sy > 1e-10 * s.norm() * yv.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = ls.x;
    fx = ls.value;
    g = ls.grad;
    result.iterations = iter + 1;
  }

  result.x = std::move(x);
  result.value = fx;
  result.grad_norm = g.norm();
  return result;
}

}  // namespace odc
