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

#include "odc/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "odc/linalg.hpp"

namespace odc {

namespace {

// Members of a donor cluster ordered by distance to the receiving
// center (ties: lower index); only the first `count` are taken.
std::vector<int> closest_members(const Eigen::Ref<const Matrix>& X,
                                 const std::vector<int>& members,
                                 const Vector& target, int count) {
  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(members.size());
  for (int idx : members) {
    ranked.emplace_back((X.row(idx).transpose() - target).squaredNorm(), idx);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(ranked[static_cast<std::size_t>(i)].second);
  }
  return out;
}

}  // namespace

std::pair<Vector, Matrix> subdomain_stats(const Eigen::Ref<const Matrix>& X,
                                          const std::vector<int>& indices,
                                          double ridge) {
  require(!indices.empty(), ErrorCode::invalid_argument,
          "subdomain_stats: empty index set");
  const Index d = X.cols();
  Vector mu = Vector::Zero(d);
  for (int idx : indices) {
    require(idx >= 0 && idx < X.rows(), ErrorCode::invalid_argument,
            "subdomain_stats: index out of range");
    mu += X.row(idx).transpose();
  }
  mu /= static_cast<double>(indices.size());

  Matrix cov = Matrix::Zero(d, d);
  for (int idx : indices) {
    const Vector centered = X.row(idx).transpose() - mu;
    cov += centered * centered.transpose();
  }
  cov /= static_cast<double>(indices.size());

  if (ridge < 0.0) {
    // Scale-aware default, floored so a zero-spread subdomain stays
    // invertible.
    ridge = std::max(1e-6 * cov.trace() / static_cast<double>(d), 1e-10);
  }
  cov.diagonal().array() += ridge;
  Matrix prec = spd_inverse(cov);
  return {std::move(mu), std::move(prec)};
}

std::vector<Subdomain> generate_odc(const Eigen::Ref<const Matrix>& X,
                                    const EqualClustering& clustering,
                                    const OdcConfig& config) {
  config.validate();
  const int N = static_cast<int>(X.rows());
  require(static_cast<int>(clustering.labels.size()) == N,
          ErrorCode::invalid_argument, "generate_odc: label count mismatch");
  const int K = clustering.K;
  require(K >= 1, ErrorCode::invalid_argument, "generate_odc: empty clustering");

  const auto members = clustering.members();
  for (int k = 0; k < K; ++k) {
    require(!members[static_cast<std::size_t>(k)].empty(),
            ErrorCode::invalid_argument,
            "generate_odc: cluster " + std::to_string(k) + " is empty");
    require(static_cast<int>(members[static_cast<std::size_t>(k)].size()) <=
                config.M,
            ErrorCode::config_error,
            "generate_odc: cluster larger than the subdomain size M");
  }
  const int r = config.ring_size();

  std::vector<Subdomain> subdomains;
  subdomains.reserve(static_cast<std::size_t>(K));

  for (int k = 0; k < K; ++k) {
    const auto& core = members[static_cast<std::size_t>(k)];
    Subdomain sd;
    sd.cluster_id = k;
    sd.indices = core;
    sd.core_size = static_cast<int>(core.size());

    // Borrow budget: top the core up to exactly M points.  An empty
    // ring (p = 0) keeps the bare cluster.
    const int budget = (r == 0) ? 0 : config.M - sd.core_size;
    if (budget > 0) {
      require(K >= 2, ErrorCode::config_error,
              "generate_odc: p > 0 needs at least two clusters");

      // All other clusters by center distance, ascending (ties: index).
      std::vector<std::pair<double, int>> ring;
      ring.reserve(static_cast<std::size_t>(K - 1));
      for (int j = 0; j < K; ++j) {
        if (j == k) continue;
        ring.emplace_back(
            (clustering.centers.row(j) - clustering.centers.row(k)).norm(), j);
      }
      std::sort(ring.begin(), ring.end());
      const int ring_count = std::min(r, static_cast<int>(ring.size()));

      // Inverse-distance budget shares over the r nearest clusters.
      std::vector<double> likeness(static_cast<std::size_t>(ring_count));
      double likeness_sum = 0.0;
      for (int i = 0; i < ring_count; ++i) {
        const double dist = ring[static_cast<std::size_t>(i)].first;
        likeness[static_cast<std::size_t>(i)] =
            dist > 0.0 ? 1.0 / dist : 1e300;  // coincident centers dominate
        likeness_sum += likeness[static_cast<std::size_t>(i)];
      }

      std::vector<int> request(ring.size(), 0);
      int allocated = 0;
      for (int i = 0; i < ring_count; ++i) {
        const double share = likeness[static_cast<std::size_t>(i)] / likeness_sum;
        request[static_cast<std::size_t>(i)] = static_cast<int>(
            std::floor(share * static_cast<double>(budget) + 1e-12));
        allocated += request[static_cast<std::size_t>(i)];
      }
      // Floor-rounding remainder: one extra point per cluster,
      // nearest-first.
      for (int i = 0; allocated < budget && i < ring_count; ++i) {
        request[static_cast<std::size_t>(i)]++;
        allocated++;
      }

      // Clamp requests to donor sizes; unmet demand cascades outward to
      // the next-nearest clusters (possibly beyond the ring).
      int shortfall = 0;
      for (std::size_t i = 0; i < ring.size(); ++i) {
        const int cap = static_cast<int>(
            members[static_cast<std::size_t>(ring[i].second)].size());
        if (request[i] > cap) {
          shortfall += request[i] - cap;
          request[i] = cap;
        }
      }
      for (std::size_t i = 0; shortfall > 0 && i < ring.size(); ++i) {
        const int cap = static_cast<int>(
            members[static_cast<std::size_t>(ring[i].second)].size());
        const int room = cap - request[i];
        const int take = std::min(room, shortfall);
        request[i] += take;
        shortfall -= take;
      }
      require(shortfall == 0, ErrorCode::config_error,
              "generate_odc: dataset too small to fill subdomains of size M");

      const Vector center_k = clustering.centers.row(k).transpose();
      for (std::size_t i = 0; i < ring.size(); ++i) {
        if (request[i] == 0) continue;
        const auto borrowed = closest_members(
            X, members[static_cast<std::size_t>(ring[i].second)], center_k,
            request[i]);
        sd.indices.insert(sd.indices.end(), borrowed.begin(), borrowed.end());
      }
    }

    auto [mu, prec] = subdomain_stats(X, sd.indices);
    sd.mu = std::move(mu);
    sd.prec = std::move(prec);
    subdomains.push_back(std::move(sd));
  }
  return subdomains;
}

CoverDiagnostics validate_cover(const Eigen::Ref<const Matrix>& X,
                                const EqualClustering& clustering,
                                const std::vector<Subdomain>& subdomains,
                                const OdcConfig& config) {
  CoverDiagnostics diag;
  const int N = static_cast<int>(X.rows());
  const int K = static_cast<int>(subdomains.size());
  diag.p_nominal = config.p;

  std::ostringstream problems;

  if (K == 0) {
    diag.message = "no subdomains";
    return diag;
  }

  // Cover property: every point appears somewhere.
  std::vector<int> hit(static_cast<std::size_t>(N), 0);
  for (const auto& sd : subdomains) {
    for (int idx : sd.indices) {
      if (idx >= 0 && idx < N) hit[static_cast<std::size_t>(idx)]++;
    }
  }
  for (int i = 0; i < N; ++i) {
    if (hit[static_cast<std::size_t>(i)] == 0) diag.missing_points.push_back(i);
  }
  diag.cover_ok = diag.missing_points.empty();
  if (!diag.cover_ok) {
    problems << diag.missing_points.size() << " points not covered; ";
  }

  // Cores must reproduce the clustering partition.
  const auto members = clustering.members();
  diag.cores_ok = true;
  for (const auto& sd : subdomains) {
    if (sd.cluster_id < 0 || sd.cluster_id >= clustering.K) {
      diag.cores_ok = false;
      break;
    }
    std::vector<int> core = sd.core();
    std::sort(core.begin(), core.end());
    std::vector<int> expected = members[static_cast<std::size_t>(sd.cluster_id)];
    std::sort(expected.begin(), expected.end());
    if (core != expected) {
      diag.cores_ok = false;
      break;
    }
  }
  if (!diag.cores_ok) problems << "cores do not match the clustering; ";

  // Sizes, uniqueness, and overlap fractions.
  const int r = config.ring_size();
  diag.sizes_ok = true;
  diag.unique_ok = true;
  diag.overlap_fractions.reserve(static_cast<std::size_t>(K));
  const double n_over_k = static_cast<double>(N) / static_cast<double>(K);
  diag.p_effective =
      std::max(0.0, 1.0 - n_over_k / static_cast<double>(config.M));
  // 1/M granularity plus another 1/M when N % K != 0 (core sizes differ
  // by one between subdomains).
  const double tol = (1.0 + (N % K == 0 ? 0.0 : 1.0) + 1e-9) /
                     static_cast<double>(config.M);
  diag.overlap_ok = true;
  for (const auto& sd : subdomains) {
    const int expected_size = (r == 0) ? sd.core_size : config.M;
    if (static_cast<int>(sd.indices.size()) != expected_size) {
      diag.sizes_ok = false;
    }
    std::vector<int> sorted = sd.indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      diag.unique_ok = false;
    }
    const double frac =
        sd.indices.empty()
            ? 0.0
            : static_cast<double>(sd.indices.size() - sd.core().size()) /
                  static_cast<double>(sd.indices.size());
    diag.overlap_fractions.push_back(frac);
    const double target = (r == 0) ? 0.0 : diag.p_effective;
    if (std::abs(frac - target) > tol) diag.overlap_ok = false;
  }
  if (!diag.sizes_ok) problems << "subdomain size mismatch; ";
  if (!diag.unique_ok) problems << "duplicate indices inside a subdomain; ";
  if (!diag.overlap_ok) {
    problems << "overlap fraction off target (p_effective="
             << diag.p_effective << "); ";
  }

  diag.ok = diag.cover_ok && diag.cores_ok && diag.sizes_ok &&
            diag.unique_ok && diag.overlap_ok;
  diag.message = diag.ok ? "cover valid" : problems.str();
  return diag;
}

}  // namespace odc
