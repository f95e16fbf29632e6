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

#include "odc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>

#include "odc/errors.hpp"

namespace odc {

namespace {

// Min-heap entry: (distance, point index, cluster index).  Lexicographic
// order implements the tie-break contract: equal distances resolve to
// the lowest point index, then the lowest cluster index.
using PairEntry = std::tuple<double, int, int>;
using PairHeap =
    std::priority_queue<PairEntry, std::vector<PairEntry>, std::greater<>>;

std::vector<int> nearest_labels(const Eigen::Ref<const Matrix>& X,
                                const Eigen::Ref<const Matrix>& centers) {
  const Index n = X.rows();
  const Index k = centers.rows();
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (X.row(i) - centers.row(0)).squaredNorm();
    for (Index c = 1; c < k; ++c) {
      const double d = (X.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {  // strict: ties keep the lower cluster index
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

// Per-cluster quotas in {floor(N/K), ceil(N/K)} with exactly N mod K
// clusters at the ceiling.  The ceiling goes to the clusters that are
// already largest (ties: lower index), which minimizes the number of
// repair moves.
std::vector<int> quotas_from_sizes(const std::vector<int>& sizes, int N,
                                   int K) {
  const int floor_q = N / K;
  const int extra = N % K;
  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return sizes[static_cast<std::size_t>(a)] >
           sizes[static_cast<std::size_t>(b)];
  });
  std::vector<int> quota(static_cast<std::size_t>(K), floor_q);
  for (int i = 0; i < extra; ++i) {
    quota[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]++;
  }
  return quota;
}

Matrix centers_from_labels(const Eigen::Ref<const Matrix>& X,
                           const std::vector<int>& labels, int K,
                           const Eigen::Ref<const Matrix>& previous) {
  Matrix centers = Matrix::Zero(K, X.cols());
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (Index i = 0; i < X.rows(); ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    centers.row(c) += X.row(i);
    counts[static_cast<std::size_t>(c)]++;
  }
  for (int c = 0; c < K; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) {
      centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    } else {
      centers.row(c) = previous.row(c);  // emptied cluster keeps its center
    }
  }
  return centers;
}

void check_assign_args(const Eigen::Ref<const Matrix>& X,
                       const Eigen::Ref<const Matrix>& centers) {
  require(X.rows() >= 1, ErrorCode::invalid_argument, "empty point set");
  require(centers.rows() >= 1, ErrorCode::invalid_argument, "no centers");
  require(centers.rows() <= X.rows(), ErrorCode::invalid_argument,
          "more centers than points");
  require(X.cols() == centers.cols(), ErrorCode::invalid_argument,
          "points and centers disagree on dimension");
}

}  // namespace

std::vector<std::vector<int>> EqualClustering::members() const {
  std::vector<std::vector<int>> result(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    result[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  }
  return result;
}

std::vector<int> EqualClustering::sizes() const {
  std::vector<int> result(static_cast<std::size_t>(K), 0);
  for (int label : labels) result[static_cast<std::size_t>(label)]++;
  return result;
}

Matrix init_centers(const Eigen::Ref<const Matrix>& X, int K, Rng& rng) {
  const Index n = X.rows();
  require(K >= 1 && K <= n, ErrorCode::invalid_argument,
          "init_centers: need 1 <= K <= N");
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  std::vector<Index> picks;
  picks.reserve(static_cast<std::size_t>(K));

  const Index first = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
  picks.push_back(first);
  chosen[static_cast<std::size_t>(first)] = 1;

  Vector d2(n);
  for (Index i = 0; i < n; ++i) {
    d2(i) = (X.row(i) - X.row(first)).squaredNorm();
  }

  while (static_cast<int>(picks.size()) < K) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (!chosen[static_cast<std::size_t>(i)]) total += d2(i);
    }
    Index next = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (chosen[static_cast<std::size_t>(i)]) continue;
        cum += d2(i);
        if (cum > target) {
          next = i;
          break;
        }
      }
    }
    if (next < 0) {
      // All remaining mass is zero (duplicates of chosen points) or the
      // draw fell off the end: take the lowest-index unchosen point.
      for (Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) {
          next = i;
          break;
        }
      }
    }
    picks.push_back(next);
    chosen[static_cast<std::size_t>(next)] = 1;
    for (Index i = 0; i < n; ++i) {
      const double d = (X.row(i) - X.row(next)).squaredNorm();
      if (d < d2(i)) d2(i) = d;
    }
  }

  Matrix centers(K, X.cols());
  for (int c = 0; c < K; ++c) {
    centers.row(c) = X.row(picks[static_cast<std::size_t>(c)]);
  }
  return centers;
}

double clustering_cost(const Eigen::Ref<const Matrix>& X,
                       const std::vector<int>& labels,
                       const Eigen::Ref<const Matrix>& centers) {
  require(static_cast<Index>(labels.size()) == X.rows(),
          ErrorCode::invalid_argument, "clustering_cost: label count mismatch");
  double cost = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    require(c >= 0 && c < centers.rows(), ErrorCode::invalid_argument,
            "clustering_cost: label out of range");
    cost += (X.row(i) - centers.row(c)).squaredNorm();
  }
  return cost;
}

std::vector<int> ab_assign(const Eigen::Ref<const Matrix>& X,
                           const Eigen::Ref<const Matrix>& centers) {
  check_assign_args(X, centers);
  const int N = static_cast<int>(X.rows());
  const int K = static_cast<int>(centers.rows());

  std::vector<int> labels = nearest_labels(X, centers);
  std::vector<int> sizes(static_cast<std::size_t>(K), 0);
  for (int label : labels) sizes[static_cast<std::size_t>(label)]++;
  const std::vector<int> quota = quotas_from_sizes(sizes, N, K);

  std::vector<int> surplus(static_cast<std::size_t>(K));
  std::vector<int> deficit(static_cast<std::size_t>(K));
  int total_deficit = 0;
  for (int c = 0; c < K; ++c) {
    surplus[static_cast<std::size_t>(c)] =
        sizes[static_cast<std::size_t>(c)] - quota[static_cast<std::size_t>(c)];
    deficit[static_cast<std::size_t>(c)] =
        std::max(0, quota[static_cast<std::size_t>(c)] -
                        sizes[static_cast<std::size_t>(c)]);
    total_deficit += deficit[static_cast<std::size_t>(c)];
  }
  if (total_deficit == 0) return labels;

  // Every point of an over-quota cluster is a move candidate against
  // every under-quota center; resolve the globally cheapest pair first.
  // Entries invalidate lazily as points move and clusters fill/drain.
  PairHeap heap;
  std::vector<char> moved(static_cast<std::size_t>(N), 0);
  for (int i = 0; i < N; ++i) {
    if (surplus[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] <= 0)
      continue;
    for (int c = 0; c < K; ++c) {
      if (deficit[static_cast<std::size_t>(c)] == 0) continue;
      const double d = (X.row(i) - centers.row(c)).squaredNorm();
      heap.emplace(d, i, c);
    }
  }

  std::vector<int> source = labels;
  while (total_deficit > 0 && !heap.empty()) {
    const auto [d, p, c] = heap.top();
    heap.pop();
    (void)d;
    if (moved[static_cast<std::size_t>(p)]) continue;
    if (surplus[static_cast<std::size_t>(source[static_cast<std::size_t>(p)])] <= 0)
      continue;
    if (deficit[static_cast<std::size_t>(c)] == 0) continue;
    labels[static_cast<std::size_t>(p)] = c;
    moved[static_cast<std::size_t>(p)] = 1;
    surplus[static_cast<std::size_t>(source[static_cast<std::size_t>(p)])]--;
    deficit[static_cast<std::size_t>(c)]--;
    total_deficit--;
  }
  require(total_deficit == 0, ErrorCode::internal_error,
          "ab_assign: rebalancing did not converge");
  return labels;
}

std::vector<int> imda_assign(const Eigen::Ref<const Matrix>& X,
                             const Eigen::Ref<const Matrix>& centers) {
  check_assign_args(X, centers);
  const int N = static_cast<int>(X.rows());
  const int K = static_cast<int>(centers.rows());
  const int floor_q = N / K;
  int bonus = N % K;  // clusters allowed one point above floor_q

  PairHeap heap;
  for (int i = 0; i < N; ++i) {
    for (int c = 0; c < K; ++c) {
      heap.emplace((X.row(i) - centers.row(c)).squaredNorm(), i, c);
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(N), -1);
  std::vector<int> sizes(static_cast<std::size_t>(K), 0);
  int assigned = 0;
  while (assigned < N && !heap.empty()) {
    const auto [d, p, c] = heap.top();
    heap.pop();
    (void)d;
    if (labels[static_cast<std::size_t>(p)] >= 0) continue;
    const int size = sizes[static_cast<std::size_t>(c)];
    if (size < floor_q) {
      // still below the guaranteed quota
    } else if (size == floor_q && bonus > 0) {
      bonus--;  // consume one of the N mod K over-floor slots
    } else {
      continue;  // cluster is closed
    }
    labels[static_cast<std::size_t>(p)] = c;
    sizes[static_cast<std::size_t>(c)]++;
    assigned++;
  }
  require(assigned == N, ErrorCode::internal_error,
          "imda_assign: construction did not place every point");
  return labels;
}

Matrix lloyd_kmeans(const Eigen::Ref<const Matrix>& X, int K, int max_iter,
                    std::uint64_t seed) {
  require(max_iter >= 1, ErrorCode::invalid_argument,
          "lloyd_kmeans: max_iter must be >= 1");
  Rng rng(seed);
  Matrix centers = init_centers(X, K, rng);
  std::vector<int> prev;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<int> labels = nearest_labels(X, centers);
    if (labels == prev) break;
    centers = centers_from_labels(X, labels, K, centers);
    prev = std::move(labels);
  }
  return centers;
}

EqualClustering ekmeans(const Eigen::Ref<const Matrix>& X, int K,
                        ClusteringKind variant, int max_iter,
                        std::uint64_t seed) {
  if (variant == ClusteringKind::rpc) return rpc(X, K, seed);
  Rng rng(seed);
  const Matrix centers = init_centers(X, K, rng);
  return ekmeans(X, K, variant, max_iter, seed, centers);
}

EqualClustering ekmeans(const Eigen::Ref<const Matrix>& X, int K,
                        ClusteringKind variant, int max_iter,
                        std::uint64_t seed,
                        const Eigen::Ref<const Matrix>& warm_start) {
  require(max_iter >= 1, ErrorCode::invalid_argument,
          "ekmeans: max_iter must be >= 1");
  if (variant == ClusteringKind::rpc) return rpc(X, K, seed);
  require(warm_start.rows() == K && warm_start.cols() == X.cols(),
          ErrorCode::invalid_argument, "ekmeans: warm-start center shape");

  EqualClustering result;
  result.K = K;
  Matrix centers = warm_start;
  std::vector<int> labels;
  std::vector<int> prev;
  for (int iter = 0; iter < max_iter; ++iter) {
    labels = (variant == ClusteringKind::ab) ? ab_assign(X, centers)
                                             : imda_assign(X, centers);
    if (labels == prev) break;
    centers = centers_from_labels(X, labels, K, centers);
    prev = labels;
  }
  result.labels = std::move(labels);
  result.centers = std::move(centers);
  result.cost = clustering_cost(X, result.labels, result.centers);
  return result;
}

EqualClustering rpc(const Eigen::Ref<const Matrix>& X, int target_K,
                    std::uint64_t seed) {
  const int N = static_cast<int>(X.rows());
  require(target_K >= 1, ErrorCode::invalid_argument,
          "rpc: target_K must be >= 1");
  int levels = 0;
  while ((1 << levels) < target_K) levels++;
  const int K = 1 << levels;
  require(K <= N, ErrorCode::invalid_argument,
          "rpc: rounded K exceeds the number of points");

  Rng rng(seed);
  std::vector<std::vector<int>> parts{std::vector<int>(static_cast<std::size_t>(N))};
  std::iota(parts[0].begin(), parts[0].end(), 0);

  for (int level = 0; level < levels; ++level) {
    std::vector<std::vector<int>> next;
    next.reserve(parts.size() * 2);
    for (const auto& part : parts) {
      const int m = static_cast<int>(part.size());
      // Direction through two distinct random members; identical
      // coordinates force a redraw, then the first-axis fallback.
      Vector dir = Vector::Zero(X.cols());
      for (int attempt = 0; attempt < 10; ++attempt) {
        const int a = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m)));
        int b = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m - 1)));
        if (b >= a) b++;
        dir = (X.row(part[static_cast<std::size_t>(b)]) -
               X.row(part[static_cast<std::size_t>(a)]))
                  .transpose();
        if (dir.squaredNorm() > 0.0) break;
      }
      if (dir.squaredNorm() == 0.0) dir(0) = 1.0;

      std::vector<std::pair<double, int>> projected;
      projected.reserve(part.size());
      for (int idx : part) {
        projected.emplace_back(X.row(idx).dot(dir.transpose()), idx);
      }
      std::sort(projected.begin(), projected.end());  // ties: lower index

      const int left_size = (m + 1) / 2;  // lower half keeps the extra point
      std::vector<int> left, right;
      left.reserve(static_cast<std::size_t>(left_size));
      right.reserve(static_cast<std::size_t>(m - left_size));
      for (int i = 0; i < m; ++i) {
        (i < left_size ? left : right)
            .push_back(projected[static_cast<std::size_t>(i)].second);
      }
      next.push_back(std::move(left));
      next.push_back(std::move(right));
    }
    parts = std::move(next);
  }

  EqualClustering result;
  result.K = K;
  result.labels.assign(static_cast<std::size_t>(N), -1);
  for (int c = 0; c < K; ++c) {
    for (int idx : parts[static_cast<std::size_t>(c)]) {
      result.labels[static_cast<std::size_t>(idx)] = c;
    }
  }
  result.centers = centers_from_labels(X, result.labels, K,
                                       Matrix::Zero(K, X.cols()));
  result.cost = clustering_cost(X, result.labels, result.centers);
  return result;
}

}  // namespace odc
