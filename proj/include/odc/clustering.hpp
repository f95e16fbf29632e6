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

#include <string>
#include <vector>

#include "odc/rng.hpp"
#include "odc/types.hpp"

namespace odc {

/// Balanced-assignment variants.  `ab` starts from the unconstrained
/// nearest-center assignment and repairs it by moving points out of
/// over-quota clusters; `imda` builds the assignment from scratch in
/// globally nearest-pair order; `rpc` is recursive median splitting on
/// random projections (K rounded up to a power of two).
enum class ClusteringKind { ab, imda, rpc };

ClusteringKind clustering_kind_from_string(const std::string& name);
const char* clustering_kind_name(ClusteringKind kind);

/// A size-balanced hard clustering: every |C_i| is floor(N/K) or
/// ceil(N/K), with exactly (N mod K) clusters at the ceiling.
struct EqualClustering {
  int K = 0;
  std::vector<int> labels;  ///< size N, values in [0, K)
  Matrix centers;           ///< K x d, mean of members
  double cost = 0.0;        ///< sum of squared distances to own center

  std::vector<std::vector<int>> members() const;
  std::vector<int> sizes() const;
};

/// Weighted farthest-point seeding (k-means++ style): K distinct rows of
/// X, deterministic given the Rng state.
Matrix init_centers(const Eigen::Ref<const Matrix>& X, int K, Rng& rng);

/// Sum over points of the squared distance to the center of the assigned
/// cluster: J(C) = sum_j sum_{x in C_j} ||x - mu_j||^2.
double clustering_cost(const Eigen::Ref<const Matrix>& X,
                       const std::vector<int>& labels,
                       const Eigen::Ref<const Matrix>& centers);

/// Balanced assignment, repair style: unconstrained nearest-center
/// assignment, then points from over-quota clusters move to the globally
/// closest under-quota center one at a time (distance ties break on
/// lowest point index, then lowest cluster index).  Cost is always >=
/// the unconstrained nearest-center cost.
std::vector<int> ab_assign(const Eigen::Ref<const Matrix>& X,
                           const Eigen::Ref<const Matrix>& centers);

/// Balanced assignment, constructive style: starting from no assignment,
/// repeatedly commit the globally closest (unassigned point, open
/// center) pair; a center closes once it reaches its quota.  Same
/// tie-break order as ab_assign.
std::vector<int> imda_assign(const Eigen::Ref<const Matrix>& X,
                             const Eigen::Ref<const Matrix>& centers);

/// Standard (unbalanced) Lloyd k-means from k-means++ seeding; returns
/// converged centers.  Used as the shared warm start when comparing the
/// balanced variants, and available as plain plumbing.
Matrix lloyd_kmeans(const Eigen::Ref<const Matrix>& X, int K, int max_iter,
                    std::uint64_t seed);

/// Balanced k-means: alternates the chosen balanced assignment with a
/// center update (mean of members; an emptied cluster keeps its previous
/// center) until labels stabilize or max_iter rounds.  Seeds centers via
/// init_centers unless warm_start centers are supplied.
EqualClustering ekmeans(const Eigen::Ref<const Matrix>& X, int K,
                        ClusteringKind variant, int max_iter,
                        std::uint64_t seed);
EqualClustering ekmeans(const Eigen::Ref<const Matrix>& X, int K,
                        ClusteringKind variant, int max_iter,
                        std::uint64_t seed,
                        const Eigen::Ref<const Matrix>& warm_start);

/// Random-projection clustering: recursively split each part at the
/// median of the projection onto the line through two randomly chosen
/// member points, until 2^levels >= target_K.  K comes out as that power
/// of two; split sizes differ by at most one at every level.
EqualClustering rpc(const Eigen::Ref<const Matrix>& X, int target_K,
                    std::uint64_t seed);

}  // namespace odc
