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
#include <utility>
#include <vector>

#include "odc/config.hpp"
#include "odc/types.hpp"

namespace odc {

/// One overlapping subdomain: the points of its core cluster plus points
/// borrowed from neighboring clusters, with the Gaussian summary used to
/// rank subdomains at query time.
struct Subdomain {
  int cluster_id = -1;
  std::vector<int> indices;  ///< core indices first, then borrowed
  int core_size = 0;         ///< indices[0 .. core_size) are the core
  Vector mu;                 ///< sample mean of all member points
  Matrix prec;               ///< inverse of the ridged sample covariance

  std::vector<int> core() const {
    return {indices.begin(), indices.begin() + core_size};
  }
  std::vector<int> borrowed() const {
    return {indices.begin() + core_size, indices.end()};
  }
};

/// Mean and ridged-covariance inverse of the selected rows of X.  The
/// covariance uses denominator M (number of rows).  ridge < 0 selects
/// the automatic value 1e-6 * trace(cov)/d floored at 1e-10; ridge >= 0
/// is used as given.  prec is symmetrized exactly.
std::pair<Vector, Matrix> subdomain_stats(const Eigen::Ref<const Matrix>& X,
                                          const std::vector<int>& indices,
                                          double ridge = -1.0);

/// Builds the overlapping cover on top of an equal-size clustering.
///
/// Per cluster k the borrow budget is M - |C_k| (zero when the ring is
/// empty, i.e. p = 0, so that subdomains reduce to the bare clusters).
/// The r nearest other clusters by center distance share the budget
/// proportionally to 1/distance, floor-rounded with the remainder going
/// one point at a time to the closest donors; demands beyond a donor's
/// size cascade outward to the next-nearest clusters.  Each donor
/// contributes its members closest to the receiving cluster's center.
/// All orderings break ties on the lower index.
std::vector<Subdomain> generate_odc(const Eigen::Ref<const Matrix>& X,
                                    const EqualClustering& clustering,
                                    const OdcConfig& config);

/// Outcome of checking a generated cover against its configuration.
struct CoverDiagnostics {
  bool ok = false;
  bool cover_ok = false;    ///< every point of X appears in some subdomain
  bool cores_ok = false;    ///< cores reproduce the clustering partition
  bool sizes_ok = false;    ///< every |D_k| equals its expected size
  bool unique_ok = false;   ///< no duplicate index inside one subdomain
  bool overlap_ok = false;  ///< fractions match the achievable overlap
  double p_nominal = 0.0;
  double p_effective = 0.0; ///< 1 - (N/K)/M, what the geometry permits
  std::vector<double> overlap_fractions;  ///< borrowed share per subdomain
  std::vector<int> missing_points;
  std::string message;      ///< human-readable verdict
};

/// Structural validation of a cover: the cover property, per-subdomain
/// sizes and uniqueness, core/cluster agreement, and the overlap
/// fraction against the achievable p_effective within 1/M (+1/M slack
/// when N is not divisible by K).
CoverDiagnostics validate_cover(const Eigen::Ref<const Matrix>& X,
                                const EqualClustering& clustering,
                                const std::vector<Subdomain>& subdomains,
                                const OdcConfig& config);

}  // namespace odc
