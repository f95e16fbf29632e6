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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "odc/types.hpp"

namespace odc {

struct Dataset {
  Matrix X;  ///< N x d_x features
  Matrix Y;  ///< N x d_y outputs
  std::vector<std::string> feature_names;  ///< empty when headerless
  std::vector<std::string> output_names;
};

/// Reads a numeric CSV ('.' decimals, ',' separators, optional single
/// header row auto-detected by non-numeric cells).  Ragged rows,
/// unparsable or non-finite cells fail with data_error naming the line
/// and column; missing files fail with io_error.
Matrix load_csv_matrix(const std::string& path,
                       std::vector<std::string>* column_names = nullptr);

/// Loads a paired feature/output CSV set; row-count mismatches fail
/// with data_error naming both counts.
Dataset load_dataset(const std::string& features_path,
                     const std::string& outputs_path);

void write_csv_matrix(const std::string& path,
                      const Eigen::Ref<const Matrix>& M,
                      const std::vector<std::string>& column_names = {});

/// Synthetic dataset families used by the benchmarks and tests.
///   "manifold": a smooth 1-D curve embedded in R^d_x (random Fourier
///     coefficients) with smooth targets; Gaussian noise of the given
///     scale is added to the targets only, so noise = 0 makes targets a
///     pure function of the latent coordinate.
///   "blobs": Gaussian clusters with per-cluster affine targets plus
///     the same target noise.
/// Byte-identical for identical spec fields.
struct SynthSpec {
  std::string kind = "manifold";  ///< "manifold" | "blobs"
  int n = 1000;
  int d_x = 10;
  int d_y = 3;
  double noise = 0.05;
  std::uint64_t seed = 0;
  int blobs = 8;  ///< cluster count for kind == "blobs"
};

Dataset synth_dataset(const SynthSpec& spec);

/// Evaluates the noiseless manifold curve of `spec` at the given latent
/// coordinates, one row per entry of `s`.  The curve depends only on the
/// spec's dimensions and seed, so equal latent values always map to
/// equal feature/target rows.
std::pair<Matrix, Matrix> manifold_curve(const SynthSpec& spec,
                                         const Vector& s);

/// Deterministic train/test split: shuffles row ids with the seed and
/// reserves ceil(n * test_fraction) rows (at least 1) for testing.
struct SplitDataset {
  Dataset train;
  Dataset test;
};

SplitDataset split_dataset(const Dataset& data, double test_fraction,
                           std::uint64_t seed);

}  // namespace odc
