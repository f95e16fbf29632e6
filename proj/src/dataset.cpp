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

#include "odc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "odc/errors.hpp"
#include "odc/rng.hpp"

namespace odc {

namespace {

bool parse_cell(const std::string& cell, double* out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  // Tolerate surrounding spaces, as produced by hand-edited CSVs.
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  if (begin == end) return false;
  // from_chars takes a leading '-' but not a '+'; accept both.
  if (*begin == '+' && begin + 1 < end) ++begin;
  const auto result = std::from_chars(begin, end, *out);
  return result.ec == std::errc() && result.ptr == end;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Matrix load_csv_matrix(const std::string& path,
                       std::vector<std::string>* column_names) {
  std::ifstream file(path);
  if (!file) fail(ErrorCode::io_error, "cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first_content_line = true;

  while (std::getline(file, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);

    if (first_content_line) {
      // Header row iff any cell fails numeric parsing.
      bool all_numeric = true;
      double ignored;
      for (const auto& cell : cells) {
        if (!parse_cell(cell, &ignored)) {
          all_numeric = false;
          break;
        }
      }
      first_content_line = false;
      width = cells.size();
      if (!all_numeric) {
        names = cells;
        continue;
      }
    }

    if (cells.size() != width) {
      fail(ErrorCode::data_error,
           path + ":" + std::to_string(line_no) + ": expected " +
               std::to_string(width) + " columns, found " +
               std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double value;
      if (!parse_cell(cells[c], &value)) {
        fail(ErrorCode::data_error,
             path + ":" + std::to_string(line_no) + ": column " +
                 std::to_string(c + 1) + ": cannot parse '" + cells[c] +
                 "' as a number");
      }
      if (!std::isfinite(value)) {
        fail(ErrorCode::data_error,
             path + ":" + std::to_string(line_no) + ": column " +
                 std::to_string(c + 1) + ": non-finite value");
      }
      row[c] = value;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    fail(ErrorCode::data_error, path + ": no data rows");
  }

  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      M(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  if (column_names) *column_names = std::move(names);
  return M;
}

Dataset load_dataset(const std::string& features_path,
                     const std::string& outputs_path) {
  Dataset data;
  data.X = load_csv_matrix(features_path, &data.feature_names);
  data.Y = load_csv_matrix(outputs_path, &data.output_names);
  if (data.X.rows() != data.Y.rows()) {
    fail(ErrorCode::data_error,
         "row count mismatch: '" + features_path + "' has " +
             std::to_string(data.X.rows()) + " rows but '" + outputs_path +
             "' has " + std::to_string(data.Y.rows()));
  }
  return data;
}

void write_csv_matrix(const std::string& path,
                      const Eigen::Ref<const Matrix>& M,
                      const std::vector<std::string>& column_names) {
  std::ofstream file(path);
  if (!file) fail(ErrorCode::io_error, "cannot write '" + path + "'");
  if (!column_names.empty()) {
    require(static_cast<Index>(column_names.size()) == M.cols(),
            ErrorCode::invalid_argument,
            "write_csv_matrix: one column name per column required");
    for (std::size_t j = 0; j < column_names.size(); ++j) {
      file << (j ? "," : "") << column_names[j];
    }
    file << '\n';
  }
  char buffer[64];
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", M(i, j));
      file << (j ? "," : "") << buffer;
    }
    file << '\n';
  }
  if (!file) fail(ErrorCode::io_error, "write failed for '" + path + "'");
}

namespace {

constexpr int kHarmonics = 3;

struct CurveCoeffs {
  // amplitude[dim][harmonic], phase[dim][harmonic]
  std::vector<std::array<double, kHarmonics>> amp;
  std::vector<std::array<double, kHarmonics>> phase;
};

CurveCoeffs draw_coeffs(Rng& rng, int dims, double scale) {
  CurveCoeffs c;
  c.amp.resize(static_cast<std::size_t>(dims));
  c.phase.resize(static_cast<std::size_t>(dims));
  for (int j = 0; j < dims; ++j) {
    for (int h = 0; h < kHarmonics; ++h) {
      // Higher harmonics decay so the curve stays smooth.
      c.amp[static_cast<std::size_t>(j)][static_cast<std::size_t>(h)] =
          scale * rng.normal() / static_cast<double>(h + 1);
      c.phase[static_cast<std::size_t>(j)][static_cast<std::size_t>(h)] =
          rng.uniform(0.0, 2.0 * M_PI);
    }
  }
  return c;
}

double eval_curve_dim(const CurveCoeffs& c, int dim, double s) {
  double v = 0.0;
  for (int h = 0; h < kHarmonics; ++h) {
    v += c.amp[static_cast<std::size_t>(dim)][static_cast<std::size_t>(h)] *
         std::sin(2.0 * M_PI * static_cast<double>(h + 1) * s +
                  c.phase[static_cast<std::size_t>(dim)][static_cast<std::size_t>(h)]);
  }
  return v;
}

void check_spec(const SynthSpec& spec) {
  require(spec.n >= 1, ErrorCode::config_error, "synth: n must be >= 1");
  require(spec.d_x >= 1, ErrorCode::config_error, "synth: d_x must be >= 1");
  require(spec.d_y >= 1, ErrorCode::config_error, "synth: d_y must be >= 1");
  require(spec.noise >= 0.0, ErrorCode::config_error,
          "synth: noise must be >= 0");
}

Dataset synth_manifold(const SynthSpec& spec) {
  Rng rng(spec.seed);
  const CurveCoeffs cx = draw_coeffs(rng, spec.d_x, 1.0);
  const CurveCoeffs cy = draw_coeffs(rng, spec.d_y, 3.0);

  Dataset data;
  data.X.resize(spec.n, spec.d_x);
  data.Y.resize(spec.n, spec.d_y);
  for (int i = 0; i < spec.n; ++i) {
    const double s = rng.uniform();
    for (int j = 0; j < spec.d_x; ++j) {
      data.X(i, j) = eval_curve_dim(cx, j, s);
    }
    for (int j = 0; j < spec.d_y; ++j) {
      data.Y(i, j) = eval_curve_dim(cy, j, s) + spec.noise * rng.normal();
    }
  }
  return data;
}

Dataset synth_blobs(const SynthSpec& spec) {
  require(spec.blobs >= 1, ErrorCode::config_error,
          "synth: blobs must be >= 1");
  Rng rng(spec.seed);
  const int B = spec.blobs;

  Matrix centers(B, spec.d_x);
  for (int b = 0; b < B; ++b) {
    for (int j = 0; j < spec.d_x; ++j) centers(b, j) = rng.uniform(0.0, 10.0);
  }
  std::vector<Matrix> maps(static_cast<std::size_t>(B));
  Matrix offsets(B, spec.d_y);
  for (int b = 0; b < B; ++b) {
    Matrix A(spec.d_y, spec.d_x);
    for (int r = 0; r < spec.d_y; ++r) {
      for (int c = 0; c < spec.d_x; ++c) A(r, c) = 0.5 * rng.normal();
    }
    maps[static_cast<std::size_t>(b)] = std::move(A);
    for (int r = 0; r < spec.d_y; ++r) offsets(b, r) = rng.uniform(0.0, 5.0);
  }

  Dataset data;
  data.X.resize(spec.n, spec.d_x);
  data.Y.resize(spec.n, spec.d_y);
  for (int i = 0; i < spec.n; ++i) {
    const int b = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(B)));
    Vector x(spec.d_x);
    for (int j = 0; j < spec.d_x; ++j) {
      x(j) = centers(b, j) + 0.5 * rng.normal();
    }
    Vector y = maps[static_cast<std::size_t>(b)] *
                   (x - centers.row(b).transpose()) +
               offsets.row(b).transpose();
    for (int j = 0; j < spec.d_y; ++j) {
      y(j) += spec.noise * rng.normal();
    }
    data.X.row(i) = x.transpose();
    data.Y.row(i) = y.transpose();
  }
  return data;
}

}  // namespace

Dataset synth_dataset(const SynthSpec& spec) {
  check_spec(spec);
  if (spec.kind == "manifold") return synth_manifold(spec);
  if (spec.kind == "blobs") return synth_blobs(spec);
  fail(ErrorCode::config_error,
       "synth: unknown kind '" + spec.kind + "' (expected manifold or blobs)");
}

std::pair<Matrix, Matrix> manifold_curve(const SynthSpec& spec,
                                         const Vector& s) {
  check_spec(spec);
  Rng rng(spec.seed);
  const CurveCoeffs cx = draw_coeffs(rng, spec.d_x, 1.0);
  const CurveCoeffs cy = draw_coeffs(rng, spec.d_y, 3.0);
  Matrix X(s.size(), spec.d_x);
  Matrix Y(s.size(), spec.d_y);
  for (Index i = 0; i < s.size(); ++i) {
    for (int j = 0; j < spec.d_x; ++j) X(i, j) = eval_curve_dim(cx, j, s(i));
    for (int j = 0; j < spec.d_y; ++j) Y(i, j) = eval_curve_dim(cy, j, s(i));
  }
  return {std::move(X), std::move(Y)};
}

SplitDataset split_dataset(const Dataset& data, double test_fraction,
                           std::uint64_t seed) {
  require(test_fraction >= 0.0 && test_fraction < 1.0,
          ErrorCode::config_error, "test_fraction must lie in [0, 1)");
  const Index n = data.X.rows();
  require(n == data.Y.rows(), ErrorCode::data_error,
          "split_dataset: feature/output row mismatch");

  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(
        rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }

  Index n_test = 0;
  if (test_fraction > 0.0) {
    n_test = static_cast<Index>(
        std::ceil(static_cast<double>(n) * test_fraction - 1e-12));
    n_test = std::max<Index>(1, std::min(n_test, n - 1));
  }
  const Index n_train = n - n_test;

  SplitDataset split;
  split.train.feature_names = data.feature_names;
  split.train.output_names = data.output_names;
  split.test.feature_names = data.feature_names;
  split.test.output_names = data.output_names;
  split.train.X.resize(n_train, data.X.cols());
  split.train.Y.resize(n_train, data.Y.cols());
  split.test.X.resize(n_test, data.X.cols());
  split.test.Y.resize(n_test, data.Y.cols());
  for (Index i = 0; i < n_train; ++i) {
    split.train.X.row(i) = data.X.row(order[static_cast<std::size_t>(i)]);
    split.train.Y.row(i) = data.Y.row(order[static_cast<std::size_t>(i)]);
  }
  for (Index i = 0; i < n_test; ++i) {
    split.test.X.row(i) =
        data.X.row(order[static_cast<std::size_t>(n_train + i)]);
    split.test.Y.row(i) =
        data.Y.row(order[static_cast<std::size_t>(n_train + i)]);
  }
  return split;
}

}  // namespace odc
