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

#include "odc/model.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#include "odc/parallel.hpp"

namespace odc {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

Matrix gather_rows(const Eigen::Ref<const Matrix>& M,
                   const std::vector<int>& rows) {
  Matrix out(static_cast<Index>(rows.size()), M.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Index>(i)) = M.row(rows[i]);
  }
  return out;
}

}  // namespace

OdcModel train_odc_model(const Eigen::Ref<const Matrix>& X,
                         const Eigen::Ref<const Matrix>& Y,
                         const OdcConfig& config, const HyperParams& hyper,
                         std::uint64_t seed, int threads,
                         TrainTimings* timings) {
  config.validate();
  hyper.validate(static_cast<int>(Y.cols()));
  require(X.rows() >= 1, ErrorCode::data_error, "training set is empty");
  require(X.rows() == Y.rows(), ErrorCode::data_error,
          "feature and output row counts differ");
  require(X.allFinite() && Y.allFinite(), ErrorCode::data_error,
          "training data contains non-finite values");

  const int N = static_cast<int>(X.rows());
  const int K_target = config.derived_K(N);

  OdcModel model;
  model.config = config;
  model.hyper = hyper;
  model.N = N;
  model.d_x = static_cast<int>(X.cols());
  model.d_y = static_cast<int>(Y.cols());

  const auto t0 = std::chrono::steady_clock::now();
  model.clustering = ekmeans(X, K_target, config.clustering, 100, seed);
  const double t_cluster = seconds_since(t0);
  require(config.kprime <= model.clustering.K, ErrorCode::config_error,
          "kprime exceeds the number of subdomains (" +
              std::to_string(model.clustering.K) + ")");

  const auto t1 = std::chrono::steady_clock::now();
  model.subdomains = generate_odc(X, model.clustering, config);
  const double t_cover = seconds_since(t1);

  const auto t2 = std::chrono::steady_clock::now();
  model.machines.resize(model.subdomains.size());
  parallel_for(model.subdomains.size(), threads, [&](std::size_t i) {
    const Subdomain& sd = model.subdomains[i];
    const Matrix Xs = gather_rows(X, sd.indices);
    const Matrix Ys = gather_rows(Y, sd.indices);
    model.machines[i] =
        train_machine(config.machine, Xs, Ys, hyper, sd.indices);
  });
  const double t_machines = seconds_since(t2);

  if (timings) {
    timings->clustering_seconds = t_cluster;
    timings->cover_seconds = t_cover;
    timings->machines_seconds = t_machines;
    timings->total_seconds = t_cluster + t_cover + t_machines;
  }
  return model;
}

std::vector<std::pair<int, double>> rank_subdomains(
    const OdcModel& model, const Eigen::Ref<const Vector>& x) {
  require(x.size() == model.d_x, ErrorCode::invalid_argument,
          "rank_subdomains: query dimension mismatch");
  std::vector<std::pair<int, double>> ranked;
  ranked.reserve(model.subdomains.size());
  for (std::size_t i = 0; i < model.subdomains.size(); ++i) {
    const Subdomain& sd = model.subdomains[i];
    const Vector diff = x - sd.mu;
    ranked.emplace_back(static_cast<int>(i), diff.dot(sd.prec * diff));
  }
  // Ascending by distance; stable sort keeps subdomain order on ties.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     return a.second < b.second;
                   });
  return ranked;
}

Vector combine_predictions(const Matrix& predictions,
                           const std::vector<double>& distances) {
  const Index k = predictions.rows();
  require(k >= 1, ErrorCode::invalid_argument,
          "combine_predictions: no predictions");
  require(static_cast<Index>(distances.size()) == k,
          ErrorCode::invalid_argument,
          "combine_predictions: one distance per prediction required");

  // A zero distance means the query sits exactly on a subdomain mean;
  // those subdomains split the weight uniformly among themselves.
  std::vector<Index> zeros;
  for (Index i = 0; i < k; ++i) {
    require(distances[static_cast<std::size_t>(i)] >= 0.0,
            ErrorCode::invalid_argument,
            "combine_predictions: negative distance");
    if (distances[static_cast<std::size_t>(i)] == 0.0) zeros.push_back(i);
  }
  Vector out = Vector::Zero(predictions.cols());
  if (!zeros.empty()) {
    for (Index i : zeros) out += predictions.row(i).transpose();
    out /= static_cast<double>(zeros.size());
    return out;
  }
  double total = 0.0;
  for (Index i = 0; i < k; ++i) {
    total += 1.0 / distances[static_cast<std::size_t>(i)];
  }
  for (Index i = 0; i < k; ++i) {
    const double a = (1.0 / distances[static_cast<std::size_t>(i)]) / total;
    out += a * predictions.row(i).transpose();
  }
  return out;
}

namespace {

// Per-batch state for IWTGP machines: density-ratio weights and the
// weighted inverses, computed once per (subdomain, batch) pair.
using IwtgpCache = std::unordered_map<int, WeightedInverses>;

Vector predict_one(const OdcModel& model,
                   const std::vector<std::pair<int, double>>& ranked,
                   const Eigen::Ref<const Vector>& x,
                   const PredictOptions& options, const IwtgpCache& cache) {
  const int kprime = model.config.kprime;
  Matrix preds(kprime, model.d_y);
  std::vector<double> dists(static_cast<std::size_t>(kprime));
  for (int i = 0; i < kprime; ++i) {
    const int id = ranked[static_cast<std::size_t>(i)].first;
    dists[static_cast<std::size_t>(i)] =
        ranked[static_cast<std::size_t>(i)].second;
    const LocalMachine& machine = model.machines[static_cast<std::size_t>(id)];
    if (const auto* gpr = std::get_if<GprMachine>(&machine)) {
      preds.row(i) = gpr_predict(*gpr, model.hyper, x).mean.transpose();
    } else if (const auto* tgp = std::get_if<TgpMachine>(&machine)) {
      preds.row(i) =
          tgp_predict(*tgp, model.hyper, x, options.optimizer).y.transpose();
    } else {
      const auto& iw = std::get<IwtgpMachine>(machine);
      preds.row(i) = iwtgp_predict(iw, model.hyper, cache.at(id), x,
                                   options.optimizer)
                         .y.transpose();
    }
  }
  return combine_predictions(preds, dists);
}

}  // namespace

Matrix odc_predict_batch(const OdcModel& model,
                         const Eigen::Ref<const Matrix>& X_test,
                         const PredictOptions& options) {
  require(!model.machines.empty(), ErrorCode::invalid_argument,
          "odc_predict_batch: model has no machines");
  require(X_test.rows() >= 1, ErrorCode::invalid_argument,
          "odc_predict_batch: empty batch");
  require(X_test.cols() == model.d_x, ErrorCode::invalid_argument,
          "odc_predict_batch: query dimension mismatch");
  require(model.config.kprime <= static_cast<int>(model.machines.size()),
          ErrorCode::config_error, "kprime exceeds the machine count");

  const std::size_t n = static_cast<std::size_t>(X_test.rows());
  std::vector<std::vector<std::pair<int, double>>> rankings(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    rankings[i] =
        rank_subdomains(model, X_test.row(static_cast<Index>(i)).transpose());
  });

  // IWTGP: resolve the density-ratio weights once per used subdomain
  // against this whole batch.
  IwtgpCache cache;
  if (model.config.machine == MachineKind::iwtgp) {
    std::vector<int> used;
    for (const auto& ranked : rankings) {
      for (int i = 0; i < model.config.kprime; ++i) {
        used.push_back(ranked[static_cast<std::size_t>(i)].first);
      }
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::vector<WeightedInverses> formed(used.size());
    parallel_for(used.size(), options.threads, [&](std::size_t i) {
      const auto& machine = std::get<IwtgpMachine>(
          model.machines[static_cast<std::size_t>(used[i])]);
      const RulsifModel ratio = rulsif_fit(
          machine.X, X_test, model.hyper.rulsif_alpha,
          model.hyper.rulsif_tau2, model.hyper.rulsif_nu,
          model.hyper.squared_norm);
      const Vector weights = rulsif_weights(ratio, machine.X);
      formed[i] = iwtgp_form_inverses(machine, model.hyper, weights,
                                      options.inverse_mode);
    });
    for (std::size_t i = 0; i < used.size(); ++i) {
      cache.emplace(used[i], std::move(formed[i]));
    }
  }

  Matrix Y(X_test.rows(), model.d_y);
  parallel_for(n, options.threads, [&](std::size_t i) {
    Y.row(static_cast<Index>(i)) =
        predict_one(model, rankings[i],
                    X_test.row(static_cast<Index>(i)).transpose(), options,
                    cache)
            .transpose();
  });
  return Y;
}

Vector odc_predict(const OdcModel& model, const Eigen::Ref<const Vector>& x,
                   const PredictOptions& options) {
  Matrix batch(1, x.size());
  batch.row(0) = x.transpose();
  return odc_predict_batch(model, batch, options).row(0).transpose();
}

}  // namespace odc
