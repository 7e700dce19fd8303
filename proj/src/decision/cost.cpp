// Copyright 2026 The Senseplane Authors
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

#include "senseplane/decision/cost.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "senseplane/error.hpp"

namespace senseplane::decision {

void RidgeRegression::fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                          double strength) {
  if (x.empty() || x.size() != y.size()) fail(ErrorCode::kInsufficientData, "ridge fit needs matching samples");
  if (!(strength >= 0.0)) fail(ErrorCode::kInvalidArgument, "ridge strength must be non-negative");
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto d = static_cast<Eigen::Index>(x.front().size());
  Eigen::MatrixXd a(n, d);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(x[i].size()) != d) fail(ErrorCode::kShapeMismatch, "ragged features");
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = x[i][j];
    b(i) = y[i];
  }
  const Eigen::RowVectorXd mean_x = a.colwise().mean();
  const double mean_y = b.mean();
  a.rowwise() -= mean_x;
  b.array() -= mean_y;
  Eigen::VectorXd w;
  if (strength == 0.0) {
    w = a.completeOrthogonalDecomposition().solve(b);
  } else {
    const Eigen::MatrixXd gram =
        a.transpose() * a + strength * Eigen::MatrixXd::Identity(d, d);
    w = gram.ldlt().solve(a.transpose() * b);
  }
  if (!w.allFinite()) fail(ErrorCode::kNonFiniteResult, "ridge solution is not finite");
  coef_.assign(w.data(), w.data() + d);
  intercept_ = mean_y - mean_x.dot(w);
  fitted_ = true;
}

double RidgeRegression::predict(std::span<const double> x) const {
  if (!fitted_) fail(ErrorCode::kUntrainedPredictor, "ridge model is not fitted");
  if (x.size() != coef_.size()) fail(ErrorCode::kDimensionMismatch, "feature count mismatch");
  double y = intercept_;
  for (std::size_t i = 0; i < x.size(); ++i) y += coef_[i] * x[i];
  return y;
}

std::array<double, CostFeatures::kDim> CostFeatures::vector() const {
  const double up = std::max(up_mbps, 1e-6);
  return {quant_level,   batch_occupancy, code_length, retrieved_k, up_mbps,
          down_mbps,     rtt_ms,          concurrent_sessions,     kv_mode,
          payload_bytes, prompt_tokens,   payload_bytes * 8.0 / (up * 1000.0)};
}

void CostPredictor::observe(Action action, const CostFeatures& features, const CostEstimate& realized) {
  if (action != Action::kEdgeOnly && action != Action::kEdgeRag && action != Action::kEscalate) return;
  PerAction& pa = actions_[serving_index(action)];
  pa.samples.push_back({features.vector(), {realized.lat_ms, realized.energy_j, realized.tokens}});
  while (pa.samples.size() > config_.window) pa.samples.pop_front();
  if (++pa.since_fit >= config_.refit_every && pa.samples.size() >= config_.min_samples) refit(action);
}

void CostPredictor::refit(Action action) {
  PerAction& pa = actions_[serving_index(action)];
  if (pa.samples.size() < 2) fail(ErrorCode::kInsufficientData, "not enough cost samples to fit");
  std::vector<std::vector<double>> x;
  x.reserve(pa.samples.size());
  for (const auto& s : pa.samples) x.emplace_back(s.x.begin(), s.x.end());
  for (std::size_t t = 0; t < 3; ++t) {
    std::vector<double> y;
    y.reserve(pa.samples.size());
    for (const auto& s : pa.samples) y.push_back(s.y[t]);
    pa.models[t].fit(x, y, config_.ridge_strength);
  }
  pa.since_fit = 0;
}

bool CostPredictor::trained(Action action) const {
  return actions_[serving_index(action)].models[0].fitted();
}

CostEstimate CostPredictor::prior(Action action, const CostFeatures& f) const {
  const CostPriors& p = config_.priors;
  const std::size_t a = serving_index(action);
  const auto q = static_cast<std::size_t>(std::clamp(f.quant_level, 0.0, 2.0));
  const double load = 1.0 + 0.05 * std::max(0.0, f.batch_occupancy - 1.0) +
                      0.05 * std::max(0.0, f.concurrent_sessions - 1.0);
  CostEstimate e;
  e.from_priors = true;
  if (action == Action::kEscalate) {
    const double up_ms = (f.payload_bytes + p.header_bytes) * 8.0 / (std::max(f.up_mbps, 1e-6) * 1000.0);
    const double down_ms = p.response_bytes * 8.0 / (std::max(f.down_mbps, 1e-6) * 1000.0);
    e.lat_ms = p.latency_ms[a] * load + f.rtt_ms + up_ms + down_ms;
    e.energy_j = p.energy_j[a] + p.radio_j_per_kb * (f.payload_bytes + p.header_bytes + p.response_bytes) / 1024.0;
    e.tokens = f.prompt_tokens + p.cloud_output_tokens;
  } else {
    e.lat_ms = p.latency_ms[a] * p.quant_multiplier[q] * load + p.per_doc_ms * f.retrieved_k;
    e.energy_j = p.energy_j[a] * p.quant_multiplier[q];
    e.tokens = f.prompt_tokens + p.edge_output_tokens;
  }
  return e;
}

CostEstimate CostPredictor::predict_strict(Action action, const CostFeatures& features) const {
  const PerAction& pa = actions_[serving_index(action)];
  if (!pa.models[0].fitted()) {
    fail(ErrorCode::kUntrainedPredictor, "no fitted cost model for " + std::string(to_string(action)));
  }
  const auto x = features.vector();
  CostEstimate e;
  e.lat_ms = std::max(0.0, pa.models[0].predict(x));
  e.energy_j = std::max(0.0, pa.models[1].predict(x));
  e.tokens = std::max(0.0, pa.models[2].predict(x));
  return e;
}

CostEstimate CostPredictor::predict(Action action, const CostFeatures& features) const {
  for (const double v : features.vector()) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFiniteInput, "cost features must be finite");
  }
  if (!trained(action)) return prior(action, features);
  return predict_strict(action, features);
}

CostVector predict_cost(Action action, const CostFeatures& features,
                        const CostPredictor& predictor, const CostWeights& weights, double risk) {
  const CostEstimate e = predictor.predict(action, features);
  CostVector c;
  c.lat_ms = e.lat_ms;
  c.energy_j = e.energy_j;
  c.tokens = e.tokens;
  c.risk = risk;
  c.weights = weights;
  c.from_priors = e.from_priors;
  c.total = c.recompute_total();
  return c;
}

double rule_risk(const codec::PromptSketch& sketch, const secure::RedactionReport& report) {
  return 1.0 * sketch.raw_waveform_requests + 0.5 * static_cast<double>(report.surviving_matches);
}

}  // namespace senseplane::decision
