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

#pragma once

#include <array>
#include <deque>
#include <vector>

#include "senseplane/codec/sketch.hpp"
#include "senseplane/decision/types.hpp"
#include "senseplane/secure/redactor.hpp"

namespace senseplane::decision {

// Linear least squares with an unpenalized intercept. Strength 0 gives the
// minimum-norm solution.
class RidgeRegression {
 public:
  void fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y, double strength);
  double predict(std::span<const double> x) const;
  bool fitted() const { return fitted_; }
  const std::vector<double>& coefficients() const { return coef_; }
  double intercept() const { return intercept_; }

 private:
  std::vector<double> coef_;
  double intercept_ = 0.0;
  bool fitted_ = false;
};

struct CostFeatures {
  double quant_level = 0.0;  // 0 fp16, 1 int8, 2 int4
  double batch_occupancy = 1.0;
  double code_length = 16.0;
  double retrieved_k = 0.0;
  double up_mbps = 30.0;
  double down_mbps = 30.0;
  double rtt_ms = 40.0;
  double concurrent_sessions = 1.0;
  double kv_mode = 0.0;
  double payload_bytes = 0.0;
  double prompt_tokens = 0.0;

  static constexpr std::size_t kDim = 12;
  // Regression inputs; includes the transfer time term bytes * 8 / rate.
  std::array<double, kDim> vector() const;
};

struct CostPriors {
  // Medians of the stage model; Escalate excludes the link.
  std::array<double, 3> latency_ms = {310.0, 355.0, 705.0};
  std::array<double, 3> energy_j = {2.4, 2.8, 0.9};
  std::array<double, 3> quant_multiplier = {1.0, 0.85, 0.7};
  double per_doc_ms = 6.0;
  double header_bytes = 256.0;
  double response_bytes = 1400.0;
  double radio_j_per_kb = 0.002;
  double edge_output_tokens = 200.0;
  double cloud_output_tokens = 350.0;
};

struct CostEstimate {
  double lat_ms = 0.0;
  double energy_j = 0.0;
  double tokens = 0.0;
  bool from_priors = false;
};

struct CostPredictorConfig {
  double ridge_strength = 1.0;
  std::size_t refit_every = 256;
  std::size_t window = 4096;
  std::size_t min_samples = 64;
  CostPriors priors;
};

// Online per-action ridge predictors for latency, energy and tokens, refit
// periodically over a sliding window. Untrained actions fall back to
// analytic priors that are monotone in the link features.
class CostPredictor {
 public:
  explicit CostPredictor(CostPredictorConfig config = {}) : config_(config) {}

  void observe(Action action, const CostFeatures& features, const CostEstimate& realized);
  void refit(Action action);
  bool trained(Action action) const;
  CostEstimate predict(Action action, const CostFeatures& features) const;
  // Throws UntrainedPredictor instead of falling back.
  CostEstimate predict_strict(Action action, const CostFeatures& features) const;
  CostEstimate prior(Action action, const CostFeatures& features) const;
  const CostPredictorConfig& config() const { return config_; }

 private:
  struct Sample {
    std::array<double, CostFeatures::kDim> x;
    std::array<double, 3> y;
  };
  struct PerAction {
    std::deque<Sample> samples;
    std::size_t since_fit = 0;
    std::array<RidgeRegression, 3> models;
  };

  CostPredictorConfig config_;
  std::array<PerAction, 3> actions_;
};

// total = alpha * lat + beta * energy + gamma * tokens + delta * risk.
CostVector predict_cost(Action action, const CostFeatures& features,
                        const CostPredictor& predictor, const CostWeights& weights,
                        double risk = 0.0);

// 1.0 per raw-waveform request plus 0.5 per non-whitelisted match that
// survived redaction.
double rule_risk(const codec::PromptSketch& sketch, const secure::RedactionReport& report);

}  // namespace senseplane::decision
