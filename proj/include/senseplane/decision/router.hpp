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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "senseplane/decision/types.hpp"
#include "senseplane/decision/uncertainty.hpp"
#include "senseplane/secure/guard.hpp"

namespace senseplane::decision {

struct RouterConfig {
  double theta_edge = 0.3;
  double theta_esc = 0.7;
  double rho = 1.0;
  double energy_floor_j = 50.0;
  std::size_t edge_token_cap = 200;
  std::size_t cloud_token_cap = 350;

  void validate() const;
};

struct RuntimeHealth {
  double energy_j = std::numeric_limits<double>::infinity();  // battery budget left
  bool link_up = true;
  secure::GuardVerdict guard = secure::GuardVerdict::kPass;
};

struct RegretSample {
  double u = 0.0;
  std::array<double, 3> loss{};  // per serving action
  std::array<CostVector, 3> cost{};
  Action chosen = Action::kEdgeOnly;
  bool slo_hit = true;
  bool correct = true;

  double objective(std::size_t a, double rho) const { return loss[a] + rho * cost[a].total; }
};

// Per-action mean loss in equal-width bins over u. Empty bins borrow from
// the nearest populated bin.
class LossModel {
 public:
  static constexpr std::size_t kBins = 10;

  void fit(std::span<const RegretSample> samples, std::size_t min_samples = 20);
  bool trained() const { return trained_; }
  double expected_loss(Action action, double u) const;

 private:
  std::array<std::array<double, kBins>, 3> means_{};
  bool trained_ = false;
};

struct RoutingDecision {
  Action action = Action::kEdgeOnly;
  // EdgeRag answered from templates because the local model is parked.
  bool templated = false;
  UncertaintyEstimate u;
  std::array<CostVector, 3> costs{};
  std::array<double, 3> objective{};
  std::string rule;
};

// Primary rule: argmin_a E[loss | a, u] + rho * C_total(a), ties to the
// cheaper tier. Thresholds stand in while the loss model is untrained.
// Overrides: energy floor parks the local model, a guard abstain verdict
// above theta_esc abstains, and a down link keeps the request local.
RoutingDecision route(const UncertaintyEstimate& u, const std::array<CostVector, 3>& costs,
                      const LossModel& loss_model, const RouterConfig& config,
                      const RuntimeHealth& health);

// Threshold policy used both as fallback and by calibration.
Action threshold_action(double u, double theta_edge, double theta_esc);

std::vector<double> default_threshold_grid();

struct ThresholdCalibration {
  double theta_edge = 0.0;
  double theta_esc = 0.0;
  double regret = 0.0;  // mean over samples
  std::size_t evaluated_pairs = 0;
};

// Mean regret of the threshold policy at (theta_edge, theta_esc).
double threshold_regret(std::span<const RegretSample> samples, double theta_edge,
                        double theta_esc, double rho);

// Exhaustive search over grid pairs with theta_edge <= theta_esc; ties go
// to the smallest theta_edge, then the smallest theta_esc.
ThresholdCalibration calibrate_thresholds(std::span<const RegretSample> samples,
                                          std::span<const double> grid, double rho);

}  // namespace senseplane::decision
