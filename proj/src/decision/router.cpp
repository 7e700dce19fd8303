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

#include "senseplane/decision/router.hpp"

#include <algorithm>
#include <cmath>

#include "senseplane/error.hpp"

namespace senseplane::decision {
namespace {

std::size_t bin_of(double u) {
  const auto b = static_cast<std::size_t>(std::floor(std::clamp(u, 0.0, 1.0) * LossModel::kBins));
  return std::min(b, LossModel::kBins - 1);
}

}  // namespace

void RouterConfig::validate() const {
  if (!(0.0 <= theta_edge && theta_edge <= theta_esc && theta_esc <= 1.0)) {
    fail(ErrorCode::kConfigError, "thresholds must satisfy 0 <= theta_edge <= theta_esc <= 1");
  }
  if (!(rho >= 0.0)) fail(ErrorCode::kConfigError, "rho must be non-negative");
}

void LossModel::fit(std::span<const RegretSample> samples, std::size_t min_samples) {
  std::array<std::array<double, kBins>, 3> sums{};
  std::array<std::array<std::size_t, kBins>, 3> counts{};
  for (const auto& s : samples) {
    const std::size_t b = bin_of(s.u);
    for (std::size_t a = 0; a < 3; ++a) {
      if (!std::isfinite(s.loss[a])) continue;
      sums[a][b] += s.loss[a];
      ++counts[a][b];
    }
  }
  trained_ = samples.size() >= min_samples;
  for (std::size_t a = 0; a < 3; ++a) {
    bool any = false;
    for (std::size_t b = 0; b < kBins; ++b) any = any || counts[a][b] > 0;
    if (!any) {
      trained_ = false;
      continue;
    }
    for (std::size_t b = 0; b < kBins; ++b) {
      if (counts[a][b] > 0) {
        means_[a][b] = sums[a][b] / static_cast<double>(counts[a][b]);
        continue;
      }
      for (std::size_t dist = 1; dist < kBins; ++dist) {
        if (b >= dist && counts[a][b - dist] > 0) {
          means_[a][b] = sums[a][b - dist] / static_cast<double>(counts[a][b - dist]);
          break;
        }
        if (b + dist < kBins && counts[a][b + dist] > 0) {
          means_[a][b] = sums[a][b + dist] / static_cast<double>(counts[a][b + dist]);
          break;
        }
      }
    }
  }
}

double LossModel::expected_loss(Action action, double u) const {
  if (!trained_) fail(ErrorCode::kUntrainedPredictor, "loss model is not trained");
  return means_[serving_index(action)][bin_of(u)];
}

Action threshold_action(double u, double theta_edge, double theta_esc) {
  if (u <= theta_edge) return Action::kEdgeOnly;
  if (u <= theta_esc) return Action::kEdgeRag;
  return Action::kEscalate;
}

RoutingDecision route(const UncertaintyEstimate& u, const std::array<CostVector, 3>& costs,
                      const LossModel& loss_model, const RouterConfig& config,
                      const RuntimeHealth& health) {
  config.validate();
  RoutingDecision d;
  d.u = u;
  d.costs = costs;
  if (loss_model.trained()) {
    std::size_t best = 0;
    for (std::size_t a = 0; a < 3; ++a) {
      d.objective[a] = loss_model.expected_loss(kServingActions[a], u.fused) + config.rho * costs[a].total;
      if (d.objective[a] < d.objective[best]) best = a;
    }
    d.action = kServingActions[best];
    d.rule = "objective";
  } else {
    for (std::size_t a = 0; a < 3; ++a) d.objective[a] = config.rho * costs[a].total;
    d.action = threshold_action(u.fused, config.theta_edge, config.theta_esc);
    d.rule = "threshold";
  }
  if (health.guard == secure::GuardVerdict::kAbstain && u.fused > config.theta_esc) {
    d.action = Action::kAbstain;
    d.rule = "guard-abstain";
    return d;
  }
  if (health.energy_j < config.energy_floor_j) {
    d.templated = u.fused <= config.theta_esc;
    d.action = d.templated ? Action::kEdgeRag : Action::kAbstain;
    d.rule = "energy-floor";
    return d;
  }
  if (d.action == Action::kEscalate && !health.link_up) {
    d.action = d.objective[0] < d.objective[1] ? Action::kEdgeOnly : Action::kEdgeRag;
    d.rule = "link-down";
  }
  return d;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i * 0.05);
  return grid;
}

double threshold_regret(std::span<const RegretSample> samples, double theta_edge,
                        double theta_esc, double rho) {
  double total = 0.0;
  for (const auto& s : samples) {
    const std::size_t chosen = serving_index(threshold_action(s.u, theta_edge, theta_esc));
    double best = s.objective(0, rho);
    for (std::size_t a = 1; a < 3; ++a) best = std::min(best, s.objective(a, rho));
    total += s.objective(chosen, rho) - best;
  }
  return total / static_cast<double>(samples.size());
}

ThresholdCalibration calibrate_thresholds(std::span<const RegretSample> samples,
                                          std::span<const double> grid, double rho) {
  if (grid.empty()) fail(ErrorCode::kEmptyGrid, "threshold grid is empty");
  if (samples.empty()) fail(ErrorCode::kEmptySamples, "no calibration samples");
  for (const auto& s : samples) {
    for (const double l : s.loss) {
      if (!(l >= 0.0)) fail(ErrorCode::kInvalidArgument, "losses must be non-negative");
    }
  }
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  ThresholdCalibration best;
  bool have = false;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i; j < sorted.size(); ++j) {
      const double r = threshold_regret(samples, sorted[i], sorted[j], rho);
      ++best.evaluated_pairs;
      // Ascending iteration makes strict improvement implement the tie rule.
      if (!have || r < best.regret) {
        best.theta_edge = sorted[i];
        best.theta_esc = sorted[j];
        best.regret = r;
        have = true;
      }
    }
  }
  return best;
}

}  // namespace senseplane::decision
