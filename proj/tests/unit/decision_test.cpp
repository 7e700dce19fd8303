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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "senseplane/decision/calibration.hpp"
#include "senseplane/decision/cost.hpp"
#include "senseplane/decision/router.hpp"
#include "senseplane/decision/selective.hpp"
#include "senseplane/decision/uncertainty.hpp"
#include "senseplane/error.hpp"
#include "senseplane/random.hpp"
#include "senseplane/runtime/latency.hpp"

namespace senseplane::decision {
namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

TEST(Entropy, EdgeCases) {
  EXPECT_EQ(entropy(std::vector<double>{0.0, 1.0, 0.0}), 0.0);
  EXPECT_NEAR(entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 1.0, 1e-12);
  EXPECT_NEAR(entropy(std::vector<double>{0.5, 0.25, 0.25}), 1.5 * std::log(2.0) / std::log(3.0), 1e-12);
  EXPECT_EQ(code_of([] { entropy(std::vector<double>{0.5, 0.6}); }), ErrorCode::kNotADistribution);
  EXPECT_EQ(code_of([] { entropy(std::vector<double>{-0.1, 1.1}); }), ErrorCode::kNotADistribution);
}

TEST(FuseUncertainty, EtaExtremesAndHandExample) {
  const std::vector<std::vector<double>> passes = {{0.7, 0.2, 0.1}, {0.5, 0.3, 0.2}};
  const std::vector<double> lang = {0.2, 0.3, 0.5};
  const auto s = fuse_uncertainty(passes, lang, 1.0);
  EXPECT_EQ(s.fused, s.sensory_entropy);
  const auto l = fuse_uncertainty(passes, lang, 0.0);
  EXPECT_EQ(l.fused, l.language_entropy);

  const auto u = fuse_uncertainty({{1.0, 0.0}, {0.0, 1.0}}, std::vector<double>{0.5, 0.5}, 0.5);
  EXPECT_DOUBLE_EQ(u.sensory_entropy, 1.0);
  EXPECT_DOUBLE_EQ(u.fused, 1.0);
}

TEST(FuseUncertainty, FusedBetweenComponents) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p(4);
    std::vector<double> q(4);
    double sp = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      p[i] = rng.uniform();
      q[i] = rng.uniform();
      sp += p[i];
      sq += q[i];
    }
    for (std::size_t i = 0; i < 4; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    const double eta = rng.uniform();
    const auto u = fuse_uncertainty({p}, q, eta);
    EXPECT_GE(u.fused, std::min(u.sensory_entropy, u.language_entropy) - 1e-15);
    EXPECT_LE(u.fused, std::max(u.sensory_entropy, u.language_entropy) + 1e-15);
  }
}

TEST(FuseUncertainty, TooManyPasses) {
  const std::vector<std::vector<double>> passes(9, {0.5, 0.5});
  EXPECT_EQ(code_of([&] { fuse_uncertainty(passes, std::vector<double>{0.5, 0.5}, 0.5); }),
            ErrorCode::kInvalidArgument);
}

// Logits drawn so that softmax(logits) is the true label distribution.
void calibrated_set(Rng& rng, std::size_t n, double scale, std::vector<std::vector<double>>* logits,
                    std::vector<int>* labels) {
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> z(4);
    for (double& v : z) v = 1.5 * rng.normal();
    const auto p = softmax(z);
    double r = rng.uniform();
    int label = 3;
    for (int c = 0; c < 4; ++c) {
      if (r < p[c]) {
        label = c;
        break;
      }
      r -= p[c];
    }
    for (double& v : z) v *= scale;
    logits->push_back(z);
    labels->push_back(label);
  }
}

TEST(TemperatureScale, RecoversIdentityAndScale) {
  Rng rng(17);
  std::vector<std::vector<double>> logits;
  std::vector<int> labels;
  calibrated_set(rng, 20000, 1.0, &logits, &labels);
  EXPECT_NEAR(temperature_scale(logits, labels).temperature, 1.0, 0.1);
  for (auto& z : logits) {
    for (double& v : z) v *= 3.0;
  }
  const auto fit = temperature_scale(logits, labels);
  EXPECT_NEAR(fit.temperature, 3.0, 0.1);
  EXPECT_LE(fit.nll, fit.nll_at_one);
}

TEST(TemperatureScale, DegenerateLabels) {
  const std::vector<std::vector<double>> logits(12, {0.1, 0.2});
  const std::vector<int> labels(12, 1);
  EXPECT_EQ(code_of([&] { temperature_scale(logits, labels); }), ErrorCode::kDegenerateLabels);
}

TEST(Ridge, RecoversNoiselessLine) {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 50; ++i) {
    const double bw = 1.0 + i * 2.0;
    x.push_back({bw});
    y.push_back(2.0 * bw + 5.0);
  }
  RidgeRegression r;
  r.fit(x, y, 0.0);
  EXPECT_NEAR(r.coefficients()[0], 2.0, 1e-6);
  EXPECT_NEAR(r.intercept(), 5.0, 1e-6);
  RidgeRegression small;
  small.fit(x, y, 1e-9);
  const std::vector<double> probe = {37.5};
  EXPECT_NEAR(small.predict(probe), 80.0, 1e-3);
}

TEST(Ridge, MultiFeatureCoefficients) {
  Rng rng(2);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> row = {rng.uniform(0, 10), rng.uniform(-3, 3), rng.uniform(0, 1)};
    y.push_back(1.5 * row[0] - 4.0 * row[1] + 0.25 * row[2] + 9.0);
    x.push_back(row);
  }
  RidgeRegression r;
  r.fit(x, y, 0.0);
  EXPECT_NEAR(r.coefficients()[0], 1.5, 1e-6);
  EXPECT_NEAR(r.coefficients()[1], -4.0, 1e-6);
  EXPECT_NEAR(r.coefficients()[2], 0.25, 1e-6);
}

TEST(PredictCost, ZeroWeightsGiveZeroTotal) {
  CostPredictor p;
  CostFeatures f;
  f.payload_bytes = 900;
  const CostVector c = predict_cost(Action::kEscalate, f, p, CostWeights{0, 0, 0, 0}, 2.0);
  EXPECT_EQ(c.total, 0.0);
  EXPECT_TRUE(c.from_priors);
}

TEST(PredictCost, LinearInEachWeight) {
  CostPredictor p;
  CostFeatures f;
  const CostWeights w{0.001, 0.05, 0.0005, 1.0};
  const CostVector base = predict_cost(Action::kEdgeRag, f, p, w, 0.5);
  CostWeights w2 = w;
  w2.beta *= 3.0;
  const CostVector tripled = predict_cost(Action::kEdgeRag, f, p, w2, 0.5);
  EXPECT_NEAR(tripled.total - base.total, 2.0 * w.beta * base.energy_j, 1e-12);
}

TEST(PredictCost, EscalatePoorLinkSlowerThanGood) {
  CostPredictor p;
  const auto good = runtime::LinkProfile::good();
  const auto poor = runtime::LinkProfile::poor();
  CostFeatures g;
  g.up_mbps = good.up_mbps;
  g.down_mbps = good.down_mbps;
  g.rtt_ms = good.rtt_ms;
  g.payload_bytes = 600;
  CostFeatures b = g;
  b.up_mbps = poor.up_mbps;
  b.down_mbps = poor.down_mbps;
  b.rtt_ms = poor.rtt_ms;
  EXPECT_GT(predict_cost(Action::kEscalate, b, p, {}).lat_ms,
            predict_cost(Action::kEscalate, g, p, {}).lat_ms);
}

TEST(CostPredictor, LearnsAfterRefit) {
  CostPredictorConfig cfg;
  cfg.refit_every = 64;
  cfg.min_samples = 64;
  cfg.ridge_strength = 1e-9;
  CostPredictor p(cfg);
  Rng rng(4);
  for (int i = 0; i < 128; ++i) {
    CostFeatures f;
    f.up_mbps = rng.uniform(4, 100);
    f.rtt_ms = rng.uniform(10, 90);
    CostEstimate e;
    e.lat_ms = 2.0 * f.up_mbps + f.rtt_ms + 100.0;
    e.energy_j = 1.0;
    e.tokens = 300;
    p.observe(Action::kEscalate, f, e);
  }
  EXPECT_TRUE(p.trained(Action::kEscalate));
  EXPECT_FALSE(p.trained(Action::kEdgeOnly));
  CostFeatures probe;
  probe.up_mbps = 50;
  probe.rtt_ms = 40;
  const auto e = p.predict(Action::kEscalate, probe);
  EXPECT_FALSE(e.from_priors);
  EXPECT_NEAR(e.lat_ms, 240.0, 1e-3);
  EXPECT_EQ(code_of([&] { p.predict_strict(Action::kEdgeOnly, probe); }), ErrorCode::kUntrainedPredictor);
}

TEST(RuleRisk, RuleTable) {
  codec::PromptSketch sk;
  secure::RedactionReport clean;
  EXPECT_EQ(rule_risk(sk, clean), 0.0);
  secure::RedactionReport one;
  one.surviving_matches = 1;
  EXPECT_EQ(rule_risk(sk, one), 0.5);
  sk.raw_waveform_requests = 1;
  EXPECT_GE(rule_risk(sk, clean), 1.0);
}

std::array<CostVector, 3> costs_with_totals(double a, double b, double c) {
  std::array<CostVector, 3> out{};
  out[0].total = a;
  out[1].total = b;
  out[2].total = c;
  return out;
}

UncertaintyEstimate fused(double u) {
  UncertaintyEstimate e;
  e.fused = u;
  return e;
}

TEST(Route, ThresholdFallback) {
  const LossModel untrained;
  const RouterConfig cfg;
  const auto costs = costs_with_totals(0.3, 0.4, 0.8);
  EXPECT_EQ(route(fused(0.1), costs, untrained, cfg, {}).action, Action::kEdgeOnly);
  EXPECT_EQ(route(fused(0.5), costs, untrained, cfg, {}).action, Action::kEdgeRag);
  const auto esc = route(fused(0.9), costs, untrained, cfg, {});
  EXPECT_EQ(esc.action, Action::kEscalate);
  EXPECT_EQ(esc.rule, "threshold");
}

LossModel fitted_loss(double l0, double l1, double l2) {
  std::vector<RegretSample> samples;
  for (int i = 0; i < 100; ++i) {
    RegretSample s;
    s.u = (i % 10) / 10.0 + 0.05;
    s.loss = {l0, l1, l2};
    samples.push_back(s);
  }
  LossModel m;
  m.fit(samples);
  return m;
}

TEST(Route, ObjectiveArgminMatchesEnumeration) {
  // Escalate has the lowest loss but its cost gap exceeds the loss gap.
  const LossModel m = fitted_loss(0.40, 0.20, 0.05);
  const auto costs = costs_with_totals(0.30, 0.35, 0.60);
  RouterConfig cfg;
  cfg.rho = 1.0;
  const auto d = route(fused(0.8), costs, m, cfg, {});
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  const std::array<double, 3> loss = {0.40, 0.20, 0.05};
  for (std::size_t a = 0; a < 3; ++a) {
    const double obj = loss[a] + cfg.rho * costs[a].total;
    if (obj < best) {
      best = obj;
      arg = a;
    }
  }
  EXPECT_EQ(arg, 1u);
  EXPECT_EQ(d.action, Action::kEdgeRag);
  EXPECT_EQ(d.rule, "objective");
}

TEST(Route, ScalingObjectivesKeepsChoice) {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const double l0 = rng.uniform();
    const double l1 = rng.uniform();
    const double l2 = rng.uniform();
    const auto costs = costs_with_totals(rng.uniform(), rng.uniform(), rng.uniform());
    const double k = rng.uniform(0.1, 10.0);
    const auto scaled = costs_with_totals(costs[0].total * k, costs[1].total * k, costs[2].total * k);
    RouterConfig cfg;
    const auto a = route(fused(0.5), costs, fitted_loss(l0, l1, l2), cfg, {}).action;
    const auto b = route(fused(0.5), scaled, fitted_loss(l0 * k, l1 * k, l2 * k), cfg, {}).action;
    EXPECT_EQ(a, b);
  }
}

TEST(Route, EnergyFloorParksLocalModel) {
  const LossModel untrained;
  RouterConfig cfg;
  RuntimeHealth low;
  low.energy_j = 10.0;
  const auto costs = costs_with_totals(0.3, 0.4, 0.8);
  const auto d = route(fused(0.1), costs, untrained, cfg, low);
  EXPECT_EQ(d.action, Action::kEdgeRag);
  EXPECT_TRUE(d.templated);
  EXPECT_EQ(route(fused(0.95), costs, untrained, cfg, low).action, Action::kAbstain);
}

TEST(Route, GuardAbstainsAboveEscalationThreshold) {
  const LossModel untrained;
  RouterConfig cfg;
  RuntimeHealth h;
  h.guard = secure::GuardVerdict::kAbstain;
  const auto costs = costs_with_totals(0.3, 0.4, 0.8);
  EXPECT_EQ(route(fused(0.9), costs, untrained, cfg, h).action, Action::kAbstain);
  EXPECT_EQ(route(fused(0.2), costs, untrained, cfg, h).action, Action::kEdgeOnly);
}

RegretSample sample_with(double u, std::array<double, 3> loss, std::array<double, 3> cost) {
  RegretSample s;
  s.u = u;
  s.loss = loss;
  for (std::size_t a = 0; a < 3; ++a) s.cost[a].total = cost[a];
  return s;
}

TEST(Calibrate, EdgeOnlyAlwaysBest) {
  std::vector<RegretSample> samples;
  for (int i = 0; i <= 20; ++i) samples.push_back(sample_with(i / 20.0, {0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}));
  const auto grid = default_threshold_grid();
  const auto c = calibrate_thresholds(samples, grid, 1.0);
  EXPECT_DOUBLE_EQ(c.theta_edge, 1.0);
  EXPECT_EQ(c.regret, 0.0);
}

TEST(Calibrate, SwitchAtHalf) {
  std::vector<RegretSample> samples;
  Rng rng(5);
  for (int i = 0; i < 400; ++i) {
    const double u = rng.uniform();
    // EdgeOnly wins below 0.5, Escalate above; EdgeRag never wins.
    samples.push_back(u < 0.5 ? sample_with(u, {0.0, 0.5, 0.5}, {0.1, 0.3, 0.3})
                              : sample_with(u, {0.5, 0.5, 0.0}, {0.1, 0.3, 0.3}));
  }
  const auto grid = default_threshold_grid();
  const auto c = calibrate_thresholds(samples, grid, 1.0);
  EXPECT_LE(std::abs(c.theta_edge - 0.5), 0.05 + 1e-12);
  EXPECT_LE(c.theta_edge, c.theta_esc);
}

TEST(Calibrate, SingleSampleZeroRegret) {
  const std::vector<RegretSample> samples = {sample_with(0.37, {0.3, 0.1, 0.2}, {0.0, 0.0, 0.0})};
  const auto grid = default_threshold_grid();
  EXPECT_EQ(calibrate_thresholds(samples, grid, 1.0).regret, 0.0);
}

TEST(Calibrate, ExhaustiveOnSmallGrid) {
  Rng rng(6);
  std::vector<RegretSample> samples;
  for (int i = 0; i < 60; ++i) {
    samples.push_back(sample_with(rng.uniform(), {rng.uniform(), rng.uniform(), rng.uniform()},
                                  {rng.uniform(), rng.uniform(), rng.uniform()}));
  }
  const std::vector<double> grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const auto c = calibrate_thresholds(samples, grid, 0.7);
  for (const double a : grid) {
    for (const double b : grid) {
      if (a > b) continue;
      EXPECT_LE(c.regret, threshold_regret(samples, a, b, 0.7) + 1e-15);
    }
  }
  EXPECT_LE(c.theta_edge, c.theta_esc);
}

TEST(Calibrate, Errors) {
  const std::vector<RegretSample> none;
  const std::vector<double> grid = {0.5};
  EXPECT_EQ(code_of([&] { calibrate_thresholds(none, grid, 1.0); }), ErrorCode::kEmptySamples);
  const std::vector<RegretSample> one = {sample_with(0.5, {0, 0, 0}, {0, 0, 0})};
  EXPECT_EQ(code_of([&] { calibrate_thresholds(one, std::vector<double>{}, 1.0); }), ErrorCode::kEmptyGrid);
}

TEST(Selective, AllCorrectHasZeroRisk) {
  std::vector<SelectiveRecord> r;
  for (int i = 0; i < 10; ++i) r.push_back({i / 10.0, true, false});
  const auto m = selective_metrics(r);
  EXPECT_EQ(m.aurc, 0.0);
  for (const auto& p : m.risk_coverage) EXPECT_EQ(p.risk, 0.0);
}

TEST(Selective, PerfectUnknownRanking) {
  std::vector<SelectiveRecord> r;
  for (int i = 0; i < 10; ++i) r.push_back({i / 10.0, i < 7, i >= 7});
  EXPECT_DOUBLE_EQ(selective_metrics(r).auroc_unknown, 1.0);
}

TEST(Selective, SixRecordTrapezoid) {
  // Sorted by u: C W C C W W. Coverage steps of 1/6 from 1 down to 1/6;
  // risks 3/6, 2/5, 1/4, 1/3, 1/2, 0.
  const std::vector<SelectiveRecord> r = {{0.1, true}, {0.2, false}, {0.3, true},
                                          {0.4, true}, {0.5, false}, {0.6, false}};
  const double risks[] = {3.0 / 6, 2.0 / 5, 1.0 / 4, 1.0 / 3, 1.0 / 2, 0.0};
  double expected = 0.0;
  for (int i = 0; i < 5; ++i) expected += (1.0 / 6.0) * (risks[i] + risks[i + 1]) / 2.0;
  const auto m = selective_metrics(r);
  ASSERT_EQ(m.risk_coverage.size(), 6u);
  EXPECT_NEAR(m.aurc, expected, 1e-12);
  EXPECT_NEAR(m.aurc, 0.2888888888888889, 1e-12);
  for (std::size_t i = 1; i < m.risk_coverage.size(); ++i) {
    EXPECT_LT(m.risk_coverage[i].coverage, m.risk_coverage[i - 1].coverage);
  }
}

TEST(Selective, EceHandExample) {
  // Two bins populated: conf 0.95 (2 records, 1 correct), conf 0.25 (2, both wrong).
  const std::vector<double> conf = {0.95, 0.95, 0.25, 0.25};
  const std::vector<bool> correct = {true, false, false, false};
  EXPECT_NEAR(expected_calibration_error(conf, correct), (std::abs(1.0 - 1.9) + std::abs(0.0 - 0.5)) / 4.0,
              1e-12);
}

TEST(Selective, InsufficientData) {
  const std::vector<SelectiveRecord> r = {{0.1, true}};
  EXPECT_EQ(code_of([&] { selective_metrics(r); }), ErrorCode::kInsufficientData);
}

}  // namespace
}  // namespace senseplane::decision
