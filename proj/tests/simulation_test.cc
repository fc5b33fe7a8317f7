/*
 * Copyright 2026 The syncnet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "syncnet/simulation.h"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.h"
#include "syncnet/metrics.h"
#include "syncnet/scenario.h"

namespace syncnet {
namespace {

Vec V2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Small pendulum tree with no disturbance.
ScenarioConfig SmallTree(ControllerMode mode, int count = 3) {
  ScenarioConfig c;
  c.agents.count = count;
  c.agents.low = 0.8;
  c.agents.high = 1.2;
  c.agents.seed = 5;
  c.mode = mode;
  c.integration = {1e-3, 2.0, 10};
  c.initial.x_m0 = V2(0.4, 0.0);
  c.initial.x0 = {V2(0.3, 0.1)};
  return c;
}

TEST(Rk4, MatchesOracleOnDecay) {
  auto f = [](double, const Vec& y) -> Vec { return -y; };
  Vec y(1);
  y << 1.0;
  const Vec next = Rk4Step(f, 0.0, y, 0.1);
  EXPECT_NEAR(next(0), oracle::Rk4DecayStep(1.0, 0.1), 1e-15);
  EXPECT_NEAR(next(0), 0.9048375, 1e-7);
}

TEST(Rk4, FourthOrderConvergence) {
  auto f = [](double, const Vec& y) -> Vec { return -y; };
  auto err = [&](double h) {
    Vec y = Vec::Ones(1);
    const int steps = static_cast<int>(std::lround(1.0 / h));
    for (int k = 0; k < steps; ++k) y = Rk4Step(f, k * h, y, h);
    return std::fabs(y(0) - std::exp(-1.0));
  };
  const double ratio = err(0.1) / err(0.05);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(Rk4, RejectsNonPositiveStep) {
  auto f = [](double, const Vec& y) -> Vec { return y; };
  try {
    Rk4Step(f, 0.0, Vec::Ones(1), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
  EXPECT_THROW(Rk4Step(f, 0.0, Vec::Ones(1), -1e-3), Error);
}

TEST(Integration, StepCount) {
  EXPECT_EQ((IntegrationSettings{1e-3, 20.0, 10}).Steps(), 20000);
  EXPECT_EQ((IntegrationSettings{0.1, 0.3, 1}).Steps(), 3);
  EXPECT_THROW((IntegrationSettings{0.3, 1.0, 1}).Steps(), Error);
  EXPECT_THROW((IntegrationSettings{0.0, 1.0, 1}).Steps(), Error);
  EXPECT_THROW((IntegrationSettings{1e-3, 1.0, 0}).Steps(), Error);
}

TEST(ControllerMode, RoundTrip) {
  for (ControllerMode m :
       {ControllerMode::kRlOnly, ControllerMode::kDmracRl, ControllerMode::kDmracRlLinear,
        ControllerMode::kDmsacRl, ControllerMode::kAdaptiveNoAntiwindup}) {
    EXPECT_EQ(ParseControllerMode(ToString(m)), m);
  }
  EXPECT_EQ(ParseControllerMode("dmrac_rl"), ControllerMode::kDmracRl);
  try {
    ParseControllerMode("pid");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
  }
  EXPECT_FALSE(IsAdaptive(ControllerMode::kRlOnly));
  EXPECT_TRUE(AllowsSaturation(ControllerMode::kDmsacRl));
  EXPECT_FALSE(AllowsSaturation(ControllerMode::kDmracRl));
}

// With every gain at its ideal value, V reduces to the error quadratic.
TEST(Monitor, WarmStartIsErrorQuadratic) {
  ScenarioConfig c = SmallTree(ControllerMode::kDmracRl, 3);
  c.warm_start = true;
  c.initial.x0 = {V2(0.3, 0.1), V2(0.5, -0.2), V2(0.1, 0.0)};
  const Network net = Network::Build(BuildNetworkSpec(c));
  const NetworkState s = net.InitialState();
  const Mat& P = net.leader_constants().P;
  // Tree with fanout 2: agent 0 follows the reference, 1 and 2 follow 0.
  const Vec e0 = s.x[0] - s.x_m, e1 = s.x[1] - s.x[0], e2 = s.x[2] - s.x[0];
  const double expect = e0.dot(P * e0) + e1.dot(P * e1) + e2.dot(P * e2);
  const MonitorValue v = net.Monitor(s);
  EXPECT_NEAR(v.total, expect, 1e-12 * (1 + expect));
  ASSERT_EQ(v.per_agent.size(), 3u);
  EXPECT_NEAR(v.per_agent[0], e0.dot(P * e0), 1e-12);
}

TEST(Monitor, ZeroErrorGivesZero) {
  ScenarioConfig c = SmallTree(ControllerMode::kDmracRl, 3);
  c.warm_start = true;
  c.initial.x0 = {V2(0.4, 0.0)};
  const Network net = Network::Build(BuildNetworkSpec(c));
  EXPECT_NEAR(net.Monitor(net.InitialState()).total, 0.0, 1e-14);
}

TEST(Network, ZeroErrorWarmStartStaysAtEquilibrium) {
  ScenarioConfig c = SmallTree(ControllerMode::kDmracRl, 7);
  c.agents.low = c.agents.high = 1.0;
  c.warm_start = true;
  c.initial.x0 = {V2(0.4, 0.0)};
  const Network net = Network::Build(BuildNetworkSpec(c));
  NetworkState s = net.InitialState();
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    s = net.Step(s, 1e-3);
    for (const Vec& x : s.x) worst = std::max(worst, (x - s.x_m).norm());
  }
  EXPECT_LE(worst, 1e-9);
}

// With zero errors V is the sum of gain-error quadratics.
TEST(Monitor, DoublingGainErrorsQuadruplesV) {
  ScenarioConfig c = SmallTree(ControllerMode::kDmracRl, 3);
  c.uncertainty.kind = "sinusoid";
  c.uncertainty.amplitude = 0.1;
  c.warm_start = true;
  c.initial.x0 = {V2(0.4, 0.0)};
  const Network net = Network::Build(BuildNetworkSpec(c));
  const NetworkState ideal = net.InitialState();
  oracle::Gen gen(8);
  NetworkState one = ideal, two = ideal;
  auto perturb = [&](Mat& a, Mat& b) {
    const Mat d = gen.Matrix(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
    a += d;
    b += 2.0 * d;
  };
  perturb(one.leader.K_m, two.leader.K_m);
  perturb(one.leader.K_r, two.leader.K_r);
  perturb(one.leader.Theta, two.leader.Theta);
  for (int i = 1; i < 3; ++i) {
    perturb(one.followers[i].K_m, two.followers[i].K_m);
    perturb(one.followers[i].Theta, two.followers[i].Theta);
    for (std::size_t k = 0; k < one.followers[i].edges.size(); ++k) {
      perturb(one.followers[i].edges[k].K, two.followers[i].edges[k].K);
      perturb(one.followers[i].edges[k].K_r, two.followers[i].edges[k].K_r);
      perturb(one.followers[i].edges[k].Theta, two.followers[i].edges[k].Theta);
    }
  }
  const double v1 = net.Monitor(one).total, v2 = net.Monitor(two).total;
  EXPECT_GT(v1, 0.0);
  EXPECT_NEAR(v2, 4.0 * v1, 1e-12 * v2);
}

TEST(Monitor, ColdStartAddsGainTerms) {
  ScenarioConfig c = SmallTree(ControllerMode::kDmracRl, 3);
  c.initial.x0 = {V2(0.4, 0.0)};
  const Network net = Network::Build(BuildNetworkSpec(c));
  EXPECT_GT(net.Monitor(net.InitialState()).total, 0.0);
}

TEST(Network, LyapunovMonitorNonIncreasing) {
  ScenarioConfig c = SmallTree(ControllerMode::kDmracRl, 7);
  c.uncertainty.kind = "sinusoid";
  c.uncertainty.amplitude = 0.2;
  c.integration = {1e-3, 5.0, 10};
  const TrajectoryLog log = Network::Build(BuildNetworkSpec(c)).Run();
  ASSERT_FALSE(log.diverged);
  for (std::size_t k = 1; k < log.samples.size(); ++k) {
    const double a = log.samples[k - 1].V, b = log.samples[k].V;
    ASSERT_LE(b - a, 1e-6 * (1 + a)) << "t=" << log.samples[k].t;
  }
}

TEST(Network, RunMatchesManualSteps) {
  ScenarioConfig c = SmallTree(ControllerMode::kDmracRl, 3);
  c.integration = {1e-2, 0.5, 1};
  const Network net = Network::Build(BuildNetworkSpec(c));
  const TrajectoryLog log = net.Run();
  NetworkState s = net.InitialState();
  for (int k = 0; k < 50; ++k) s = net.Step(s, 1e-2);
  ASSERT_EQ(log.samples.size(), 51u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(log.samples.back().x[i], s.x[i]);
  EXPECT_EQ(log.samples.back().x_m, s.x_m);
}

TEST(Network, RunIsDeterministic) {
  ScenarioConfig c = SmallTree(ControllerMode::kDmracRl, 5);
  c.uncertainty.kind = "random";
  c.uncertainty.seed = 9;
  const Network net = Network::Build(BuildNetworkSpec(c));
  const TrajectoryLog a = net.Run(), b = net.Run();
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    for (int i = 0; i < 5; ++i) ASSERT_EQ(a.samples[k].x[i], b.samples[k].x[i]);
    ASSERT_EQ(a.samples[k].V, b.samples[k].V);
  }
}

TEST(Network, DivergenceGuardEndsRun) {
  ScenarioConfig c = SmallTree(ControllerMode::kRlOnly, 3);
  c.state_bound = 0.35;  // x_m0 itself has norm 0.4
  const TrajectoryLog log = Network::Build(BuildNetworkSpec(c)).Run();
  EXPECT_TRUE(log.diverged);
  EXPECT_FALSE(log.diverged_reason.empty());
  EXPECT_LT(log.samples.size(), 201u);
  bool event = false;
  for (const auto& e : log.events) event |= e.kind == LogEvent::Kind::kDivergence;
  EXPECT_TRUE(event);
}

TEST(Network, HomogeneousPolicyOnlySynchronizes) {
  ScenarioConfig c = SmallTree(ControllerMode::kRlOnly, 12);
  c.agents.low = c.agents.high = 1.0;
  c.integration = {1e-3, 10.0, 10};
  const TrajectoryLog log = Network::Build(BuildNetworkSpec(c)).Run();
  const Metrics m = ComputeMetrics(log, {});
  EXPECT_FALSE(m.diverged);
  EXPECT_LE(m.sup_error_tail, 0.05);
}

TEST(Network, SaturatedInputsStayInBounds) {
  ScenarioConfig c = SmallTree(ControllerMode::kDmsacRl, 3);
  c.u_max = Vec::Constant(1, 2.0);
  c.initial.x0 = {V2(-0.5, 0.0)};
  const TrajectoryLog log = Network::Build(BuildNetworkSpec(c)).Run();
  double peak = 0.0, commanded = 0.0;
  for (const auto& s : log.samples) {
    for (int i = 0; i < 3; ++i) {
      peak = std::max(peak, s.u_sat[i].cwiseAbs().maxCoeff());
      commanded = std::max(commanded, s.u[i].cwiseAbs().maxCoeff());
    }
  }
  EXPECT_LE(peak, 2.0);
  EXPECT_GT(commanded, 2.0);
}

TEST(Network, BuildRejectsBadSpecs) {
  NetworkSpec spec = BuildNetworkSpec(SmallTree(ControllerMode::kDmracRl, 3));
  spec.adjacency[0][0] = 1;
  EXPECT_THROW(Network::Build(spec), Error);
  spec = BuildNetworkSpec(SmallTree(ControllerMode::kDmracRl, 3));
  spec.x0.pop_back();
  EXPECT_THROW(Network::Build(spec), Error);
}

}  // namespace
}  // namespace syncnet
