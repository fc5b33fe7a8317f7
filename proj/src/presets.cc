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

#include "syncnet/presets.h"

#include <map>

namespace syncnet {
namespace {

constexpr char kFig4[] = "fig4_rl_homogeneous";
constexpr char kFig5[] = "fig5_rl_only_heterogeneous";
constexpr char kFig6[] = "fig6_dmrac_heterogeneous_sinusoid";
constexpr char kFig7[] = "fig7_dmrac_random_uncertainty";
constexpr char kFig8[] = "fig8_tracking_multistep";
constexpr char kFig9[] = "fig9_dmsac_mimo_saturated";
constexpr char kFig10[] = "fig10_adaptive_no_antiwindup";
constexpr char kFig11[] = "fig11_magnitude_comparison";

// Seed of the heterogeneous pendulum network shared by figs 5 to 8.
constexpr std::uint64_t kPendulumSeed = 7;
// Seed of the MIMO3 network shared by figs 9 to 11.
constexpr std::uint64_t kMimoSeed = 3;

Vec V2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec V3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

ScenarioConfig PendulumBase(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.graph.preset = "tree";
  c.graph.fanout = 2;
  c.agents.count = 12;
  c.integration = {1e-3, 20.0, 10};
  c.initial.x_m0 = V2(0.4, 0.0);
  c.initial.kind = "random";
  c.initial.low = V2(0.2, -0.2);
  c.initial.high = V2(0.6, 0.2);
  c.initial.seed = 11;
  return c;
}

ScenarioConfig HeterogeneousPendulum(const std::string& name) {
  ScenarioConfig c = PendulumBase(name);
  c.agents.low = 0.75;
  c.agents.high = 1.25;
  c.agents.seed = kPendulumSeed;
  c.uncertainty.kind = "sinusoid";
  c.uncertainty.amplitude = 0.1;
  c.uncertainty.omega = 1.0;
  return c;
}

ScenarioConfig MimoBase(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.graph.preset = "tree";
  c.graph.fanout = 2;
  c.reference.model = "mimo3";
  c.agents.base.model = "mimo3";
  c.agents.base.coefficients = {1.0, 2.0, 3.0};
  c.agents.low = 0.75;
  c.agents.high = 1.25;
  c.agents.seed = kMimoSeed;
  c.agents.count = 12;
  // Steady state needs |u| near r, so u_max = 0.5 keeps the actuators
  // saturated for the whole run. Fast adaptation makes plain adaptive gains
  // wind up past the divergence bound inside the horizon.
  const double r = 2.0;
  c.policy.kind = "affine";
  c.policy.K = Mat::Zero(1, 3);
  c.policy.x_set = V3(r, 0.0, 0.0);
  c.policy.u_ff = Vec::Constant(1, r);
  c.mode = ControllerMode::kDmsacRl;
  c.u_max = Vec::Constant(1, 0.5);
  c.gains.gamma_k = 5e4;
  c.gains.gamma_theta = 2.5e4;
  c.gains.gamma_p = 1.0;
  c.integration = {1e-3, 20.0, 10};
  c.initial.x_m0 = V3(0.0, 0.0, 0.0);
  return c;
}

using Builder = ScenarioConfig (*)();

const std::map<std::string, std::pair<std::string, Builder>>& Table() {
  static const auto* table =
      new std::map<std::string, std::pair<std::string, Builder>>{
          {kFig4,
           {"homogeneous pendulum network driven by the reference policy alone",
            [] {
              ScenarioConfig c = PendulumBase(kFig4);
              c.mode = ControllerMode::kRlOnly;
              return c;
            }}},
          {kFig5,
           {"heterogeneous pendulums (+/-25%) with 0.1 sin t disturbance, policy only",
            [] {
              ScenarioConfig c = HeterogeneousPendulum(kFig5);
              c.mode = ControllerMode::kRlOnly;
              c.error_radius = 0.1;
              return c;
            }}},
          {kFig6,
           {"same network as fig5 under distributed adaptive control",
            [] {
              ScenarioConfig c = HeterogeneousPendulum(kFig6);
              c.mode = ControllerMode::kDmracRl;
              c.error_radius = 0.1;
              return c;
            }}},
          {kFig7,
           {"distributed adaptive control under random piecewise-constant disturbance",
            [] {
              ScenarioConfig c = HeterogeneousPendulum(kFig7);
              c.mode = ControllerMode::kDmracRl;
              c.uncertainty = {};
              c.uncertainty.kind = "random";
              c.uncertainty.low = -1.0;
              c.uncertainty.high = 1.0;
              c.uncertainty.hold = 0.1;
              c.uncertainty.seed = 101;
              c.error_radius = 0.5;
              return c;
            }}},
          {kFig8,
           {"distributed adaptive control tracking a multi-step setpoint",
            [] {
              ScenarioConfig c = HeterogeneousPendulum(kFig8);
              c.mode = ControllerMode::kDmracRl;
              c.policy.setpoint = 0.5;
              c.policy.schedule = {{7.0, Vec::Constant(1, -0.25)},
                                   {14.0, Vec::Constant(1, 0.25)}};
              c.integration = {1e-3, 21.0, 10};
              c.error_radius = 0.1;
              c.settle_epsilon = 0.1;
              return c;
            }}},
          {kFig9,
           {"saturated MIMO3 network under distributed adaptive anti-windup control",
            [] { return MimoBase(kFig9); }}},
          {kFig10,
           {"fig9 network with adaptive control but no anti-windup",
            [] {
              ScenarioConfig c = MimoBase(kFig10);
              c.mode = ControllerMode::kAdaptiveNoAntiwindup;
              return c;
            }}},
          {kFig11,
           {"paired fig9/fig10 runs with error and saturation deficit series",
            [] { return MimoBase(kFig11); }}},
      };
  return *table;
}

}  // namespace

const std::vector<std::string>& PresetNames() {
  static const std::vector<std::string> names{kFig4, kFig5, kFig6,  kFig7,
                                              kFig8, kFig9, kFig10, kFig11};
  return names;
}

std::string ResolvePresetName(const std::string& name) {
  static const std::map<std::string, std::string> aliases{
      {"fig6_heterogeneous_dmrac", kFig6},
  };
  if (Table().count(name)) return name;
  auto it = aliases.find(name);
  if (it != aliases.end()) return it->second;
  throw Error(ErrorCode::kInvalidArgument, "unknown preset '" + name + "'");
}

std::string PresetDescription(const std::string& name) {
  return Table().at(ResolvePresetName(name)).first;
}

ScenarioConfig MakePreset(const std::string& name) {
  return Table().at(ResolvePresetName(name)).second();
}

bool IsComparisonPreset(const std::string& name) {
  return ResolvePresetName(name) == kFig11;
}

}  // namespace syncnet
