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

#ifndef SYNCNET_SCENARIO_H_
#define SYNCNET_SCENARIO_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "syncnet/metrics.h"
#include "syncnet/simulation.h"

namespace syncnet {

/// Physical parameters of a pendulum or MIMO3 system.
struct ModelParams {
  std::string model = "pendulum";  // "pendulum" | "mimo3"
  double mass = 1.0;
  double length = 1.0;
  double damping = 0.0;
  double gravity = 9.81;
  std::array<double, 3> coefficients{1.0, 2.0, 3.0};
  double input_gain = 1.0;
  double lambda = 1.0;

  bool operator==(const ModelParams&) const = default;
};

struct PolicyConfig {
  std::string kind = "surrogate";  // "surrogate" | "affine" | "external"
  double setpoint = 0.0;           // surrogate theta_d
  double k1 = 4.0;
  double k2 = 4.0;
  Mat K;                           // affine
  Vec x_set;
  Vec u_ff;
  std::string path;                // external policy file
  std::vector<SetpointChange> schedule;
};

struct UncertaintyConfig {
  std::string kind = "none";  // "none" | "sinusoid" | "random" | "basis"
  double amplitude = 0.0;
  double omega = 1.0;
  double low = -1.0;
  double high = 1.0;
  double hold = 0.1;
  std::uint64_t seed = 0;     // agent k uses seed + k - 1
  Mat theta_star;             // basis
  std::vector<std::string> basis;
  int additive_state = 0;     // 1-based state row; 0 = through the input

  bool operator==(const UncertaintyConfig&) const = default;
};

struct AgentEntry {
  ModelParams params;
  std::optional<UncertaintyConfig> uncertainty;  // overrides the shared one
};

struct AgentsConfig {
  bool generated = true;
  ModelParams base;
  double low = 1.0;
  double high = 1.0;
  std::uint64_t seed = 0;
  int count = 12;
  std::vector<AgentEntry> list;
};

struct GraphConfig {
  std::string preset = "tree";  // "tree" | "chain" | "explicit"
  int fanout = 2;
  std::vector<std::vector<int>> adjacency;
  int leader = 1;  // 1-based
};

struct GainsConfig {
  double gamma_k = 10.0;
  double gamma_theta = 5.0;
  double gamma_p = 1.0;
  // Optional full matrices per family.
  std::optional<Mat> Gamma_m, Gamma_r, Gamma_theta, Gamma_ij, Gamma_phi, Gamma_p;
};

struct InitialConfig {
  std::string kind = "explicit";  // "explicit" | "random"
  Vec x_m0;                       // empty = zero
  std::vector<Vec> x0;            // explicit: one shared entry or one per agent
  Vec low;                        // random: per-component range
  Vec high;
  std::uint64_t seed = 0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  GraphConfig graph;
  ModelParams reference;
  PolicyConfig policy;
  AgentsConfig agents;
  UncertaintyConfig uncertainty;
  std::vector<std::string> basis;  // empty = derived from the uncertainty
  ControllerMode mode = ControllerMode::kDmracRl;
  GainsConfig gains;
  std::optional<Mat> Q;
  double lambda0 = 2.0;
  std::optional<Mat> upsilon;
  std::optional<Vec> u_max;
  IntegrationSettings integration;
  InitialConfig initial;
  bool warm_start = false;
  double state_bound = 1e6;
  std::optional<double> error_radius;
  double tail_fraction = 0.25;
  double settle_epsilon = 0.05;
  int decomposition_trials = 100;
  std::uint64_t decomposition_seed = 0;

  std::string base_dir;  // resolves relative policy paths; not serialized
};

/// Parses and validates a config document. Throws kParseError (syntax,
/// wrong types) or kValidationError (unknown fields, bad values).
ScenarioConfig ParseConfig(const std::string& text);
ScenarioConfig LoadConfig(const std::string& path);

/// Effective config as pretty JSON, every default spelled out.
std::string EmitConfig(const ScenarioConfig& cfg);

/// Replaces every seed in the config.
void OverrideSeeds(ScenarioConfig* cfg, std::uint64_t seed);

NetworkSpec BuildNetworkSpec(const ScenarioConfig& cfg);
MetricsSettings MetricsSettingsFor(const ScenarioConfig& cfg);

struct RunResult {
  TrajectoryLog log;
  Metrics metrics;
  double h_mismatch = 0.0;
  double decomposition_residual = 0.0;
};

/// Builds and runs the network. Setup problems throw; divergence is
/// reported in the result.
RunResult RunScenario(const ScenarioConfig& cfg);

}  // namespace syncnet

#endif  // SYNCNET_SCENARIO_H_
