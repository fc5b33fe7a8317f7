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

#ifndef SYNCNET_SIMULATION_H_
#define SYNCNET_SIMULATION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "syncnet/controllers.h"
#include "syncnet/linalg.h"
#include "syncnet/models.h"
#include "syncnet/topology.h"

namespace syncnet {

enum class ControllerMode {
  kRlOnly,
  kDmracRl,
  kDmracRlLinear,
  kDmsacRl,
  kAdaptiveNoAntiwindup,
};

std::string_view ToString(ControllerMode mode);
/// Accepts the config spellings (rl_only, dmrac_rl, ...); throws kParseError.
ControllerMode ParseControllerMode(std::string_view name);

inline bool IsAdaptive(ControllerMode m) { return m != ControllerMode::kRlOnly; }
inline bool AllowsSaturation(ControllerMode m) {
  return m == ControllerMode::kDmsacRl ||
         m == ControllerMode::kAdaptiveNoAntiwindup;
}

/// One fixed RK4 step of y' = f(t, y).
template <typename F>
Vec Rk4Step(const F& f, double t, const Vec& y, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::kPrecondition, "dt must be positive");
  const Vec k1 = f(t, y);
  const Vec k2 = f(t + 0.5 * h, Vec(y + (0.5 * h) * k1));
  const Vec k3 = f(t + 0.5 * h, Vec(y + (0.5 * h) * k2));
  const Vec k4 = f(t + h, Vec(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct IntegrationSettings {
  double dt = 1e-3;
  double t_final = 20.0;
  int record_every = 10;

  /// Number of RK4 steps; throws kPrecondition unless t_final / dt is a
  /// positive integer (to 1e-9 relative).
  long long Steps() const;
};

struct DivergenceSettings {
  double state_bound = 1e6;  // any plant or controller block norm above this trips the guard
};

/// Everything needed to assemble a network.
struct NetworkSpec {
  ReferenceModel reference;
  std::vector<AgentModel> agents;
  std::vector<Basis> bases;  // controller basis per agent; empty = default
  std::vector<std::vector<int>> adjacency;
  AgentId leader = 0;
  ControllerMode mode = ControllerMode::kDmracRl;
  AdaptationRates rates;
  Mat Q;  // empty = identity
  UpsilonProfile upsilon;
  std::optional<SaturationSpec> saturation;
  double lambda_hat = 1.0;
  bool warm_start = false;
  Vec x_m0;
  std::vector<Vec> x0;
  IntegrationSettings integration;
  DivergenceSettings divergence;
  int decomposition_trials = 100;
  std::uint64_t decomposition_seed = 0;
};

/// Ideal gains for one agent, used by warm starts and the Lyapunov monitor.
struct GroundTruth {
  Mat K_m;                     // B Lambda K_m^T = A_m - A
  Mat K_r;                     // leader: B Lambda K_r^T = B_m
  Mat Theta;                   // own basis weights
  Mat K_p;                     // -Lambda
  std::vector<Mat> K;          // per edge: B_i Lambda_i K^T = A_j - A_i
  std::vector<Mat> K_r_edge;   // per edge: B_i Lambda_i K_r^T = B_j Lambda_j
  std::vector<Mat> Theta_edge; // per edge: neighbor weights mapped to agent i
  bool theta_exact = true;     // basis represents the disturbance exactly
};

struct NetworkState {
  double t = 0.0;
  Vec x_m;
  std::vector<Vec> x;
  LeaderState leader;
  std::vector<FollowerState> followers;  // indexed by agent; leader slot unused
};

/// Controls at one instant.
struct Controls {
  Vec u_m;
  std::vector<Vec> u;
  std::vector<Vec> u_sat;
};

struct MonitorValue {
  std::vector<double> per_agent;
  double total = 0.0;
};

struct Sample {
  double t = 0.0;
  Vec x_m;
  Vec u_m;
  Vec target;                    // policy setpoint as a full state
  std::vector<Vec> x;
  std::vector<Vec> u;
  std::vector<Vec> u_sat;
  std::vector<double> err_norm;  // |x_i - x_m|
  std::vector<double> sync_err;  // |e_1| or sqrt(sum_j |e_ij|^2)
  std::vector<double> eu_norm;   // same with e_u (equals sync_err without e_p)
  std::vector<double> V_agent;
  double V = 0.0;
};

struct LogEvent {
  enum class Kind { kSetpointChange, kSaturationOnset, kDivergence };
  Kind kind = Kind::kSetpointChange;
  double t = 0.0;
  int agent = -1;  // zero-based, -1 when not tied to an agent
  std::string message;
};

struct TrajectoryLog {
  int n = 0;
  int p = 0;
  int agents = 0;
  std::vector<Sample> samples;
  std::vector<LogEvent> events;
  bool diverged = false;
  double diverged_time = 0.0;
  std::string diverged_reason;
};

class Network {
 public:
  /// Validates graph, dimensions, matching conditions, the reference
  /// closed loop, controller constants and the canonical decomposition.
  static Network Build(NetworkSpec spec);

  const NetworkSpec& spec() const { return spec_; }
  const CommGraph& graph() const { return graph_; }
  int size() const { return static_cast<int>(spec_.agents.size()); }
  int n() const { return n_; }
  int p() const { return p_; }

  const ControllerConstants& leader_constants() const { return leader_c_; }
  const ControllerConstants& edge_constants(AgentId i, int edge) const {
    return edge_c_[i][edge];
  }
  const GroundTruth& ground_truth(AgentId i) const { return truth_[i]; }
  const Basis& basis(AgentId i) const { return bases_[i]; }
  /// max over edges of |B_j Lambda_j b_j - H_j|_F.
  double h_mismatch() const { return h_mismatch_; }
  double max_decomposition_residual() const { return max_decomp_; }

  NetworkState InitialState() const;

  /// One RK4 step; controls are recomputed at every stage.
  NetworkState Step(const NetworkState& s, double dt) const;

  Controls EvaluateControls(const NetworkState& s) const;
  MonitorValue Monitor(const NetworkState& s) const;

  /// Integrates to t_final, recording every `record_every` steps. Divergence
  /// ends the run early and is reported in the log, not thrown.
  TrajectoryLog Run() const;

 private:
  explicit Network(NetworkSpec spec, CommGraph graph)
      : spec_(std::move(spec)), graph_(std::move(graph)) {}

  Vec Pack(const NetworkState& s) const;
  void Unpack(const Vec& y, NetworkState* s) const;
  NetworkState Derivative(const NetworkState& s, Controls* controls) const;
  Sample Record(const NetworkState& s) const;
  /// Empty when healthy, otherwise a description of the first bad block.
  std::string CheckHealth(const NetworkState& s, int* agent) const;

  NetworkSpec spec_;
  CommGraph graph_;
  int n_ = 0;
  int p_ = 0;
  std::vector<Basis> bases_;
  ControllerConstants leader_c_;
  std::vector<std::vector<ControllerConstants>> edge_c_;
  std::vector<GroundTruth> truth_;
  NetworkState zero_state_;
  double h_mismatch_ = 0.0;
  double max_decomp_ = 0.0;
};

}  // namespace syncnet

#endif  // SYNCNET_SIMULATION_H_
