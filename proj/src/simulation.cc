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
#include <sstream>

namespace syncnet {
namespace {

constexpr std::pair<ControllerMode, std::string_view> kModeNames[] = {
    {ControllerMode::kRlOnly, "rl_only"},
    {ControllerMode::kDmracRl, "dmrac_rl"},
    {ControllerMode::kDmracRlLinear, "dmrac_rl_linear"},
    {ControllerMode::kDmsacRl, "dmsac_rl"},
    {ControllerMode::kAdaptiveNoAntiwindup, "adaptive_no_antiwindup"},
};

// Calls f(double*, size) on every integrated quantity in a fixed order.
template <typename State, typename F>
void ForEachBlock(State& s, AgentId leader, F&& f) {
  f(s.x_m.data(), s.x_m.size());
  for (auto& x : s.x) f(x.data(), x.size());
  auto mat = [&](auto& m) { f(m.data(), m.size()); };
  mat(s.leader.K_m);
  mat(s.leader.K_r);
  mat(s.leader.Theta);
  mat(s.leader.K_p);
  mat(s.leader.e_p);
  for (std::size_t a = 0; a < s.followers.size(); ++a) {
    if (static_cast<AgentId>(a) == leader) continue;
    auto& fs = s.followers[a];
    for (auto& e : fs.edges) {
      mat(e.K);
      mat(e.K_r);
      mat(e.Theta);
      mat(e.e_p);
    }
    mat(fs.K_m);
    mat(fs.Theta);
    mat(fs.K_p);
  }
}

// tr(Lambda Kt^T Gamma^-1 Kt)
double TraceTerm(const Mat& lambda, const Mat& Kt, const AdaptationRate& rate) {
  return (lambda * (Kt.transpose() * rate.ApplyInverse(Kt))).trace();
}

double QuadForm(const Mat& P, const Vec& e) { return e.dot(P * e); }

}  // namespace

std::string_view ToString(ControllerMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "unknown";
}

ControllerMode ParseControllerMode(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (n == name) return m;
  }
  throw Error(ErrorCode::kParseError, "unknown controller mode '" +
                                          std::string(name) + "'");
}

long long IntegrationSettings::Steps() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kPrecondition, "dt must be positive");
  }
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw Error(ErrorCode::kPrecondition, "t_final must be positive");
  }
  if (record_every < 1) {
    throw Error(ErrorCode::kPrecondition, "record_every must be >= 1");
  }
  const double ratio = t_final / dt;
  const long long steps = std::llround(ratio);
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio) {
    throw Error(ErrorCode::kPrecondition,
                "t_final must be an integer multiple of dt");
  }
  return steps;
}

Network Network::Build(NetworkSpec spec) {
  CommGraph graph = CommGraph::Validate(spec.adjacency, spec.leader);
  const int N = graph.size();
  if (static_cast<int>(spec.agents.size()) != N) {
    throw Error(ErrorCode::kDimensionMismatch,
                "agent count " + std::to_string(spec.agents.size()) +
                    " does not match the graph size " + std::to_string(N));
  }
  spec.reference.Validate();
  const int n = spec.reference.n();
  const int p = spec.reference.p();
  for (int a = 0; a < N; ++a) {
    spec.agents[a].Validate();
    if (spec.agents[a].n != n || spec.agents[a].p != p) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "agent " + std::to_string(a + 1) +
                      " dimensions differ from the reference");
    }
  }
  if (!spec.reference.policy.StabilizesLinearization(spec.reference.A_m,
                                                     spec.reference.B_m)) {
    throw Error(ErrorCode::kNotHurwitz,
                "reference closed loop under the policy is not Hurwitz");
  }
  if (spec.saturation) {
    if (!AllowsSaturation(spec.mode)) {
      throw Error(ErrorCode::kValidationError,
                  "saturation requires mode dmsac_rl or adaptive_no_antiwindup");
    }
    spec.saturation->Validate(p);
  } else if (spec.mode == ControllerMode::kAdaptiveNoAntiwindup) {
    throw Error(ErrorCode::kValidationError,
                "adaptive_no_antiwindup needs a saturation block");
  }
  if (spec.Q.size() == 0) spec.Q = Mat::Identity(n, n);
  if (spec.Q.rows() != n || spec.Q.cols() != n || !PdCheck(spec.Q)) {
    throw Error(ErrorCode::kInvalidArgument, "Q must be n x n positive definite");
  }
  if (!(spec.lambda_hat > 0.0)) {
    throw Error(ErrorCode::kNonPositiveParameter, "lambda_hat must be positive");
  }
  if (spec.x_m0.size() == 0) spec.x_m0 = Vec::Zero(n);
  if (spec.x_m0.size() != n || static_cast<int>(spec.x0.size()) != N) {
    throw Error(ErrorCode::kDimensionMismatch,
                "initial conditions need x_m0 and one state per agent");
  }
  for (const auto& x : spec.x0) {
    if (x.size() != n || !x.allFinite()) {
      throw Error(ErrorCode::kDimensionMismatch, "initial agent state has wrong size");
    }
  }
  spec.integration.Steps();
  if (!(spec.divergence.state_bound > 0.0)) {
    throw Error(ErrorCode::kNonPositiveParameter, "divergence bound must be positive");
  }

  Network net(std::move(spec), std::move(graph));
  const NetworkSpec& s = net.spec_;
  net.n_ = n;
  net.p_ = p;

  if (s.bases.empty()) {
    for (const auto& a : s.agents) {
      net.bases_.push_back(a.uncertainty.DefaultControllerBasis());
    }
  } else if (s.bases.size() == 1) {
    net.bases_.assign(N, s.bases[0]);
  } else if (static_cast<int>(s.bases.size()) == N) {
    net.bases_ = s.bases;
  } else {
    throw Error(ErrorCode::kDimensionMismatch,
                "basis list must be empty, shared, or one per agent");
  }

  s.rates.m.CheckDim(n, "Gamma_m");
  s.rates.r.CheckDim(p, "Gamma_r");
  s.rates.ij.CheckDim(n, "Gamma_ij");
  s.rates.p.CheckDim(p, "Gamma_p");
  for (const auto& b : net.bases_) {
    s.rates.theta.CheckDim(static_cast<Eigen::Index>(b.size()), "Gamma_theta");
    s.rates.phi.CheckDim(static_cast<Eigen::Index>(b.size()), "Gamma_phi");
  }

  const ReferenceModel& ref = s.reference;
  const Mat lambda_hat = s.lambda_hat * Mat::Identity(p, p);
  auto validated = [&](ControllerConstants c, const std::string& where) {
    try {
      auto report = ValidateCanonicalDecomposition(c, ref.A_m, ref.map,
                                                   s.decomposition_trials,
                                                   s.decomposition_seed);
      net.max_decomp_ = std::max(net.max_decomp_, report.max_residual);
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.detail());
    }
    return c;
  };
  net.leader_c_ = validated(
      DeriveConstants(ref.B_m, Mat::Identity(p, p), ref.A_m, s.Q, s.upsilon),
      "leader");
  net.edge_c_.resize(N);
  for (int i = 0; i < N; ++i) {
    for (AgentId j : net.graph_.InNeighbors(i)) {
      const AgentModel& nb = s.agents[j];
      std::string where =
          "edge " + std::to_string(j + 1) + "->" + std::to_string(i + 1);
      ControllerConstants c;
      try {
        c = DeriveConstants(nb.B, lambda_hat, ref.A_m, s.Q, s.upsilon);
      } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.detail());
      }
      const Mat h_true = nb.B * nb.Lambda * c.b;
      net.h_mismatch_ = std::max(net.h_mismatch_, (h_true - c.H).norm());
      net.edge_c_[i].push_back(validated(std::move(c), where));
    }
  }

  net.truth_.resize(N);
  if (IsAdaptive(s.mode)) {
    for (const auto& a : s.agents) {
      if (!(a.map == ref.map)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "adaptive modes need agents to share the reference map");
      }
    }
    VerifyNetworkMatching(s.agents, net.graph_, &ref);
    auto weights = [&](AgentId a, bool* exact) {
      auto w = s.agents[a].uncertainty.IdealWeights(net.bases_[a], p);
      if (!w) {
        *exact = false;
        return Mat(Mat::Zero(static_cast<Eigen::Index>(net.bases_[a].size()), p));
      }
      return *w;
    };
    for (int i = 0; i < N; ++i) {
      GroundTruth& g = net.truth_[i];
      const AgentModel& ag = s.agents[i];
      FeedbackMatch fb = SolveFeedbackMatching(ag, ref);
      g.K_m = fb.K_m;
      g.K_r = fb.K_r;
      g.Theta = weights(i, &g.theta_exact);
      g.K_p = -ag.Lambda;
      for (AgentId j : net.graph_.InNeighbors(i)) {
        CouplingMatch cm = SolveCouplingMatching(ag, s.agents[j]);
        g.K.push_back(cm.K);
        g.K_r_edge.push_back(cm.K_r);
        g.Theta_edge.push_back(weights(j, &g.theta_exact) * cm.K_r);
      }
    }
  }

  NetworkState& z = net.zero_state_;
  z.x_m = Vec::Zero(n);
  z.x.assign(N, Vec::Zero(n));
  const bool saturated_mode = s.mode == ControllerMode::kDmsacRl;
  const AgentId leader = net.graph_.leader();
  z.leader = LeaderState::Zero(n, p, static_cast<int>(net.bases_[leader].size()),
                               saturated_mode);
  z.followers.resize(N);
  for (int i = 0; i < N; ++i) {
    FollowerState& fs = z.followers[i];
    fs.saturation = saturated_mode;
    if (i == leader) continue;
    for (AgentId j : net.graph_.InNeighbors(i)) {
      FollowerEdgeState e;
      e.neighbor = j;
      e.K = Mat::Zero(n, p);
      e.K_r = Mat::Zero(p, p);
      e.Theta = Mat::Zero(static_cast<Eigen::Index>(net.bases_[j].size()), p);
      e.e_p = Vec::Zero(n);
      fs.edges.push_back(std::move(e));
    }
    fs.K_m = Mat::Zero(n, p);
    fs.Theta = Mat::Zero(static_cast<Eigen::Index>(net.bases_[i].size()), p);
    fs.K_p = Mat::Zero(p, p);
  }
  return net;
}

NetworkState Network::InitialState() const {
  NetworkState s = zero_state_;
  s.t = 0.0;
  s.x_m = spec_.x_m0;
  s.x = spec_.x0;
  const AgentId leader = graph_.leader();
  const Mat kp0 = -spec_.lambda_hat * Mat::Identity(p_, p_);
  s.leader.K_p = kp0;
  for (int i = 0; i < size(); ++i) {
    if (i != leader) s.followers[i].K_p = kp0;
  }
  if (spec_.warm_start && IsAdaptive(spec_.mode)) {
    const GroundTruth& g = truth_[leader];
    s.leader.K_m = g.K_m;
    s.leader.K_r = g.K_r;
    s.leader.Theta = g.Theta;
    s.leader.K_p = g.K_p;
    for (int i = 0; i < size(); ++i) {
      if (i == leader) continue;
      const GroundTruth& gi = truth_[i];
      FollowerState& fs = s.followers[i];
      fs.K_m = gi.K_m;
      fs.Theta = gi.Theta;
      fs.K_p = gi.K_p;
      for (std::size_t k = 0; k < fs.edges.size(); ++k) {
        fs.edges[k].K = gi.K[k];
        fs.edges[k].K_r = gi.K_r_edge[k];
        fs.edges[k].Theta = gi.Theta_edge[k];
      }
    }
  }
  return s;
}

Vec Network::Pack(const NetworkState& s) const {
  Eigen::Index total = 0;
  ForEachBlock(s, graph_.leader(),
               [&](const double*, Eigen::Index len) { total += len; });
  Vec y(total);
  Eigen::Index at = 0;
  ForEachBlock(s, graph_.leader(), [&](const double* d, Eigen::Index len) {
    y.segment(at, len) = Eigen::Map<const Vec>(d, len);
    at += len;
  });
  return y;
}

void Network::Unpack(const Vec& y, NetworkState* s) const {
  Eigen::Index at = 0;
  ForEachBlock(*s, graph_.leader(), [&](double* d, Eigen::Index len) {
    Eigen::Map<Vec>(d, len) = y.segment(at, len);
    at += len;
  });
}

NetworkState Network::Derivative(const NetworkState& s, Controls* controls) const {
  const int N = size();
  const ReferenceModel& ref = spec_.reference;
  const ControllerMode mode = spec_.mode;
  const bool adaptive = IsAdaptive(mode);
  const bool msac = mode == ControllerMode::kDmsacRl;
  const bool linear = mode == ControllerMode::kDmracRlLinear;
  const AgentId leader = graph_.leader();
  const double t = s.t;

  NetworkState d = zero_state_;
  const Vec u_m = ref.policy.Eval(s.x_m, t);
  d.x_m = ReferenceDerivative(ref, s.x_m, u_m);
  const Vec sigma_m = Sigma(ref.map, s.x_m);

  std::vector<Vec> sigma(N), phi(N), u(N), u_sat(N);
  for (int a = 0; a < N; ++a) {
    sigma[a] = Sigma(spec_.agents[a].map, s.x[a]);
    if (adaptive) phi[a] = EvalBasis(bases_[a], s.x[a], t);
  }

  for (AgentId a : graph_.EvaluationOrder()) {
    const AgentModel& agent = spec_.agents[a];
    const Vec& x = s.x[a];
    std::vector<NeighborSignals> neighbors;
    Vec Xi;
    if (!adaptive) {
      u[a] = ref.policy.Eval(x, t);
    } else if (a == leader) {
      const Vec e = x - s.x_m;
      const Vec xi = AugmentedInput(u_m, sigma[a], sigma_m, e, leader_c_);
      u[a] = LeaderControl(s.leader, sigma[a], xi, phi[a]);
      neighbors.push_back({sigma[a], xi, phi[a], e, &leader_c_});
    } else {
      const Vec& s_i = linear ? x : sigma[a];
      Xi = Vec::Zero(n_);
      const auto& in = graph_.InNeighbors(a);
      for (std::size_t k = 0; k < in.size(); ++k) {
        const AgentId j = in[k];
        const Vec& s_j = linear ? s.x[j] : sigma[j];
        const ControllerConstants& c = edge_c_[a][k];
        NeighborSignals nb;
        nb.sigma = s_j;
        nb.error = x - s.x[j];
        nb.xi = AugmentedInput(u_sat[j], s_i, s_j, nb.error, c);
        nb.phi = phi[j];
        nb.constants = &c;
        Xi += s_i - s_j;
        neighbors.push_back(std::move(nb));
      }
      u[a] = FollowerControl(s.followers[a], neighbors, s_i, Xi, phi[a], linear);
    }

    Vec delta_u;
    if (spec_.saturation) {
      SaturationResult sat = Saturate(u[a], *spec_.saturation);
      u_sat[a] = std::move(sat.u_sat);
      delta_u = std::move(sat.delta);
    } else {
      u_sat[a] = u[a];
      delta_u = Vec::Zero(p_);
    }
    d.x[a] = AgentDerivative(agent, x, u_sat[a], t);

    if (!adaptive) continue;
    if (a == leader) {
      const NeighborSignals& me = neighbors.front();
      LeaderRates r = msac ? LeaderMsacGainDerivatives(s.leader, spec_.rates, me.sigma,
                                                       me.xi, me.phi, me.error,
                                                       delta_u, leader_c_, agent.B)
                           : LeaderGainDerivatives(s.leader, spec_.rates, me.sigma,
                                                   me.xi, me.phi, me.error,
                                                   leader_c_, agent.B);
      d.leader.K_m = std::move(r.K_m);
      d.leader.K_r = std::move(r.K_r);
      d.leader.Theta = std::move(r.Theta);
      d.leader.K_p = std::move(r.K_p);
      d.leader.e_p = std::move(r.e_p);
    } else {
      FollowerRates r =
          msac ? MsacGainDerivatives(s.followers[a], spec_.rates, neighbors, Xi,
                                     phi[a], delta_u, agent.B, linear)
               : FollowerGainDerivatives(s.followers[a], spec_.rates, neighbors,
                                         Xi, phi[a], agent.B, linear);
      FollowerState& fd = d.followers[a];
      for (std::size_t k = 0; k < fd.edges.size(); ++k) {
        fd.edges[k].K = std::move(r.edges[k].K);
        fd.edges[k].K_r = std::move(r.edges[k].K_r);
        fd.edges[k].Theta = std::move(r.edges[k].Theta);
        fd.edges[k].e_p = std::move(r.edges[k].e_p);
      }
      fd.K_m = std::move(r.K_m);
      fd.Theta = std::move(r.Theta);
      fd.K_p = std::move(r.K_p);
    }
  }
  if (controls != nullptr) {
    controls->u_m = u_m;
    controls->u = std::move(u);
    controls->u_sat = std::move(u_sat);
  }
  return d;
}

NetworkState Network::Step(const NetworkState& s, double dt) const {
  NetworkState scratch = s;
  auto f = [&](double t, const Vec& y) {
    Unpack(y, &scratch);
    scratch.t = t;
    return Pack(Derivative(scratch, nullptr));
  };
  const Vec y1 = Rk4Step(f, s.t, Pack(s), dt);
  NetworkState out = s;
  Unpack(y1, &out);
  out.t = s.t + dt;
  return out;
}

Controls Network::EvaluateControls(const NetworkState& s) const {
  Controls c;
  Derivative(s, &c);
  return c;
}

MonitorValue Network::Monitor(const NetworkState& s) const {
  const ControllerMode mode = spec_.mode;
  const bool adaptive = IsAdaptive(mode);
  const bool msac = mode == ControllerMode::kDmsacRl;
  const bool linear = mode == ControllerMode::kDmracRlLinear;
  const AgentId leader = graph_.leader();
  const AdaptationRates& g = spec_.rates;
  MonitorValue out;
  out.per_agent.assign(size(), 0.0);
  for (int a = 0; a < size(); ++a) {
    const Mat& lambda = spec_.agents[a].Lambda;
    const GroundTruth& truth = truth_[a];
    double v = 0.0;
    if (a == leader) {
      Vec e = s.x[a] - s.x_m;
      if (msac) e -= s.leader.e_p;
      v += QuadForm(leader_c_.P, e);
      if (adaptive) {
        v += TraceTerm(lambda, s.leader.K_m - truth.K_m, g.m);
        v += TraceTerm(lambda, s.leader.K_r - truth.K_r, g.r);
        v += TraceTerm(lambda, s.leader.Theta - truth.Theta, g.theta);
        if (msac) {
          const Mat kt = s.leader.K_p - truth.K_p;
          v += (kt.transpose() * g.p.ApplyInverse(kt)).trace();
        }
      }
    } else {
      const FollowerState& fs = s.followers[a];
      const auto& in = graph_.InNeighbors(a);
      for (std::size_t k = 0; k < in.size(); ++k) {
        Vec e = s.x[a] - s.x[in[k]];
        if (msac) e -= fs.edges[k].e_p;
        v += QuadForm(edge_c_[a][k].P, e);
        if (adaptive) {
          v += TraceTerm(lambda, fs.edges[k].K - truth.K[k], g.ij);
          v += TraceTerm(lambda, fs.edges[k].K_r - truth.K_r_edge[k], g.r);
          if (!linear) {
            v += TraceTerm(lambda, fs.edges[k].Theta - truth.Theta_edge[k], g.phi);
          }
        }
      }
      if (adaptive) {
        v += TraceTerm(lambda, fs.K_m - truth.K_m, g.m);
        if (!linear) v += TraceTerm(lambda, fs.Theta - truth.Theta, g.theta);
        if (msac) {
          const Mat kt = fs.K_p - truth.K_p;
          v += (kt.transpose() * g.p.ApplyInverse(kt)).trace();
        }
      }
    }
    out.per_agent[a] = v;
    out.total += v;
  }
  return out;
}

Sample Network::Record(const NetworkState& s) const {
  const AgentId leader = graph_.leader();
  const bool msac = spec_.mode == ControllerMode::kDmsacRl;
  Controls c = EvaluateControls(s);
  MonitorValue v = Monitor(s);
  Sample out;
  out.t = s.t;
  out.x_m = s.x_m;
  out.u_m = c.u_m;
  out.target = spec_.reference.policy.TargetState(s.t);
  out.x = s.x;
  out.u = std::move(c.u);
  out.u_sat = std::move(c.u_sat);
  out.V_agent = std::move(v.per_agent);
  out.V = v.total;
  for (int a = 0; a < size(); ++a) {
    out.err_norm.push_back((s.x[a] - s.x_m).norm());
    if (a == leader) {
      const Vec e = s.x[a] - s.x_m;
      out.sync_err.push_back(e.norm());
      out.eu_norm.push_back(msac ? (e - s.leader.e_p).norm() : e.norm());
      continue;
    }
    double se = 0.0, su = 0.0;
    const auto& in = graph_.InNeighbors(a);
    for (std::size_t k = 0; k < in.size(); ++k) {
      const Vec e = s.x[a] - s.x[in[k]];
      se += e.squaredNorm();
      su += msac ? (e - s.followers[a].edges[k].e_p).squaredNorm() : e.squaredNorm();
    }
    out.sync_err.push_back(std::sqrt(se));
    out.eu_norm.push_back(std::sqrt(su));
  }
  return out;
}

std::string Network::CheckHealth(const NetworkState& s, int* agent) const {
  const double bound = spec_.divergence.state_bound;
  auto bad = [&](const auto& m) { return !m.allFinite() || m.norm() > bound; };
  *agent = -1;
  if (bad(s.x_m)) return "reference state left the bound";
  for (int a = 0; a < size(); ++a) {
    *agent = a;
    if (bad(s.x[a])) return "state of agent " + std::to_string(a + 1) + " left the bound";
    bool ctrl_bad = false;
    if (a == graph_.leader()) {
      ctrl_bad = bad(s.leader.K_m) || bad(s.leader.K_r) || bad(s.leader.Theta) ||
                 bad(s.leader.K_p) || bad(s.leader.e_p);
    } else {
      const FollowerState& fs = s.followers[a];
      ctrl_bad = bad(fs.K_m) || bad(fs.Theta) || bad(fs.K_p);
      for (const auto& e : fs.edges) {
        ctrl_bad = ctrl_bad || bad(e.K) || bad(e.K_r) || bad(e.Theta) || bad(e.e_p);
      }
    }
    if (ctrl_bad) {
      return "controller of agent " + std::to_string(a + 1) + " left the bound";
    }
  }
  *agent = -1;
  return {};
}

TrajectoryLog Network::Run() const {
  const IntegrationSettings& in = spec_.integration;
  const long long steps = in.Steps();
  TrajectoryLog log;
  log.n = n_;
  log.p = p_;
  log.agents = size();
  for (const auto& c : spec_.reference.policy.schedule()) {
    if (c.time > in.t_final) continue;
    std::ostringstream os;
    os.precision(17);
    os << "setpoint ->";
    for (Eigen::Index k = 0; k < c.setpoint.size(); ++k) os << ' ' << c.setpoint(k);
    log.events.push_back({LogEvent::Kind::kSetpointChange, c.time, -1, os.str()});
  }
  std::vector<bool> saturated(size(), false);
  auto record = [&](const NetworkState& s) {
    Sample sample = Record(s);
    if (spec_.saturation) {
      for (int a = 0; a < size(); ++a) {
        if (!saturated[a] && sample.u[a] != sample.u_sat[a]) {
          saturated[a] = true;
          log.events.push_back({LogEvent::Kind::kSaturationOnset, s.t, a,
                                "input saturation first observed"});
        }
      }
    }
    log.samples.push_back(std::move(sample));
  };

  NetworkState state = InitialState();
  record(state);
  for (long long k = 0; k < steps; ++k) {
    state = Step(state, in.dt);
    state.t = static_cast<double>(k + 1) * in.dt;
    int agent = -1;
    std::string problem = CheckHealth(state, &agent);
    if (!problem.empty()) {
      log.diverged = true;
      log.diverged_time = state.t;
      log.diverged_reason = problem;
      log.events.push_back({LogEvent::Kind::kDivergence, state.t, agent, problem});
      break;
    }
    if ((k + 1) % in.record_every == 0 || k + 1 == steps) record(state);
  }
  return log;
}

}  // namespace syncnet
