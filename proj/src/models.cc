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

#include "syncnet/models.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace syncnet {
namespace {

// splitmix64 finalizer; stateless so a value depends only on its key.
std::uint64_t Mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double UnitFromKey(std::uint64_t seed, std::int64_t interval, int channel) {
  std::uint64_t h = Mix(seed);
  h = Mix(h ^ static_cast<std::uint64_t>(interval));
  h = Mix(h ^ static_cast<std::uint64_t>(channel));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void RequireFinite(const Mat& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " has non-finite entries");
  }
}

std::string FormatOmega(double omega) {
  if (omega == 1.0) return "";
  std::ostringstream os;
  os.precision(17);
  os << omega;
  return os.str();
}

}  // namespace

double BasisFunction::Eval(const Vec& x, double t) const {
  switch (kind) {
    case Kind::kOne:
      return 1.0;
    case Kind::kSinT:
      return std::sin(omega * t);
    case Kind::kCosT:
      return std::cos(omega * t);
    case Kind::kState:
      return x(index);
    case Kind::kSinState:
      return std::sin(x(index));
  }
  return 0.0;
}

std::string BasisFunction::Name() const {
  switch (kind) {
    case Kind::kOne:
      return "1";
    case Kind::kSinT:
      return "sin(" + FormatOmega(omega) + "t)";
    case Kind::kCosT:
      return "cos(" + FormatOmega(omega) + "t)";
    case Kind::kState:
      return "x" + std::to_string(index + 1);
    case Kind::kSinState:
      return "sin(x" + std::to_string(index + 1) + ")";
  }
  return "";
}

BasisFunction BasisFunction::Parse(const std::string& name) {
  auto bad = [&]() {
    return Error(ErrorCode::kParseError, "unknown basis function '" + name + "'");
  };
  auto parse_index = [&](const std::string& digits) {
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
      throw bad();
    }
    int k = std::stoi(digits);
    if (k < 1) throw bad();
    return k - 1;
  };
  if (name == "1" || name == "one") return {};
  if (name.size() > 1 && name[0] == 'x') {
    return {Kind::kState, parse_index(name.substr(1)), 1.0};
  }
  if (name.rfind("sin(x", 0) == 0 && name.back() == ')') {
    return {Kind::kSinState, parse_index(name.substr(5, name.size() - 6)), 1.0};
  }
  for (auto [prefix, kind] : {std::pair{"sin(", Kind::kSinT},
                              std::pair{"cos(", Kind::kCosT}}) {
    std::string p(prefix);
    if (name.rfind(p, 0) == 0 && name.size() > p.size() + 1 &&
        name.substr(name.size() - 2) == "t)") {
      std::string w = name.substr(p.size(), name.size() - p.size() - 2);
      double omega = 1.0;
      if (!w.empty()) {
        std::size_t used = 0;
        try {
          omega = std::stod(w, &used);
        } catch (const std::exception&) {
          throw bad();
        }
        if (used != w.size()) throw bad();
      }
      return {kind, 0, omega};
    }
  }
  throw bad();
}

Vec EvalBasis(const Basis& basis, const Vec& x, double t) {
  Vec phi(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) phi(k) = basis[k].Eval(x, t);
  return phi;
}

UncertaintySpec UncertaintySpec::Sinusoid(double amplitude, double omega) {
  UncertaintySpec s;
  s.kind = Kind::kSinusoid;
  s.amplitude = amplitude;
  s.omega = omega;
  return s;
}

UncertaintySpec UncertaintySpec::BasisWeighted(Mat theta_star, Basis basis) {
  if (theta_star.rows() != static_cast<Eigen::Index>(basis.size())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "theta_star rows must equal the basis length");
  }
  UncertaintySpec s;
  s.kind = Kind::kBasisWeighted;
  s.theta_star = std::move(theta_star);
  s.basis = std::move(basis);
  return s;
}

UncertaintySpec UncertaintySpec::RandomPiecewiseConstant(double low,
                                                         double high,
                                                         double hold,
                                                         std::uint64_t seed) {
  if (!(high >= low)) {
    throw Error(ErrorCode::kInvalidArgument, "random uncertainty needs low <= high");
  }
  if (!(hold > 0.0)) {
    throw Error(ErrorCode::kNonPositiveParameter, "hold interval must be positive");
  }
  UncertaintySpec s;
  s.kind = Kind::kRandomPiecewiseConstant;
  s.low = low;
  s.high = high;
  s.hold = hold;
  s.seed = seed;
  return s;
}

double UncertaintySpec::Bound() const {
  switch (kind) {
    case Kind::kNone:
      return 0.0;
    case Kind::kSinusoid:
      return std::abs(amplitude);
    case Kind::kRandomPiecewiseConstant:
      return std::max(std::abs(low), std::abs(high));
    case Kind::kBasisWeighted:
      // Only time-only bases are bounded a priori.
      for (const auto& f : basis) {
        if (f.kind == BasisFunction::Kind::kState) {
          return std::numeric_limits<double>::infinity();
        }
      }
      return theta_star.cwiseAbs().colwise().sum().maxCoeff();
  }
  return 0.0;
}

Basis UncertaintySpec::DefaultControllerBasis() const {
  switch (kind) {
    case Kind::kSinusoid:
      return {BasisFunction{BasisFunction::Kind::kSinT, 0, omega}};
    case Kind::kBasisWeighted:
      return basis;
    case Kind::kNone:
      return {};
    default:
      return {BasisFunction{}};
  }
}

std::optional<Mat> UncertaintySpec::IdealWeights(const Basis& controller_basis,
                                                 int p) const {
  const auto l = static_cast<Eigen::Index>(controller_basis.size());
  Mat theta = Mat::Zero(l, p);
  if (additive_state >= 0) return std::nullopt;
  auto find = [&](const BasisFunction& f) -> Eigen::Index {
    for (Eigen::Index k = 0; k < l; ++k) {
      if (controller_basis[k] == f) return k;
    }
    return -1;
  };
  switch (kind) {
    case Kind::kNone:
      return theta;
    case Kind::kSinusoid: {
      Eigen::Index k = find({BasisFunction::Kind::kSinT, 0, omega});
      if (k < 0) return std::nullopt;
      theta.row(k).setConstant(amplitude);
      return theta;
    }
    case Kind::kBasisWeighted: {
      if (theta_star.cols() != p) return std::nullopt;
      for (std::size_t r = 0; r < basis.size(); ++r) {
        Eigen::Index k = find(basis[r]);
        if (k < 0) return std::nullopt;
        theta.row(k) += theta_star.row(static_cast<Eigen::Index>(r));
      }
      return theta;
    }
    case Kind::kRandomPiecewiseConstant:
      return std::nullopt;
  }
  return std::nullopt;
}

Vec EvalUncertainty(const UncertaintySpec& spec, const Vec& x, double t, int p) {
  Vec w = Vec::Zero(p);
  switch (spec.kind) {
    case UncertaintySpec::Kind::kNone:
      break;
    case UncertaintySpec::Kind::kSinusoid:
      w.setConstant(spec.amplitude * std::sin(spec.omega * t));
      break;
    case UncertaintySpec::Kind::kBasisWeighted:
      w = spec.theta_star.transpose() * EvalBasis(spec.basis, x, t);
      break;
    case UncertaintySpec::Kind::kRandomPiecewiseConstant: {
      // Interval index from the hold grid; a tiny offset keeps grid points
      // like 0.3 / 0.1 on the interval they start.
      auto k = static_cast<std::int64_t>(std::floor(t / spec.hold + 1e-9));
      for (int c = 0; c < p; ++c) {
        w(c) = spec.low + (spec.high - spec.low) * UnitFromKey(spec.seed, k, c);
      }
      break;
    }
  }
  return w;
}

bool IsCompanionInput(const Mat& B) {
  const Eigen::Index n = B.rows(), p = B.cols();
  if (p > n || p == 0) return false;
  if (n > p && B.topRows(n - p).cwiseAbs().maxCoeff() != 0.0) return false;
  return B.bottomRows(p).cwiseAbs().maxCoeff() > 0.0;
}

void AgentModel::Validate() const {
  if (n <= 0 || p <= 0 || p > n) {
    throw Error(ErrorCode::kDimensionMismatch, "agent needs 0 < p <= n");
  }
  if (A.rows() != n || A.cols() != n || B.rows() != n || B.cols() != p ||
      Lambda.rows() != p || Lambda.cols() != p) {
    throw Error(ErrorCode::kDimensionMismatch, "agent matrices have wrong shapes");
  }
  RequireFinite(A, "A");
  RequireFinite(B, "B");
  RequireFinite(Lambda, "Lambda");
  if (!Lambda.isApprox(Lambda.transpose()) || !PdCheck(Lambda)) {
    throw Error(ErrorCode::kNonPositiveParameter,
                "Lambda must be symmetric positive definite");
  }
  if (!IsCompanionInput(B)) {
    throw Error(ErrorCode::kNotCompanionForm,
                "B must be zero outside its last p rows");
  }
  if (uncertainty.additive_state >= n) {
    throw Error(ErrorCode::kInvalidArgument, "additive_state out of range");
  }
}

Vec AgentDerivative(const AgentModel& m, const Vec& x, const Vec& u, double t) {
  if (x.size() != m.n || u.size() != m.p) {
    throw Error(ErrorCode::kDimensionMismatch, "agent_derivative: bad x or u size");
  }
  Vec w = EvalUncertainty(m.uncertainty, x, t, m.p);
  Vec dx = m.A * Sigma(m.map, x);
  if (m.uncertainty.additive_state >= 0) {
    dx += m.B * (m.Lambda * u);
    dx(m.uncertainty.additive_state) += w(0);
  } else {
    dx += m.B * (m.Lambda * (u + w));
  }
  return dx;
}

void ReferenceModel::Validate() const {
  const Eigen::Index n = A_m.rows();
  if (n == 0 || A_m.cols() != n || B_m.rows() != n || B_m.cols() == 0 ||
      B_m.cols() > n) {
    throw Error(ErrorCode::kDimensionMismatch, "reference matrices have wrong shapes");
  }
  RequireFinite(A_m, "A_m");
  RequireFinite(B_m, "B_m");
  if (!IsCompanionInput(B_m)) {
    throw Error(ErrorCode::kNotCompanionForm,
                "B_m must be zero outside its last p rows");
  }
  if (policy.input_dim() != B_m.cols() || policy.state_dim() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "policy dimensions do not match the reference");
  }
}

Vec ReferenceDerivative(const ReferenceModel& r, const Vec& x_m, const Vec& u_m) {
  if (x_m.size() != r.n() || u_m.size() != r.p()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "reference_derivative: bad x_m or u_m size");
  }
  return r.A_m * Sigma(r.map, x_m) + r.B_m * u_m;
}

AgentModel MakePendulum(double mass, double length, double damping,
                        double gravity, UncertaintySpec uncertainty) {
  if (!(mass > 0.0) || !(length > 0.0) || !(gravity > 0.0) || !(damping >= 0.0)) {
    throw Error(ErrorCode::kNonPositiveParameter,
                "pendulum needs mass, length, gravity > 0 and damping >= 0");
  }
  const double inertia = mass * length * length;
  AgentModel m;
  m.n = 2;
  m.p = 1;
  m.A.resize(2, 2);
  m.A << 0.0, 1.0, gravity / length, -damping / inertia;
  m.B.resize(2, 1);
  m.B << 0.0, 1.0 / inertia;
  m.Lambda = Mat::Identity(1, 1);
  m.map = NonlinearMap::Canonical(ScalarFunction::kSine);
  m.uncertainty = std::move(uncertainty);
  m.params.family = PhysicalParams::Family::kPendulum;
  m.params.mass = mass;
  m.params.length = length;
  m.params.damping = damping;
  m.params.gravity = gravity;
  m.Validate();
  return m;
}

AgentModel MakeMimo3(UncertaintySpec uncertainty,
                     std::array<double, 3> coefficients, double input_gain) {
  if (!(input_gain > 0.0)) {
    throw Error(ErrorCode::kNonPositiveParameter, "input gain must be positive");
  }
  AgentModel m;
  m.n = 3;
  m.p = 1;
  m.A.resize(3, 3);
  m.A << 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, -coefficients[0], -coefficients[1],
      -coefficients[2];
  m.B.resize(3, 1);
  m.B << 0.0, 0.0, input_gain;
  m.Lambda = Mat::Identity(1, 1);
  m.map = NonlinearMap::Linear();
  m.uncertainty = std::move(uncertainty);
  m.params.family = PhysicalParams::Family::kMimo3;
  m.params.coefficients = coefficients;
  m.params.input_gain = input_gain;
  m.Validate();
  return m;
}

ReferenceModel MakeReference(const AgentModel& nominal, Policy policy) {
  ReferenceModel r;
  r.A_m = nominal.A;
  r.B_m = nominal.B * nominal.Lambda;
  r.map = nominal.map;
  r.policy = std::move(policy);
  r.params = nominal.params;
  r.Validate();
  return r;
}

Mat SolveInputMatching(const Mat& B_lambda, const Mat& rhs,
                       const std::string& what) {
  if (B_lambda.rows() != rhs.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, what + ": row count mismatch");
  }
  const Mat normal = B_lambda.transpose() * B_lambda;
  Eigen::FullPivLU<Mat> lu(normal);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kMatchingInfeasible,
                what + ": input matrix is rank deficient");
  }
  Mat X = lu.solve(B_lambda.transpose() * rhs);
  const double scale = std::max(1.0, rhs.norm());
  const double residual = (B_lambda * X - rhs).norm() / scale;
  if (!(residual <= tolerance::kMatchingResidual)) {
    std::ostringstream os;
    os << what << ": no exact solution (relative residual " << residual << ")";
    throw Error(ErrorCode::kMatchingInfeasible, os.str());
  }
  return X;
}

FeedbackMatch SolveFeedbackMatching(const AgentModel& agent,
                                    const ReferenceModel& ref) {
  if (agent.n != ref.n() || agent.p != ref.p()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "agent and reference dimensions differ");
  }
  const Mat BL = agent.B * agent.Lambda;
  FeedbackMatch out;
  out.K_m = SolveInputMatching(BL, ref.A_m - agent.A, "feedback matching (A_m)")
                .transpose();
  out.K_r = SolveInputMatching(BL, ref.B_m, "feedback matching (B_m)").transpose();
  return out;
}

CouplingMatch SolveCouplingMatching(const AgentModel& agent_i,
                                    const AgentModel& agent_j) {
  if (agent_i.n != agent_j.n || agent_i.p != agent_j.p) {
    throw Error(ErrorCode::kDimensionMismatch, "agent dimensions differ");
  }
  const Mat BL = agent_i.B * agent_i.Lambda;
  CouplingMatch out;
  out.K = SolveInputMatching(BL, agent_j.A - agent_i.A, "coupling matching (A)")
              .transpose();
  out.K_r = SolveInputMatching(BL, agent_j.B * agent_j.Lambda,
                               "coupling matching (B)")
                .transpose();
  return out;
}

Mat SolveUncertaintyMatching(const AgentModel& agent_i,
                             const AgentModel& agent_j) {
  if (agent_i.n != agent_j.n || agent_i.p != agent_j.p) {
    throw Error(ErrorCode::kDimensionMismatch, "agent dimensions differ");
  }
  return SolveInputMatching(agent_i.B * agent_i.Lambda,
                            agent_j.B * agent_j.Lambda, "uncertainty matching");
}

AgentModel BuildAgent(const AgentTemplate& t) {
  AgentModel m;
  switch (t.family) {
    case PhysicalParams::Family::kPendulum:
      m = MakePendulum(t.mass, t.length, t.damping, t.gravity, t.uncertainty);
      break;
    case PhysicalParams::Family::kMimo3:
      m = MakeMimo3(t.uncertainty, t.coefficients, t.input_gain);
      break;
    case PhysicalParams::Family::kCustom:
      throw Error(ErrorCode::kInvalidArgument,
                  "custom agents cannot be built from a template");
  }
  if (!(t.lambda > 0.0)) {
    throw Error(ErrorCode::kNonPositiveParameter, "lambda must be positive");
  }
  m.Lambda = t.lambda * Mat::Identity(m.p, m.p);
  return m;
}

std::vector<AgentTemplate> SampleHeterogeneousTemplates(
    const AgentTemplate& base, double lo, double hi, std::uint64_t seed,
    int count) {
  if (!(lo > 0.0) || !(hi >= lo)) {
    throw Error(ErrorCode::kInvalidArgument, "variation range needs 0 < lo <= hi");
  }
  if (count <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "agent count must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<AgentTemplate> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    AgentTemplate t = base;
    if (base.family == PhysicalParams::Family::kPendulum) {
      t.mass *= dist(rng);
      t.length *= dist(rng);
    } else {
      for (double& c : t.coefficients) c *= dist(rng);
    }
    out.push_back(t);
  }
  return out;
}

void VerifyNetworkMatching(const std::vector<AgentModel>& agents,
                           const CommGraph& graph,
                           const ReferenceModel* reference) {
  if (static_cast<int>(agents.size()) != graph.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "agent count does not match the graph");
  }
  auto rethrow = [](const Error& e, const std::string& where) {
    return Error(e.code(), where + ": " + e.detail());
  };
  for (int i = 0; i < graph.size(); ++i) {
    if (reference != nullptr) {
      try {
        SolveFeedbackMatching(agents[i], *reference);
      } catch (const Error& e) {
        throw rethrow(e, "agent " + std::to_string(i + 1));
      }
    }
    for (AgentId j : graph.InNeighbors(i)) {
      try {
        SolveCouplingMatching(agents[i], agents[j]);
        SolveUncertaintyMatching(agents[i], agents[j]);
      } catch (const Error& e) {
        throw rethrow(e, "edge " + std::to_string(j + 1) + "->" +
                             std::to_string(i + 1));
      }
    }
  }
}

std::vector<AgentModel> SampleHeterogeneousNetwork(
    const AgentTemplate& base, double lo, double hi, std::uint64_t seed,
    int count, const CommGraph* graph, const ReferenceModel* reference) {
  std::vector<AgentModel> agents;
  for (const auto& t : SampleHeterogeneousTemplates(base, lo, hi, seed, count)) {
    agents.push_back(BuildAgent(t));
  }
  if (graph != nullptr) VerifyNetworkMatching(agents, *graph, reference);
  return agents;
}

}  // namespace syncnet
