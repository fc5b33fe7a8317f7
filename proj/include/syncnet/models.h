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

#ifndef SYNCNET_MODELS_H_
#define SYNCNET_MODELS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "syncnet/linalg.h"
#include "syncnet/policy.h"
#include "syncnet/topology.h"

namespace syncnet {

enum class ScalarFunction { kIdentity, kSine };

/// sigma(x) = x (linear) or [psi(x_1), x_2, ..., x_n] (canonical).
struct NonlinearMap {
  enum class Kind { kLinear, kCanonical };
  Kind kind = Kind::kLinear;
  ScalarFunction psi = ScalarFunction::kIdentity;

  static NonlinearMap Linear() { return {}; }
  static NonlinearMap Canonical(ScalarFunction f) {
    return {Kind::kCanonical, f};
  }
  bool operator==(const NonlinearMap&) const = default;
};

template <typename Derived>
VectorX<typename Derived::Scalar> Sigma(const NonlinearMap& map,
                                        const Eigen::MatrixBase<Derived>& x) {
  VectorX<typename Derived::Scalar> s = x;
  if (map.kind == NonlinearMap::Kind::kCanonical &&
      map.psi == ScalarFunction::kSine && s.size() > 0) {
    s(0) = std::sin(s(0));
  }
  return s;
}

/// One scalar entry of a basis phi(x, t).
struct BasisFunction {
  enum class Kind { kOne, kSinT, kCosT, kState, kSinState };
  Kind kind = Kind::kOne;
  int index = 0;       // state index for kState / kSinState
  double omega = 1.0;  // angular frequency for kSinT / kCosT

  double Eval(const Vec& x, double t) const;
  /// "1", "sin(t)", "cos(2t)", "x1", "sin(x1)" (1-based state index).
  std::string Name() const;
  static BasisFunction Parse(const std::string& name);
  bool operator==(const BasisFunction&) const = default;
};

using Basis = std::vector<BasisFunction>;

Vec EvalBasis(const Basis& basis, const Vec& x, double t);

/// Bounded input disturbance w(x, t).
struct UncertaintySpec {
  enum class Kind { kNone, kBasisWeighted, kSinusoid, kRandomPiecewiseConstant };
  Kind kind = Kind::kNone;

  Mat theta_star;  // l x p, kBasisWeighted
  Basis basis;     // kBasisWeighted

  double amplitude = 0.0;  // kSinusoid
  double omega = 1.0;

  double low = -1.0;  // kRandomPiecewiseConstant
  double high = 1.0;
  double hold = 0.1;
  std::uint64_t seed = 0;

  // When >= 0 the disturbance is added directly to this state row instead of
  // entering through B * Lambda (not input-matched).
  int additive_state = -1;

  static UncertaintySpec None() { return {}; }
  static UncertaintySpec Sinusoid(double amplitude, double omega);
  static UncertaintySpec BasisWeighted(Mat theta_star, Basis basis);
  static UncertaintySpec RandomPiecewiseConstant(double low, double high,
                                                 double hold,
                                                 std::uint64_t seed);

  /// Upper bound on |w_k| for every channel.
  double Bound() const;

  /// Basis a controller should use to reject this disturbance by default.
  Basis DefaultControllerBasis() const;

  /// Weights Theta (l x p) with w = Theta^T phi for the given basis, if the
  /// basis can represent the disturbance exactly.
  std::optional<Mat> IdealWeights(const Basis& controller_basis, int p) const;
};

/// w(x, t), length p.
Vec EvalUncertainty(const UncertaintySpec& spec, const Vec& x, double t, int p);

/// Parameters an agent was built from; carried for reporting only.
struct PhysicalParams {
  enum class Family { kPendulum, kMimo3, kCustom };
  Family family = Family::kCustom;
  double mass = 1.0;
  double length = 1.0;
  double damping = 0.0;
  double gravity = 9.81;
  std::array<double, 3> coefficients{1.0, 2.0, 3.0};
  double input_gain = 1.0;
};

/// x' = A sigma(x) + B Lambda (u + w(x, t)).
struct AgentModel {
  int n = 0;
  int p = 0;
  Mat A;
  Mat B;
  Mat Lambda;
  NonlinearMap map;
  UncertaintySpec uncertainty;
  PhysicalParams params;

  /// Throws kDimensionMismatch, kNonPositiveParameter (Lambda) or
  /// kNotCompanionForm.
  void Validate() const;
};

Vec AgentDerivative(const AgentModel& m, const Vec& x, const Vec& u, double t);

/// x_m' = A_m sigma_m(x_m) + B_m u_m, with u_m produced by `policy`.
struct ReferenceModel {
  Mat A_m;
  Mat B_m;
  NonlinearMap map;
  Policy policy;
  PhysicalParams params;

  int n() const { return static_cast<int>(A_m.rows()); }
  int p() const { return static_cast<int>(B_m.cols()); }
  void Validate() const;
};

Vec ReferenceDerivative(const ReferenceModel& r, const Vec& x_m, const Vec& u_m);

/// True when only the last p rows of B are nonzero.
bool IsCompanionInput(const Mat& B);

AgentModel MakePendulum(double mass, double length, double damping,
                        double gravity,
                        UncertaintySpec uncertainty = UncertaintySpec::None());

/// Third-order companion system with last row [-c1, -c2, -c3] and input gain
/// b; the defaults reproduce x3' = -x1 - 2 x2 - 3 x3 + u.
AgentModel MakeMimo3(UncertaintySpec uncertainty = UncertaintySpec::None(),
                     std::array<double, 3> coefficients = {1.0, 2.0, 3.0},
                     double input_gain = 1.0);

ReferenceModel MakeReference(const AgentModel& nominal, Policy policy);

// --- Matching conditions -------------------------------------------------
//
// Gains are stored in the shape their adaptive laws produce (n x p, p x p)
// and applied transposed, so each solver returns X with B Lambda X^T = rhs.

struct FeedbackMatch {
  Mat K_m;  // n x p:  B Lambda K_m^T = A_m - A
  Mat K_r;  // p x p:  B Lambda K_r^T = B_m
};

struct CouplingMatch {
  Mat K;    // n x p:  B_i Lambda_i K^T = A_j - A_i
  Mat K_r;  // p x p:  B_i Lambda_i K_r^T = B_j
};

/// Least-squares X (p x k) with (B Lambda) X = rhs; throws
/// kMatchingInfeasible when the relative residual exceeds 1e-8.
Mat SolveInputMatching(const Mat& B_lambda, const Mat& rhs,
                       const std::string& what);

FeedbackMatch SolveFeedbackMatching(const AgentModel& agent,
                                    const ReferenceModel& ref);
CouplingMatch SolveCouplingMatching(const AgentModel& agent_i,
                                    const AgentModel& agent_j);
/// Theta (p x p) with B_j Lambda_j = B_i Lambda_i Theta.
Mat SolveUncertaintyMatching(const AgentModel& agent_i,
                             const AgentModel& agent_j);

// --- Heterogeneous networks ---------------------------------------------

/// Recipe for an agent; physical parameters are scaled by the sampler.
struct AgentTemplate {
  PhysicalParams::Family family = PhysicalParams::Family::kPendulum;
  double mass = 1.0;
  double length = 1.0;
  double damping = 0.0;
  double gravity = 9.81;
  std::array<double, 3> coefficients{1.0, 2.0, 3.0};
  double input_gain = 1.0;
  double lambda = 1.0;  // Lambda = lambda * I
  UncertaintySpec uncertainty;
};

AgentModel BuildAgent(const AgentTemplate& t);

/// Draws per-agent scale factors uniformly from [lo, hi]: mass and length for
/// pendulums, the three actuated-row coefficients for MIMO3 agents.
std::vector<AgentTemplate> SampleHeterogeneousTemplates(
    const AgentTemplate& base, double lo, double hi, std::uint64_t seed,
    int count);

/// Samples `count` agents and, when a graph (and reference) are supplied,
/// checks every matching condition the controllers rely on.
std::vector<AgentModel> SampleHeterogeneousNetwork(
    const AgentTemplate& base, double lo, double hi, std::uint64_t seed,
    int count, const CommGraph* graph = nullptr,
    const ReferenceModel* reference = nullptr);

/// Checks feedback matching for every agent and coupling / uncertainty
/// matching for every edge. Throws kMatchingInfeasible naming the culprit.
void VerifyNetworkMatching(const std::vector<AgentModel>& agents,
                           const CommGraph& graph,
                           const ReferenceModel* reference);

}  // namespace syncnet

#endif  // SYNCNET_MODELS_H_
