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

#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "oracles.h"
#include "syncnet/topology.h"

namespace syncnet {
namespace {

constexpr double kPi = std::numbers::pi;

Vec V(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

Policy ZeroPolicy(int n, int p) {
  return Policy::Affine(Mat::Zero(p, n), Vec::Zero(n), Vec::Zero(p));
}

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

TEST(Sigma, CanonicalAndLinear) {
  const NonlinearMap sine = NonlinearMap::Canonical(ScalarFunction::kSine);
  EXPECT_EQ(Sigma(sine, V({0, 5})), V({0, 5}));
  const Vec s = Sigma(sine, V({kPi / 2, -1}));
  EXPECT_DOUBLE_EQ(s(0), 1.0);
  EXPECT_DOUBLE_EQ(s(1), -1.0);
  EXPECT_EQ(Sigma(NonlinearMap::Linear(), V({3, 4, 5})), V({3, 4, 5}));
}

TEST(Uncertainty, Sinusoid) {
  const auto w = UncertaintySpec::Sinusoid(0.1, 1.0);
  EXPECT_DOUBLE_EQ(EvalUncertainty(w, V({3, 4}), 0.0, 1)(0), 0.0);
  EXPECT_NEAR(EvalUncertainty(w, V({3, 4}), kPi / 2, 1)(0), 0.1, 1e-16);
  EXPECT_EQ(EvalUncertainty(UncertaintySpec::None(), V({1, 2}), 3.0, 2), Vec::Zero(2));
  EXPECT_DOUBLE_EQ(w.Bound(), 0.1);
}

TEST(Uncertainty, RandomPiecewiseConstantIsHeldAndBounded) {
  const auto w = UncertaintySpec::RandomPiecewiseConstant(-1.0, 1.0, 0.1, 101);
  const Vec x = V({0, 0});
  std::set<double> distinct;
  for (int k = 0; k < 200; ++k) {
    const double a = EvalUncertainty(w, x, 0.1 * k, 2)(0);
    const double b = EvalUncertainty(w, x, 0.1 * k + 0.05, 2)(0);
    const double c = EvalUncertainty(w, x, 0.1 * k + 0.0999, 2)(0);
    ASSERT_EQ(a, b);
    ASSERT_EQ(a, c);
    ASSERT_GE(a, -1.0);
    ASSERT_LE(a, 1.0);
    distinct.insert(a);
  }
  EXPECT_GT(distinct.size(), 190u);
  // Stateless: same key, same value; a different seed changes it.
  EXPECT_EQ(EvalUncertainty(w, x, 3.33, 1), EvalUncertainty(w, x, 3.33, 1));
  const auto other = UncertaintySpec::RandomPiecewiseConstant(-1.0, 1.0, 0.1, 102);
  EXPECT_NE(EvalUncertainty(w, x, 3.33, 1), EvalUncertainty(other, x, 3.33, 1));
  EXPECT_THROW(UncertaintySpec::RandomPiecewiseConstant(1.0, -1.0, 0.1, 0), Error);
  EXPECT_THROW(UncertaintySpec::RandomPiecewiseConstant(-1.0, 1.0, 0.0, 0), Error);
}

TEST(Uncertainty, IdealWeightsForSinusoid) {
  const auto w = UncertaintySpec::Sinusoid(0.1, 1.0);
  const auto theta = w.IdealWeights(w.DefaultControllerBasis(), 1);
  ASSERT_TRUE(theta.has_value());
  EXPECT_DOUBLE_EQ((*theta)(0, 0), 0.1);
  EXPECT_FALSE(w.IdealWeights({BasisFunction{}}, 1).has_value());
  const auto r = UncertaintySpec::RandomPiecewiseConstant(-1.0, 1.0, 0.1, 1);
  EXPECT_FALSE(r.IdealWeights(r.DefaultControllerBasis(), 1).has_value());
}

TEST(Basis, NamesRoundTrip) {
  for (const std::string name : {"1", "sin(t)", "cos(2t)", "x1", "sin(x2)", "sin(0.5t)"}) {
    EXPECT_EQ(BasisFunction::Parse(name).Name(), name);
  }
  EXPECT_THROW(BasisFunction::Parse("tan(t)"), Error);
  EXPECT_THROW(BasisFunction::Parse("x0"), Error);
  EXPECT_THROW(BasisFunction::Parse("sin(at)"), Error);
  const Vec phi = EvalBasis({BasisFunction::Parse("1"), BasisFunction::Parse("x2"),
                             BasisFunction::Parse("cos(2t)")},
                            V({5, 7}), kPi / 2);
  EXPECT_DOUBLE_EQ(phi(0), 1.0);
  EXPECT_DOUBLE_EQ(phi(1), 7.0);
  EXPECT_NEAR(phi(2), -1.0, 1e-15);
}

TEST(Pendulum, Construction) {
  const AgentModel m = MakePendulum(1, 1, 0, 9.81);
  Mat A(2, 2);
  A << 0, 1, 9.81, 0;
  EXPECT_EQ(m.A, A);
  EXPECT_EQ(m.B, V({0, 1}));
  EXPECT_DOUBLE_EQ(MakePendulum(2, 1, 0, 9.81).B(1, 0), 0.5);
  EXPECT_EQ(CodeOf([] { MakePendulum(1, 0, 0, 9.81); }), ErrorCode::kNonPositiveParameter);
}

TEST(Pendulum, Derivative) {
  const AgentModel m = MakePendulum(1, 1, 0, 9.81);
  EXPECT_EQ(AgentDerivative(m, V({0, 0}), V({0}), 0.0), V({0, 0}));
  const Vec d = AgentDerivative(m, V({kPi / 2, 0}), V({0}), 0.0);
  EXPECT_DOUBLE_EQ(d(0), 0.0);
  EXPECT_DOUBLE_EQ(d(1), 9.81);
  EXPECT_THROW(AgentDerivative(m, V({0}), V({0}), 0.0), Error);
}

TEST(Mimo3, DefaultModel) {
  const AgentModel m = MakeMimo3();
  EXPECT_EQ(AgentDerivative(m, V({1, 0, 0}), V({0}), 0.0), V({0, 0, -1}));
  EXPECT_EQ(AgentDerivative(m, V({0, 0, 0}), V({1}), 0.0), V({0, 0, 1}));
  // s^3 + 3 s^2 + 2 s + 1: Routh-Hurwitz gives 3 * 2 > 1, so stable.
  EXPECT_TRUE(IsHurwitz(m.A));
}

TEST(Mimo3, AdditiveDisturbanceEntersItsRow) {
  UncertaintySpec w = UncertaintySpec::Sinusoid(0.1, 1.0);
  w.additive_state = 1;
  const AgentModel m = MakeMimo3(w);
  const Vec d = AgentDerivative(m, V({0, 0, 0}), V({0}), kPi / 2);
  EXPECT_NEAR(d(1), 0.1, 1e-16);
  EXPECT_DOUBLE_EQ(d(2), 0.0);
}

TEST(Reference, Derivative) {
  ReferenceModel r;
  r.A_m = -Mat::Identity(2, 2);
  r.B_m = V({0, 1});
  r.policy = ZeroPolicy(2, 1);
  EXPECT_EQ(ReferenceDerivative(r, V({1, 1}), V({2})), V({-1, 1}));
  EXPECT_EQ(ReferenceDerivative(r, V({0, 0}), V({0})), V({0, 0}));
  const ReferenceModel pend = MakeReference(MakePendulum(1, 2, 0, 9.81), ZeroPolicy(2, 1));
  EXPECT_DOUBLE_EQ(ReferenceDerivative(pend, V({kPi / 2, 0}), V({0}))(1), 9.81 / 2);
}

TEST(Reference, RejectsNonCompanionInput) {
  ReferenceModel r;
  r.A_m = -Mat::Identity(2, 2);
  r.B_m = V({1, 1});
  r.policy = ZeroPolicy(2, 1);
  EXPECT_EQ(CodeOf([&] { r.Validate(); }), ErrorCode::kNotCompanionForm);
  r.B_m = V({0, 1});
  r.policy = ZeroPolicy(3, 1);
  EXPECT_EQ(CodeOf([&] { r.Validate(); }), ErrorCode::kDimensionMismatch);
}

TEST(FeedbackMatching, IdentityCase) {
  const AgentModel a = MakePendulum(1, 1, 0, 9.81);
  const FeedbackMatch f = SolveFeedbackMatching(a, MakeReference(a, ZeroPolicy(2, 1)));
  EXPECT_LE(f.K_m.cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(f.K_r(0, 0), 1.0, 1e-15);
}

// Build the agent from chosen gains, then recover them.
TEST(FeedbackMatching, ConstructThenRecover) {
  oracle::Gen gen(11);
  const ReferenceModel ref = MakeReference(MakePendulum(1, 1, 0, 9.81), ZeroPolicy(2, 1));
  for (int trial = 0; trial < 100; ++trial) {
    const Mat k_hat = gen.Matrix(1, 2, -5, 5);
    double kr = gen.Uniform(0.5, 2.0) * (gen.Uniform(0, 1) < 0.5 ? -1 : 1);
    const double lambda = gen.Uniform(0.5, 1.5);
    AgentModel a = MakePendulum(1, 1, 0, 9.81);
    a.Lambda = lambda * Mat::Identity(1, 1);
    a.B = ref.B_m / (lambda * kr);
    a.A = ref.A_m - a.B * a.Lambda * k_hat;
    const FeedbackMatch f = SolveFeedbackMatching(a, ref);
    ASSERT_LE((f.K_m.transpose() - k_hat).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_NEAR(f.K_r(0, 0), kr, 1e-9);
    const Mat BL = a.B * a.Lambda;
    ASSERT_LE((a.A + BL * f.K_m.transpose() - ref.A_m).norm(), 1e-8);
    ASSERT_LE((BL * f.K_r.transpose() - ref.B_m).norm(), 1e-8);
  }
}

TEST(FeedbackMatching, UnmatchedPerturbationIsInfeasible) {
  const ReferenceModel ref = MakeReference(MakePendulum(1, 1, 0, 9.81), ZeroPolicy(2, 1));
  AgentModel a = MakePendulum(1.2, 1, 0, 9.81);
  a.A(0, 0) += 0.3;
  EXPECT_EQ(CodeOf([&] { SolveFeedbackMatching(a, ref); }), ErrorCode::kMatchingInfeasible);
}

TEST(CouplingMatching, Cases) {
  const AgentModel a = MakePendulum(1, 1, 0, 9.81);
  const CouplingMatch self = SolveCouplingMatching(a, a);
  EXPECT_LE(self.K.cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(self.K_r(0, 0), 1.0, 1e-15);

  const AgentModel b = MakePendulum(1.25, 1, 0, 9.81);
  const CouplingMatch c = SolveCouplingMatching(a, b);
  EXPECT_LE((a.A + a.B * a.Lambda * c.K.transpose() - b.A).norm(), 1e-8);
  EXPECT_LE((a.B * a.Lambda * c.K_r.transpose() - b.B * b.Lambda).norm(), 1e-8);
  EXPECT_NEAR(c.K_r(0, 0), 1.0 / 1.25, 1e-12);

  EXPECT_EQ(CodeOf([&] { SolveCouplingMatching(a, MakeMimo3()); }),
            ErrorCode::kDimensionMismatch);
}

TEST(UncertaintyMatching, Cases) {
  AgentModel a = MakeMimo3();
  EXPECT_NEAR(SolveUncertaintyMatching(a, a)(0, 0), 1.0, 1e-15);
  AgentModel b = a;
  b.B *= 2.0;
  EXPECT_NEAR(SolveUncertaintyMatching(a, b)(0, 0), 2.0, 1e-15);
  AgentModel c = a;
  c.B(1, 0) = 1.0;  // leaves span(B_i)
  EXPECT_EQ(CodeOf([&] { SolveUncertaintyMatching(a, c); }), ErrorCode::kMatchingInfeasible);
}

TEST(SolveInputMatching, RankDeficient) {
  EXPECT_EQ(CodeOf([] { SolveInputMatching(Mat::Zero(2, 1), Mat::Zero(2, 2), "x"); }),
            ErrorCode::kMatchingInfeasible);
}

TEST(Sampling, DegenerateRangeCopiesBase) {
  AgentTemplate base;
  const auto t = SampleHeterogeneousTemplates(base, 1.0, 1.0, 9, 5);
  ASSERT_EQ(t.size(), 5u);
  for (const auto& x : t) {
    EXPECT_EQ(x.mass, 1.0);
    EXPECT_EQ(x.length, 1.0);
  }
  EXPECT_THROW(SampleHeterogeneousTemplates(base, 0.75, 1.25, 1, 0), Error);
  EXPECT_THROW(SampleHeterogeneousTemplates(base, 1.25, 0.75, 1, 3), Error);
}

TEST(Sampling, HeterogeneousPendulumsMatch) {
  AgentTemplate base;
  const auto graph = CommGraph::Validate(TreeAdjacency(12, 2), 0);
  const ReferenceModel ref = MakeReference(MakePendulum(1, 1, 0, 9.81), ZeroPolicy(2, 1));
  const auto agents = SampleHeterogeneousNetwork(base, 0.75, 1.25, 42, 12, &graph, &ref);
  ASSERT_EQ(agents.size(), 12u);
  std::set<std::pair<double, double>> distinct;
  for (const auto& a : agents) {
    EXPECT_GE(a.params.mass, 0.75);
    EXPECT_LE(a.params.mass, 1.25);
    EXPECT_GE(a.params.length, 0.75);
    EXPECT_LE(a.params.length, 1.25);
    distinct.insert({a.params.mass, a.params.length});
    const FeedbackMatch f = SolveFeedbackMatching(a, ref);
    EXPECT_LE((a.A + a.B * a.Lambda * f.K_m.transpose() - ref.A_m).norm(), 1e-8);
  }
  EXPECT_EQ(distinct.size(), 12u);
  // Same seed, same draw.
  const auto again = SampleHeterogeneousNetwork(base, 0.75, 1.25, 42, 12);
  for (std::size_t k = 0; k < agents.size(); ++k) EXPECT_EQ(agents[k].A, again[k].A);
}

TEST(Sampling, MimoScalesCoefficients) {
  AgentTemplate base;
  base.family = PhysicalParams::Family::kMimo3;
  for (const auto& t : SampleHeterogeneousTemplates(base, 0.75, 1.25, 3, 12)) {
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(t.coefficients[k], 0.75 * base.coefficients[k]);
      EXPECT_LE(t.coefficients[k], 1.25 * base.coefficients[k]);
    }
  }
}

TEST(AgentModel, Validate) {
  AgentModel a = MakePendulum(1, 1, 0, 9.81);
  a.Lambda(0, 0) = -1.0;
  EXPECT_EQ(CodeOf([&] { a.Validate(); }), ErrorCode::kNonPositiveParameter);
  a = MakePendulum(1, 1, 0, 9.81);
  a.B(0, 0) = 1.0;
  EXPECT_EQ(CodeOf([&] { a.Validate(); }), ErrorCode::kNotCompanionForm);
  a = MakePendulum(1, 1, 0, 9.81);
  a.A = Mat::Zero(3, 3);
  EXPECT_EQ(CodeOf([&] { a.Validate(); }), ErrorCode::kDimensionMismatch);
}

}  // namespace
}  // namespace syncnet
