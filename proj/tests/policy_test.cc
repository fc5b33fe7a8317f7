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


#include "syncnet/policy.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

namespace syncnet {
namespace {

Vec V(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

TEST(Surrogate, EquilibriumAndHandValue) {
  const Policy p = Policy::PendulumSurrogate({});
  EXPECT_EQ(p.Eval(V({0, 0}), 0.0)(0), 0.0);
  // 1 * (-4 * pi/2 - 0) - 1 * 9.81 * 1 * sin(pi/2) + 0
  EXPECT_NEAR(p.Eval(V({std::numbers::pi / 2, 0}), 0.0)(0),
              -4.0 * std::numbers::pi / 2 - 9.81, 1e-12);
  EXPECT_NEAR(p.Eval(V({std::numbers::pi / 2, 0}), 0.0)(0), -16.0932, 1e-4);
}

TEST(Surrogate, RejectsNonPositiveGains) {
  SurrogateParams s;
  s.k1 = 0.0;
  EXPECT_THROW(Policy::PendulumSurrogate(s), Error);
}

TEST(Surrogate, ScheduleSwitchesSetpoint) {
  SurrogateParams s;
  s.setpoint = 0.5;
  const Policy p = Policy::PendulumSurrogate(s).WithSchedule(
      {{14.0, V({0.25})}, {7.0, V({-0.25})}});
  EXPECT_EQ(p.schedule().front().time, 7.0);
  EXPECT_DOUBLE_EQ(p.TargetState(0.0)(0), 0.5);
  EXPECT_DOUBLE_EQ(p.TargetState(6.999)(0), 0.5);
  EXPECT_DOUBLE_EQ(p.TargetState(7.0)(0), -0.25);
  EXPECT_DOUBLE_EQ(p.TargetState(20.0)(0), 0.25);
  // At the active setpoint with zero rate only gravity compensation is left.
  EXPECT_NEAR(p.Eval(V({-0.25, 0}), 8.0)(0), -9.81 * std::sin(-0.25), 1e-12);
  EXPECT_THROW(Policy::PendulumSurrogate(s).WithSchedule({{1.0, V({1, 2})}}), Error);
  EXPECT_THROW(Policy::PendulumSurrogate(s).WithSchedule({{-1.0, V({1})}}), Error);
}

TEST(Affine, ConstantOutput) {
  const Policy p = Policy::Affine(Mat::Zero(1, 3), Vec::Zero(3), V({1}));
  EXPECT_EQ(p.Eval(V({4, 5, 6}), 1.0), V({1}));
  EXPECT_EQ(p.Eval(V({-4, 0, 2}), 9.0), V({1}));
}

TEST(Affine, FeedbackArithmetic) {
  Mat K(1, 2);
  K << -2, -3;
  const Policy p = Policy::Affine(K, V({1, 0}), V({0.5}));
  EXPECT_DOUBLE_EQ(p.Eval(V({2, 1}), 0.0)(0), -2.0 * 1 - 3.0 * 1 + 0.5);
  EXPECT_THROW(p.Eval(V({1, 2, 3}), 0.0), Error);
  EXPECT_THROW(Policy::Affine(K, V({1, 0, 0}), V({0})), Error);
}

TEST(Policy, StabilizesLinearization) {
  Mat A(2, 2);
  A << 0, 1, 9.81, 0;
  Mat B(2, 1);
  B << 0, 1;
  EXPECT_TRUE(Policy::PendulumSurrogate({}).StabilizesLinearization(A, B));
  EXPECT_FALSE(Policy::Affine(Mat::Zero(1, 2), Vec::Zero(2), V({0}))
                   .StabilizesLinearization(A, B));
  Mat K(1, 2);
  K << -15, -4;
  EXPECT_TRUE(Policy::Affine(K, Vec::Zero(2), V({0})).StabilizesLinearization(A, B));
}

TEST(PolicyJson, ValidFileRoundTrips) {
  const Policy p = ParsePolicyJson(
      R"({"kind":"affine","K":[[-1.5,-2]],"x_set":[0.3,0],"u_ff":[0.1]})");
  EXPECT_EQ(p.kind(), Policy::Kind::kExternal);
  EXPECT_DOUBLE_EQ(p.Eval(V({0.3, 1.0}), 0.0)(0), -2.0 + 0.1);
}

TEST(PolicyJson, Errors) {
  auto code = [](const std::string& text) {
    try {
      ParsePolicyJson(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code(R"({"kind":"affine","x_set":[0,0],"u_ff":[0]})"), ErrorCode::kParseError);
  EXPECT_EQ(code(R"({"kind":"affine","K":[[1,2,3]],"x_set":[0,0],"u_ff":[0]})"),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(code(R"({"kind":"affine","K":[[1,2],[3]],"x_set":[0,0],"u_ff":[0,0]})"),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(code("{not json"), ErrorCode::kParseError);
  EXPECT_EQ(code(R"({"kind":"ddpg","K":[[1,2]],"x_set":[0,0],"u_ff":[0]})"),
            ErrorCode::kParseError);
  try {
    LoadPolicy("/nonexistent/policy.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

}  // namespace
}  // namespace syncnet
