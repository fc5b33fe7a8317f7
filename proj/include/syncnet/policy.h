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

#ifndef SYNCNET_POLICY_H_
#define SYNCNET_POLICY_H_

#include <string>
#include <vector>

#include "syncnet/linalg.h"

namespace syncnet {

/// Setpoint that becomes active at `time` seconds.
struct SetpointChange {
  double time = 0.0;
  Vec setpoint;
};

/// Reference parameters and gains of the feedback-linearizing pendulum law.
struct SurrogateParams {
  double setpoint = 0.0;  // theta_d
  double k1 = 4.0;
  double k2 = 4.0;
  double mass = 1.0;
  double length = 1.0;
  double damping = 0.0;
  double gravity = 9.81;
};

/// The reference-model policy u_m = pi(x_m, t). Immutable once built.
class Policy {
 public:
  enum class Kind { kAffine, kPendulumSurrogate, kExternal };

  Policy() = default;

  /// u = K (x - x_set) + u_ff with K of shape p x n.
  static Policy Affine(Mat K, Vec x_set, Vec u_ff);
  /// Affine law that came from a policy file.
  static Policy External(Mat K, Vec x_set, Vec u_ff);
  static Policy PendulumSurrogate(const SurrogateParams& params);

  Kind kind() const { return kind_; }
  int state_dim() const { return static_cast<int>(K_.cols()); }
  int input_dim() const { return static_cast<int>(K_.rows()); }
  const Mat& K() const { return K_; }
  const Vec& x_set() const { return x_set_; }
  const Vec& u_ff() const { return u_ff_; }
  const SurrogateParams& surrogate() const { return surrogate_; }

  /// Setpoint changes, sorted by time. For the surrogate each entry holds
  /// [theta_d]; for affine policies each entry replaces x_set.
  const std::vector<SetpointChange>& schedule() const { return schedule_; }
  Policy WithSchedule(std::vector<SetpointChange> schedule) const;

  Vec Eval(const Vec& x, double t) const;

  /// Full-state target active at time t.
  Vec TargetState(double t) const;

  /// True when the reference closed loop is certified stable: the surrogate
  /// with positive gains, or A_m + B_m K Hurwitz for affine policies.
  bool StabilizesLinearization(const Mat& A_m, const Mat& B_m) const;

 private:
  Vec ActiveSetpoint(double t) const;

  Kind kind_ = Kind::kAffine;
  Mat K_;
  Vec x_set_;
  Vec u_ff_;
  SurrogateParams surrogate_;
  std::vector<SetpointChange> schedule_;
};

/// {"kind":"affine","K":[[...]],"x_set":[...],"u_ff":[...]}
Policy ParsePolicyJson(const std::string& text);
Policy LoadPolicy(const std::string& path);

}  // namespace syncnet

#endif  // SYNCNET_POLICY_H_
