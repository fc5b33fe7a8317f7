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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace syncnet {

Policy Policy::Affine(Mat K, Vec x_set, Vec u_ff) {
  if (K.cols() != x_set.size() || K.rows() != u_ff.size() || K.size() == 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "affine policy: K must be p x n with x_set (n) and u_ff (p)");
  }
  Policy p;
  p.kind_ = Kind::kAffine;
  p.K_ = std::move(K);
  p.x_set_ = std::move(x_set);
  p.u_ff_ = std::move(u_ff);
  return p;
}

Policy Policy::External(Mat K, Vec x_set, Vec u_ff) {
  Policy p = Affine(std::move(K), std::move(x_set), std::move(u_ff));
  p.kind_ = Kind::kExternal;
  return p;
}

Policy Policy::PendulumSurrogate(const SurrogateParams& params) {
  if (!(params.k1 > 0.0) || !(params.k2 > 0.0)) {
    throw Error(ErrorCode::kNonPositiveParameter, "surrogate gains must be positive");
  }
  if (!(params.mass > 0.0) || !(params.length > 0.0)) {
    throw Error(ErrorCode::kNonPositiveParameter,
                "surrogate mass and length must be positive");
  }
  Policy p;
  p.kind_ = Kind::kPendulumSurrogate;
  p.surrogate_ = params;
  // Shape carriers only; Eval does not use them.
  p.K_ = Mat::Zero(1, 2);
  p.x_set_ = Vec::Zero(2);
  p.u_ff_ = Vec::Zero(1);
  return p;
}

Policy Policy::WithSchedule(std::vector<SetpointChange> schedule) const {
  const Eigen::Index want = kind_ == Kind::kPendulumSurrogate ? 1 : x_set_.size();
  for (const auto& c : schedule) {
    if (c.setpoint.size() != want) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "setpoint schedule entry has the wrong length");
    }
    if (!std::isfinite(c.time) || c.time < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "setpoint schedule times must be finite and >= 0");
    }
  }
  std::stable_sort(schedule.begin(), schedule.end(),
                   [](const SetpointChange& a, const SetpointChange& b) {
                     return a.time < b.time;
                   });
  Policy p = *this;
  p.schedule_ = std::move(schedule);
  return p;
}

Vec Policy::ActiveSetpoint(double t) const {
  Vec sp = kind_ == Kind::kPendulumSurrogate
               ? Vec::Constant(1, surrogate_.setpoint)
               : x_set_;
  for (const auto& c : schedule_) {
    if (c.time > t) break;
    sp = c.setpoint;
  }
  return sp;
}

Vec Policy::Eval(const Vec& x, double t) const {
  if (x.size() != state_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "policy_eval: wrong state length");
  }
  if (kind_ == Kind::kPendulumSurrogate) {
    const auto& s = surrogate_;
    const double theta_d = schedule_.empty() ? s.setpoint : ActiveSetpoint(t)(0);
    const double inertia = s.mass * s.length * s.length;
    Vec u(1);
    u(0) = inertia * (-s.k1 * (x(0) - theta_d) - s.k2 * x(1)) -
           s.mass * s.gravity * s.length * std::sin(x(0)) + s.damping * x(1);
    return u;
  }
  if (schedule_.empty()) return K_ * (x - x_set_) + u_ff_;
  return K_ * (x - ActiveSetpoint(t)) + u_ff_;
}

Vec Policy::TargetState(double t) const {
  if (kind_ == Kind::kPendulumSurrogate) {
    Vec target = Vec::Zero(2);
    target(0) = ActiveSetpoint(t)(0);
    return target;
  }
  return ActiveSetpoint(t);
}

bool Policy::StabilizesLinearization(const Mat& A_m, const Mat& B_m) const {
  if (kind_ == Kind::kPendulumSurrogate) {
    Mat closed(2, 2);
    closed << 0.0, 1.0, -surrogate_.k1, -surrogate_.k2;
    return IsHurwitz(closed);
  }
  if (A_m.rows() != K_.cols() || B_m.cols() != K_.rows()) return false;
  return IsHurwitz(Mat(A_m + B_m * K_));
}

namespace {

using nlohmann::json;

Vec VecFromJson(const json& j, const char* field) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kParseError, std::string(field) + " must be an array");
  }
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) {
      throw Error(ErrorCode::kParseError,
                  std::string(field) + " must contain numbers");
    }
    v(k) = j[k].get<double>();
  }
  return v;
}

Mat MatFromJson(const json& j, const char* field) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::kParseError,
                std::string(field) + " must be a non-empty array of rows");
  }
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string(field) + " rows have unequal lengths");
    }
    m.row(r) = VecFromJson(j[r], field).transpose();
  }
  return m;
}

}  // namespace

Policy ParsePolicyJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("policy file: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParseError, "policy file must hold a JSON object");
  }
  for (const char* field : {"kind", "K", "x_set", "u_ff"}) {
    if (!doc.contains(field)) {
      throw Error(ErrorCode::kParseError,
                  std::string("policy file: missing field \"") + field + "\"");
    }
  }
  if (doc["kind"] != "affine") {
    throw Error(ErrorCode::kParseError, "policy file: only kind \"affine\" is supported");
  }
  return Policy::External(MatFromJson(doc["K"], "K"),
                          VecFromJson(doc["x_set"], "x_set"),
                          VecFromJson(doc["u_ff"], "u_ff"));
}

Policy LoadPolicy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open policy file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParsePolicyJson(ss.str());
}

}  // namespace syncnet
