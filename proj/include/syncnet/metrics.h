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

#ifndef SYNCNET_METRICS_H_
#define SYNCNET_METRICS_H_

#include <optional>
#include <string>
#include <vector>

#include "syncnet/simulation.h"

namespace syncnet {

/// Empirical (r, R, T): start radius, ultimate radius, entry time.
struct UubCertificate {
  double r = 0.0;
  double R = 0.0;
  double T = 0.0;
};

struct MetricsSettings {
  double tail_fraction = 0.25;
  double settle_epsilon = 0.05;
  // A run whose tail error exceeds this radius counts as diverged even if
  // the state guard never tripped.
  std::optional<double> error_radius;
};

/// Tracking quality between two consecutive setpoint changes.
struct SegmentMetrics {
  double start = 0.0;
  double end = 0.0;
  std::optional<double> settle_time;  // relative to start
  double steady_error = 0.0;          // max over the segment's last quarter
};

struct Metrics {
  double horizon = 0.0;
  std::size_t samples = 0;
  double sup_error_tail = 0.0;
  std::vector<double> agent_tail_error;
  double settle_epsilon = 0.0;
  std::optional<double> settle_time;
  std::optional<UubCertificate> uub;
  bool diverged = false;
  std::optional<double> diverged_time;
  std::string diverged_reason;
  double control_effort = 0.0;
  double max_abs_u_sat = 0.0;
  std::optional<double> saturation_onset;
  double V_initial = 0.0;
  double V_final = 0.0;
  // max_k (V_{k+1} - V_k) / (1 + V_k); <= 1e-6 means the monitor held.
  double V_max_relative_increase = 0.0;
  std::vector<SegmentMetrics> segments;
};

/// Network error per sample: max over agents of |x_i - x_m|.
std::vector<double> ErrorSeries(const TrajectoryLog& log);
std::vector<double> SampleTimes(const TrajectoryLog& log);

/// First time after which the series stays within eps; nullopt if never.
std::optional<double> SettleTime(const std::vector<double>& t,
                                 const std::vector<double>& e, double eps);

/// r = e(t_0), R = sup over the tail window, T = first time after which the
/// series stays below R (1 + 1e-9).
UubCertificate ComputeUub(const std::vector<double>& t,
                          const std::vector<double>& e, double tail_fraction);

/// Throws kEmptyLog for a log without samples.
Metrics ComputeMetrics(const TrajectoryLog& log, const MetricsSettings& settings);

/// Largest |u_sat| entry over agents, per sample.
std::vector<double> InputMagnitudeSeries(const TrajectoryLog& log);

/// Largest |u - u_sat| entry over agents, per sample. This is the part of the
/// commanded input the actuators drop.
std::vector<double> SaturationDeficitSeries(const TrajectoryLog& log);

/// Error and saturation deficit series of an anti-windup run next to a run
/// without anti-windup, on a shared time grid.
struct MagnitudeComparison {
  std::vector<double> t;
  std::vector<double> antiwindup_error, antiwindup_deficit;
  std::vector<double> plain_error, plain_deficit;  // shorter if it diverged
  std::optional<double> saturation_onset;          // first clip in either run
  // First time after which the plain deficit stays above the anti-windup one.
  std::optional<double> separation_time;
  bool plain_exceeds_after_onset = false;
  bool plain_diverged = false;
  std::optional<double> plain_diverged_time;
  double antiwindup_max_error = 0.0;
  double antiwindup_max_deficit = 0.0;
  double plain_final_deficit = 0.0;
};

MagnitudeComparison CompareMagnitudes(const TrajectoryLog& antiwindup,
                                      const TrajectoryLog& plain);

}  // namespace syncnet

#endif  // SYNCNET_METRICS_H_
