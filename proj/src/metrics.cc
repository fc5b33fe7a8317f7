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

#include "syncnet/metrics.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace syncnet {
namespace {

void CheckSeries(const std::vector<double>& t, const std::vector<double>& e) {
  if (t.empty()) throw Error(ErrorCode::kEmptyLog, "empty series");
  if (t.size() != e.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "time and error series differ in length");
  }
}

double TailStart(const std::vector<double>& t, double fraction) {
  return t.back() - fraction * (t.back() - t.front());
}

}  // namespace

std::vector<double> ErrorSeries(const TrajectoryLog& log) {
  std::vector<double> e;
  e.reserve(log.samples.size());
  for (const auto& s : log.samples) {
    double m = 0.0;
    for (double v : s.err_norm) m = std::max(m, v);
    e.push_back(m);
  }
  return e;
}

std::vector<double> SampleTimes(const TrajectoryLog& log) {
  std::vector<double> t;
  t.reserve(log.samples.size());
  for (const auto& s : log.samples) t.push_back(s.t);
  return t;
}

std::optional<double> SettleTime(const std::vector<double>& t,
                                 const std::vector<double>& e, double eps) {
  CheckSeries(t, e);
  // Walk back from the end to the last sample outside the ball.
  std::size_t k = e.size();
  while (k > 0 && e[k - 1] <= eps) --k;
  if (k == e.size()) return std::nullopt;
  return t[k];
}

UubCertificate ComputeUub(const std::vector<double>& t,
                          const std::vector<double>& e, double tail_fraction) {
  CheckSeries(t, e);
  UubCertificate c;
  c.r = e.front();
  const double start = TailStart(t, tail_fraction);
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] >= start) c.R = std::max(c.R, e[k]);
  }
  const double radius = c.R * (1.0 + 1e-9);
  std::size_t k = e.size();
  while (k > 0 && e[k - 1] <= radius) --k;
  c.T = k == e.size() ? t.back() : t[k];
  return c;
}

Metrics ComputeMetrics(const TrajectoryLog& log, const MetricsSettings& settings) {
  if (log.samples.empty()) throw Error(ErrorCode::kEmptyLog, "log has no samples");
  if (!(settings.tail_fraction > 0.0) || settings.tail_fraction > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "tail fraction must be in (0, 1]");
  }
  const auto t = SampleTimes(log);
  const auto e = ErrorSeries(log);
  Metrics m;
  m.samples = t.size();
  m.horizon = t.back() - t.front();
  const double tail = TailStart(t, settings.tail_fraction);
  m.agent_tail_error.assign(log.agents, 0.0);
  for (const auto& s : log.samples) {
    if (s.t < tail) continue;
    for (int a = 0; a < log.agents; ++a) {
      m.agent_tail_error[a] = std::max(m.agent_tail_error[a], s.err_norm[a]);
    }
  }
  for (double v : m.agent_tail_error) m.sup_error_tail = std::max(m.sup_error_tail, v);
  m.settle_epsilon = settings.settle_epsilon;
  m.settle_time = SettleTime(t, e, settings.settle_epsilon);

  m.diverged = log.diverged;
  if (log.diverged) {
    m.diverged_time = log.diverged_time;
    m.diverged_reason = log.diverged_reason;
  } else if (settings.error_radius && m.sup_error_tail > *settings.error_radius) {
    m.diverged = true;
    std::ostringstream os;
    os.precision(6);
    os << "tail error " << m.sup_error_tail << " exceeds radius "
       << *settings.error_radius;
    m.diverged_reason = os.str();
  }
  if (!m.diverged) m.uub = ComputeUub(t, e, settings.tail_fraction);

  for (std::size_t k = 0; k < log.samples.size(); ++k) {
    const auto& s = log.samples[k];
    double norm_sum = 0.0;
    for (const auto& u : s.u_sat) {
      norm_sum += u.norm();
      m.max_abs_u_sat = std::max(m.max_abs_u_sat, u.cwiseAbs().maxCoeff());
    }
    if (k > 0) {
      const auto& prev = log.samples[k - 1];
      double prev_sum = 0.0;
      for (const auto& u : prev.u_sat) prev_sum += u.norm();
      m.control_effort += 0.5 * (s.t - prev.t) * (norm_sum + prev_sum);
      m.V_max_relative_increase = std::max(m.V_max_relative_increase,
                                           (s.V - prev.V) / (1.0 + prev.V));
    }
  }
  m.V_initial = log.samples.front().V;
  m.V_final = log.samples.back().V;
  for (const auto& ev : log.events) {
    if (ev.kind == LogEvent::Kind::kSaturationOnset) {
      if (!m.saturation_onset || ev.t < *m.saturation_onset) m.saturation_onset = ev.t;
    }
  }

  // Segments between setpoint changes, measured against the logged target.
  std::vector<double> cuts{t.front()};
  for (const auto& ev : log.events) {
    if (ev.kind == LogEvent::Kind::kSetpointChange && ev.t > t.front() &&
        ev.t < t.back()) {
      cuts.push_back(ev.t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(t.back());
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    SegmentMetrics seg;
    seg.start = cuts[c];
    seg.end = cuts[c + 1];
    std::vector<double> st, se;
    for (const auto& s : log.samples) {
      const bool last = c + 2 == cuts.size();
      if (s.t < seg.start || s.t > seg.end || (!last && s.t == seg.end)) continue;
      double worst = 0.0;
      for (const auto& x : s.x) worst = std::max(worst, (x - s.target).norm());
      st.push_back(s.t - seg.start);
      se.push_back(worst);
    }
    if (st.empty()) continue;
    seg.settle_time = SettleTime(st, se, settings.settle_epsilon);
    const double steady_from = 0.75 * (seg.end - seg.start);
    for (std::size_t k = 0; k < st.size(); ++k) {
      if (st[k] >= steady_from) seg.steady_error = std::max(seg.steady_error, se[k]);
    }
    m.segments.push_back(seg);
  }
  return m;
}

std::vector<double> InputMagnitudeSeries(const TrajectoryLog& log) {
  std::vector<double> out;
  out.reserve(log.samples.size());
  for (const auto& s : log.samples) {
    double m = 0.0;
    for (const auto& u : s.u_sat) m = std::max(m, u.cwiseAbs().maxCoeff());
    out.push_back(m);
  }
  return out;
}

std::vector<double> SaturationDeficitSeries(const TrajectoryLog& log) {
  std::vector<double> out;
  out.reserve(log.samples.size());
  for (const auto& s : log.samples) {
    double m = 0.0;
    for (std::size_t a = 0; a < s.u.size(); ++a) {
      m = std::max(m, (s.u[a] - s.u_sat[a]).cwiseAbs().maxCoeff());
    }
    out.push_back(m);
  }
  return out;
}

MagnitudeComparison CompareMagnitudes(const TrajectoryLog& antiwindup,
                                      const TrajectoryLog& plain) {
  if (antiwindup.samples.empty() || plain.samples.empty()) {
    throw Error(ErrorCode::kEmptyLog, "comparison needs two non-empty logs");
  }
  MagnitudeComparison c;
  c.t = SampleTimes(antiwindup);
  c.antiwindup_error = ErrorSeries(antiwindup);
  c.antiwindup_deficit = SaturationDeficitSeries(antiwindup);
  c.plain_error = ErrorSeries(plain);
  c.plain_deficit = SaturationDeficitSeries(plain);
  for (const auto* log : {&antiwindup, &plain}) {
    for (const auto& ev : log->events) {
      if (ev.kind == LogEvent::Kind::kSaturationOnset &&
          (!c.saturation_onset || ev.t < *c.saturation_onset)) {
        c.saturation_onset = ev.t;
      }
    }
  }
  c.plain_diverged = plain.diverged;
  if (plain.diverged) c.plain_diverged_time = plain.diverged_time;
  for (double e : c.antiwindup_error) c.antiwindup_max_error = std::max(c.antiwindup_max_error, e);
  for (double d : c.antiwindup_deficit) {
    c.antiwindup_max_deficit = std::max(c.antiwindup_max_deficit, d);
  }
  c.plain_final_deficit = c.plain_deficit.back();

  const std::size_t shared = std::min(c.plain_deficit.size(), c.antiwindup_deficit.size());
  std::size_t k = shared;
  while (k > 0 && c.plain_deficit[k - 1] > c.antiwindup_deficit[k - 1]) --k;
  if (k < shared) c.separation_time = c.t[k];
  c.plain_exceeds_after_onset = c.saturation_onset && c.separation_time &&
                                *c.separation_time >= *c.saturation_onset;
  return c;
}

}  // namespace syncnet
