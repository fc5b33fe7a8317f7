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

#include "syncnet/io.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace syncnet {
namespace {

using nlohmann::ordered_json;

void AppendNumber(std::string* out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out->append(buf);
}

// JSON has no inf/nan; such values are written as null.
ordered_json Num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json Opt(const std::optional<double>& v) {
  if (!v) return nullptr;
  return Num(*v);
}

ordered_json Series(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(Num(x));
  return a;
}

const char* EventName(LogEvent::Kind k) {
  switch (k) {
    case LogEvent::Kind::kSetpointChange:
      return "setpoint_change";
    case LogEvent::Kind::kSaturationOnset:
      return "saturation_onset";
    case LogEvent::Kind::kDivergence:
      return "divergence";
  }
  return "unknown";
}

}  // namespace

std::string FormatCsv(const TrajectoryLog& log) {
  if (log.samples.empty()) throw Error(ErrorCode::kEmptyLog, "log has no samples");
  std::string out = "t,agent";
  for (int k = 1; k <= log.n; ++k) out += ",state_" + std::to_string(k);
  for (int k = 1; k <= log.p; ++k) out += ",u_" + std::to_string(k);
  for (int k = 1; k <= log.p; ++k) out += ",usat_" + std::to_string(k);
  out += ",err_norm,V\n";
  auto row = [&](double t, const std::string& id, const Vec& x, const Vec& u,
                 const Vec& us, double err, double V) {
    AppendNumber(&out, t);
    out += ',';
    out += id;
    for (const Vec* v : {&x, &u, &us}) {
      for (Eigen::Index k = 0; k < v->size(); ++k) {
        out += ',';
        AppendNumber(&out, (*v)(k));
      }
    }
    out += ',';
    AppendNumber(&out, err);
    out += ',';
    AppendNumber(&out, V);
    out += '\n';
  };
  for (const auto& s : log.samples) {
    row(s.t, "ref", s.x_m, s.u_m, s.u_m, 0.0, s.V);
    for (int a = 0; a < log.agents; ++a) {
      row(s.t, std::to_string(a + 1), s.x[a], s.u[a], s.u_sat[a], s.err_norm[a],
          s.V_agent[a]);
    }
  }
  return out;
}

std::string MetricsJson(const ScenarioConfig& cfg, const RunResult& result) {
  const Metrics& m = result.metrics;
  ordered_json j;
  j["name"] = cfg.name;
  j["mode"] = std::string(ToString(cfg.mode));
  j["horizon"] = Num(m.horizon);
  j["samples"] = m.samples;
  j["sup_error_tail"] = Num(m.sup_error_tail);
  j["agent_tail_error"] = Series(m.agent_tail_error);
  j["settle_epsilon"] = Num(m.settle_epsilon);
  j["settle_time"] = Opt(m.settle_time);
  if (m.uub) {
    j["uub_certificate"] = {{"r", Num(m.uub->r)}, {"R", Num(m.uub->R)}, {"T", Num(m.uub->T)}};
  } else {
    j["uub_certificate"] = nullptr;
  }
  j["diverged"] = m.diverged;
  j["diverged_time"] = Opt(m.diverged_time);
  j["diverged_reason"] = m.diverged_reason;
  j["control_effort"] = Num(m.control_effort);
  j["max_abs_u_sat"] = Num(m.max_abs_u_sat);
  j["saturation_onset"] = Opt(m.saturation_onset);
  j["V_initial"] = Num(m.V_initial);
  j["V_final"] = Num(m.V_final);
  j["V_max_relative_increase"] = Num(m.V_max_relative_increase);
  j["h_mismatch"] = Num(result.h_mismatch);
  j["decomposition_residual"] = Num(result.decomposition_residual);
  ordered_json segs = ordered_json::array();
  for (const auto& s : m.segments) {
    segs.push_back({{"start", Num(s.start)},
                    {"end", Num(s.end)},
                    {"settle_time", Opt(s.settle_time)},
                    {"steady_error", Num(s.steady_error)}});
  }
  j["segments"] = segs;
  ordered_json events = ordered_json::array();
  for (const auto& e : result.log.events) {
    ordered_json ev;
    ev["t"] = Num(e.t);
    ev["kind"] = EventName(e.kind);
    ev["agent"] = e.agent >= 0 ? ordered_json(e.agent + 1) : ordered_json(nullptr);
    ev["message"] = e.message;
    events.push_back(ev);
  }
  j["events"] = events;
  return j.dump(2) + "\n";
}

std::string ComparisonCsv(const MagnitudeComparison& c) {
  std::string out = "t,dmsac_error,dmsac_deficit,no_antiwindup_error,no_antiwindup_deficit\n";
  for (std::size_t k = 0; k < c.t.size(); ++k) {
    AppendNumber(&out, c.t[k]);
    out += ',';
    AppendNumber(&out, c.antiwindup_error[k]);
    out += ',';
    AppendNumber(&out, c.antiwindup_deficit[k]);
    out += ',';
    if (k < c.plain_error.size()) AppendNumber(&out, c.plain_error[k]);
    out += ',';
    if (k < c.plain_deficit.size()) AppendNumber(&out, c.plain_deficit[k]);
    out += '\n';
  }
  return out;
}

std::string ComparisonJson(const MagnitudeComparison& c) {
  ordered_json j;
  j["saturation_onset"] = Opt(c.saturation_onset);
  j["separation_time"] = Opt(c.separation_time);
  j["no_antiwindup_exceeds_after_onset"] = c.plain_exceeds_after_onset;
  j["no_antiwindup_diverged"] = c.plain_diverged;
  j["no_antiwindup_diverged_time"] = Opt(c.plain_diverged_time);
  j["dmsac_max_error"] = Num(c.antiwindup_max_error);
  j["dmsac_max_deficit"] = Num(c.antiwindup_max_deficit);
  j["no_antiwindup_final_deficit"] = Num(c.plain_final_deficit);
  return j.dump(2) + "\n";
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path);
}

void WriteRunOutputs(const std::string& dir, const ScenarioConfig& cfg,
                     const RunResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  WriteTextFile((base / "trajectory.csv").string(), FormatCsv(result.log));
  WriteTextFile((base / "metrics.json").string(), MetricsJson(cfg, result));
  WriteTextFile((base / "effective_config.json").string(), EmitConfig(cfg));
}

}  // namespace syncnet
