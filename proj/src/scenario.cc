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

#include "syncnet/scenario.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "syncnet/policy.h"

namespace syncnet {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Error Invalid(const std::string& field, const std::string& why) {
  return Error(ErrorCode::kValidationError, field + ": " + why);
}

// Typed, path-aware view of a JSON object that rejects unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw Error(ErrorCode::kParseError, Where() + " must be an object");
    }
  }

  bool Has(const std::string& key) const { return j_.contains(key); }

  const json& Raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  Reader Child(const std::string& key) { return Reader(Raw(key), Field(key)); }

  double Double(const std::string& key, double fallback) {
    if (!Has(key)) return fallback;
    return ToDouble(Raw(key), Field(key));
  }
  int Int(const std::string& key, int fallback) {
    if (!Has(key)) return fallback;
    const json& v = Raw(key);
    if (!v.is_number_integer()) throw Type(key, "an integer");
    return v.get<int>();
  }
  std::uint64_t Seed(const std::string& key, std::uint64_t fallback) {
    if (!Has(key)) return fallback;
    const json& v = Raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw Type(key, "a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  bool Bool(const std::string& key, bool fallback) {
    if (!Has(key)) return fallback;
    const json& v = Raw(key);
    if (!v.is_boolean()) throw Type(key, "a boolean");
    return v.get<bool>();
  }
  std::string String(const std::string& key, const std::string& fallback) {
    if (!Has(key)) return fallback;
    const json& v = Raw(key);
    if (!v.is_string()) throw Type(key, "a string");
    return v.get<std::string>();
  }
  Vec Vector(const std::string& key) { return ToVec(Raw(key), Field(key)); }
  Mat Matrix(const std::string& key) { return ToMat(Raw(key), Field(key)); }
  std::vector<std::string> Strings(const std::string& key) {
    const json& v = Raw(key);
    if (!v.is_array()) throw Type(key, "an array of strings");
    std::vector<std::string> out;
    for (const auto& s : v) {
      if (!s.is_string()) throw Type(key, "an array of strings");
      out.push_back(s.get<std::string>());
    }
    return out;
  }

  std::string Field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  std::string Where() const { return path_.empty() ? "config" : path_; }

  /// Rejects keys nobody asked for.
  void Finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) {
        throw Invalid(Field(item.key()), "unknown field");
      }
    }
  }

  static double ToDouble(const json& v, const std::string& field) {
    if (!v.is_number()) {
      throw Error(ErrorCode::kParseError, field + " must be a number");
    }
    return v.get<double>();
  }
  static Vec ToVec(const json& v, const std::string& field) {
    if (v.is_number()) return Vec::Constant(1, v.get<double>());
    if (!v.is_array()) {
      throw Error(ErrorCode::kParseError, field + " must be an array of numbers");
    }
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) out(k) = ToDouble(v[k], field);
    return out;
  }
  static Mat ToMat(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty() || !v[0].is_array()) {
      throw Error(ErrorCode::kParseError, field + " must be an array of rows");
    }
    const std::size_t cols = v[0].size();
    Mat out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < v.size(); ++r) {
      Vec row = ToVec(v[r], field);
      if (!v[r].is_array() || static_cast<std::size_t>(row.size()) != cols) {
        throw Invalid(field, "rows have unequal lengths");
      }
      out.row(r) = row.transpose();
    }
    return out;
  }

 private:
  Error Type(const std::string& key, const char* what) const {
    return Error(ErrorCode::kParseError, Field(key) + " must be " + what);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

ordered_json VecJson(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

ordered_json MatJson(const Mat& m) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(VecJson(m.row(r).transpose()));
  return a;
}

// --- parsing pieces -------------------------------------------------------

ModelParams ParseModel(Reader& r) {
  ModelParams m;
  m.model = r.String("model", m.model);
  if (m.model != "pendulum" && m.model != "mimo3") {
    throw Invalid(r.Field("model"), "must be \"pendulum\" or \"mimo3\"");
  }
  m.mass = r.Double("mass", m.mass);
  m.length = r.Double("length", m.length);
  m.damping = r.Double("damping", m.damping);
  m.gravity = r.Double("gravity", m.gravity);
  if (r.Has("coefficients")) {
    Vec c = r.Vector("coefficients");
    if (c.size() != 3) throw Invalid(r.Field("coefficients"), "needs 3 entries");
    m.coefficients = {c(0), c(1), c(2)};
  }
  m.input_gain = r.Double("input_gain", m.input_gain);
  m.lambda = r.Double("lambda", m.lambda);
  if (!(m.mass > 0.0) || !(m.length > 0.0) || !(m.gravity >= 0.0) ||
      !(m.damping >= 0.0) || !(m.input_gain > 0.0)) {
    throw Invalid(r.Where(), "physical parameters must be positive");
  }
  if (!(m.lambda > 0.0) || m.lambda > 2.0) {
    throw Invalid(r.Field("lambda"), "must lie in (0, 2]");
  }
  return m;
}

ordered_json ModelJson(const ModelParams& m) {
  ordered_json j;
  j["model"] = m.model;
  j["mass"] = m.mass;
  j["length"] = m.length;
  j["damping"] = m.damping;
  j["gravity"] = m.gravity;
  j["coefficients"] = {m.coefficients[0], m.coefficients[1], m.coefficients[2]};
  j["input_gain"] = m.input_gain;
  j["lambda"] = m.lambda;
  return j;
}

UncertaintyConfig ParseUncertainty(Reader r) {
  UncertaintyConfig u;
  u.kind = r.String("kind", u.kind);
  if (u.kind == "sinusoid") {
    u.amplitude = r.Double("amplitude", u.amplitude);
    u.omega = r.Double("omega", u.omega);
  } else if (u.kind == "random") {
    u.low = r.Double("low", u.low);
    u.high = r.Double("high", u.high);
    u.hold = r.Double("hold", u.hold);
    u.seed = r.Seed("seed", u.seed);
    if (!(u.low <= u.high)) throw Invalid(r.Where(), "needs low <= high");
    if (!(u.hold > 0.0)) throw Invalid(r.Field("hold"), "must be positive");
  } else if (u.kind == "basis") {
    u.theta_star = r.Matrix("theta_star");
    u.basis = r.Strings("basis");
    if (u.theta_star.rows() != static_cast<Eigen::Index>(u.basis.size())) {
      throw Invalid(r.Field("theta_star"), "needs one row per basis function");
    }
  } else if (u.kind != "none") {
    throw Invalid(r.Field("kind"), "unknown uncertainty kind '" + u.kind + "'");
  }
  u.additive_state = r.Int("additive_state", 0);
  if (u.additive_state < 0) throw Invalid(r.Field("additive_state"), "must be >= 0");
  r.Finish();
  return u;
}

ordered_json UncertaintyJson(const UncertaintyConfig& u) {
  ordered_json j;
  j["kind"] = u.kind;
  if (u.kind == "sinusoid") {
    j["amplitude"] = u.amplitude;
    j["omega"] = u.omega;
  } else if (u.kind == "random") {
    j["low"] = u.low;
    j["high"] = u.high;
    j["hold"] = u.hold;
    j["seed"] = u.seed;
  } else if (u.kind == "basis") {
    j["theta_star"] = MatJson(u.theta_star);
    j["basis"] = u.basis;
  }
  j["additive_state"] = u.additive_state;
  return j;
}

PolicyConfig ParsePolicy(Reader r) {
  PolicyConfig p;
  p.kind = r.String("kind", p.kind);
  if (p.kind == "surrogate") {
    p.setpoint = r.Double("setpoint", p.setpoint);
    p.k1 = r.Double("k1", p.k1);
    p.k2 = r.Double("k2", p.k2);
    if (!(p.k1 > 0.0) || !(p.k2 > 0.0)) {
      throw Invalid(r.Where(), "surrogate gains must be positive");
    }
  } else if (p.kind == "affine") {
    p.K = r.Matrix("K");
    p.x_set = r.Vector("x_set");
    p.u_ff = r.Vector("u_ff");
    if (p.K.cols() != p.x_set.size() || p.K.rows() != p.u_ff.size()) {
      throw Invalid(r.Where(), "K must be p x n with x_set (n) and u_ff (p)");
    }
  } else if (p.kind == "external") {
    p.path = r.String("path", "");
    if (p.path.empty()) throw Invalid(r.Field("path"), "is required");
  } else {
    throw Invalid(r.Field("kind"), "unknown policy kind '" + p.kind + "'");
  }
  r.Finish();
  return p;
}

void ParseInitial(Reader r, InitialConfig* ic) {
  if (r.Has("x_m0")) ic->x_m0 = r.Vector("x_m0");
  if (r.Has("random")) {
    Reader rr = r.Child("random");
    ic->kind = "random";
    ic->low = rr.Vector("low");
    ic->high = rr.Vector("high");
    ic->seed = rr.Seed("seed", 0);
    rr.Finish();
    if (ic->low.size() != ic->high.size() || ic->low.size() == 0) {
      throw Invalid(r.Field("random"), "low and high must have equal length");
    }
    if (!(ic->low.array() <= ic->high.array()).all()) {
      throw Invalid(r.Field("random"), "needs low <= high");
    }
    if (r.Has("x0")) throw Invalid(r.Field("x0"), "cannot be combined with random");
  } else if (r.Has("x0")) {
    const json& rows = r.Raw("x0");
    if (!rows.is_array() || rows.empty()) {
      throw Invalid(r.Field("x0"), "must be a non-empty array of states");
    }
    for (const auto& row : rows) ic->x0.push_back(Reader::ToVec(row, r.Field("x0")));
  }
  r.Finish();
}

}  // namespace

ScenarioConfig ParseConfig(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    std::size_t line = 1;
    for (std::size_t k = 0; k < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') ++line;
    }
    throw Error(ErrorCode::kParseError,
                "line " + std::to_string(line) + ": " + e.what());
  }
  ScenarioConfig cfg;
  Reader root(doc, "");
  cfg.name = root.String("name", cfg.name);

  if (root.Has("graph")) {
    Reader g = root.Child("graph");
    cfg.graph.leader = g.Int("leader", cfg.graph.leader);
    if (g.Has("adjacency")) {
      cfg.graph.preset = "explicit";
      const json& rows = g.Raw("adjacency");
      if (!rows.is_array()) throw Invalid(g.Field("adjacency"), "must be a matrix");
      for (const auto& row : rows) {
        if (!row.is_array()) throw Invalid(g.Field("adjacency"), "must be a matrix");
        std::vector<int> r;
        for (const auto& v : row) {
          if (!v.is_number_integer()) {
            throw Error(ErrorCode::kParseError,
                        g.Field("adjacency") + " entries must be integers");
          }
          r.push_back(v.get<int>());
        }
        cfg.graph.adjacency.push_back(std::move(r));
      }
      if (g.Has("preset") && g.String("preset", "") != "explicit") {
        throw Invalid(g.Field("preset"), "conflicts with an explicit adjacency");
      }
    } else {
      cfg.graph.preset = g.String("preset", cfg.graph.preset);
      if (cfg.graph.preset != "tree" && cfg.graph.preset != "chain") {
        throw Invalid(g.Field("preset"), "must be \"tree\" or \"chain\"");
      }
      cfg.graph.fanout = g.Int("fanout", cfg.graph.fanout);
      if (cfg.graph.fanout < 1) throw Invalid(g.Field("fanout"), "must be >= 1");
    }
    g.Finish();
  }
  if (cfg.graph.leader < 1) throw Invalid("graph.leader", "must be >= 1 (1-based)");

  if (root.Has("reference")) {
    Reader r = root.Child("reference");
    if (r.Has("model")) {
      Reader m = r.Child("model");
      cfg.reference = ParseModel(m);
      m.Finish();
    }
    if (r.Has("policy")) cfg.policy = ParsePolicy(r.Child("policy"));
    if (r.Has("setpoint_schedule")) {
      const json& rows = r.Raw("setpoint_schedule");
      if (!rows.is_array()) {
        throw Invalid(r.Field("setpoint_schedule"), "must be an array");
      }
      for (const auto& row : rows) {
        Reader e(row, r.Field("setpoint_schedule[]"));
        SetpointChange c;
        c.time = e.Double("t", 0.0);
        c.setpoint = e.Vector("setpoint");
        e.Finish();
        if (!(c.time >= 0.0)) {
          throw Invalid(r.Field("setpoint_schedule"), "times must be >= 0");
        }
        cfg.policy.schedule.push_back(std::move(c));
      }
    }
    r.Finish();
  }

  if (root.Has("uncertainty")) cfg.uncertainty = ParseUncertainty(root.Child("uncertainty"));

  if (root.Has("agents")) {
    Reader a = root.Child("agents");
    if (a.Has("generator") == a.Has("list")) {
      throw Invalid("agents", "needs exactly one of generator or list");
    }
    if (a.Has("generator")) {
      Reader g = a.Child("generator");
      cfg.agents.generated = true;
      if (g.Has("base")) {
        Reader b = g.Child("base");
        cfg.agents.base = ParseModel(b);
        b.Finish();
      }
      if (g.Has("range")) {
        Vec range = g.Vector("range");
        if (range.size() != 2) throw Invalid(g.Field("range"), "needs [low, high]");
        cfg.agents.low = range(0);
        cfg.agents.high = range(1);
      }
      cfg.agents.seed = g.Seed("seed", cfg.agents.seed);
      cfg.agents.count = g.Int("count", cfg.agents.count);
      g.Finish();
      if (!(cfg.agents.low > 0.0) || !(cfg.agents.low <= cfg.agents.high)) {
        throw Invalid("agents.generator.range", "needs 0 < low <= high");
      }
      if (cfg.agents.count < 1) {
        throw Invalid("agents.generator.count", "must be >= 1");
      }
    } else {
      cfg.agents.generated = false;
      const json& rows = a.Raw("list");
      if (!rows.is_array() || rows.empty()) {
        throw Invalid("agents.list", "must be a non-empty array");
      }
      for (const auto& row : rows) {
        Reader e(row, "agents.list[]");
        AgentEntry entry;
        if (e.Has("uncertainty")) entry.uncertainty = ParseUncertainty(e.Child("uncertainty"));
        entry.params = ParseModel(e);
        e.Finish();
        cfg.agents.list.push_back(std::move(entry));
      }
      cfg.agents.count = static_cast<int>(cfg.agents.list.size());
    }
    a.Finish();
  }

  if (root.Has("basis")) {
    cfg.basis = root.Strings("basis");
    for (const auto& b : cfg.basis) {
      try {
        BasisFunction::Parse(b);
      } catch (const Error& e) {
        throw Invalid("basis", e.detail());
      }
    }
  }

  if (root.Has("mode")) {
    std::string mode = root.String("mode", "");
    try {
      cfg.mode = ParseControllerMode(mode);
    } catch (const Error&) {
      throw Invalid("mode", "unknown controller mode '" + mode + "'");
    }
  }

  if (root.Has("gains")) {
    Reader g = root.Child("gains");
    cfg.gains.gamma_k = g.Double("gamma_k", cfg.gains.gamma_k);
    cfg.gains.gamma_theta = g.Double("gamma_theta", cfg.gains.gamma_theta);
    cfg.gains.gamma_p = g.Double("gamma_p", cfg.gains.gamma_p);
    auto opt = [&](const char* key, std::optional<Mat>* out) {
      if (g.Has(key)) *out = g.Matrix(key);
    };
    opt("Gamma_m", &cfg.gains.Gamma_m);
    opt("Gamma_r", &cfg.gains.Gamma_r);
    opt("Gamma_theta", &cfg.gains.Gamma_theta);
    opt("Gamma_ij", &cfg.gains.Gamma_ij);
    opt("Gamma_phi", &cfg.gains.Gamma_phi);
    opt("Gamma_p", &cfg.gains.Gamma_p);
    g.Finish();
    if (!(cfg.gains.gamma_k > 0.0) || !(cfg.gains.gamma_theta > 0.0) ||
        !(cfg.gains.gamma_p > 0.0)) {
      throw Invalid("gains", "adaptation rates must be positive");
    }
  }

  if (root.Has("Q")) cfg.Q = root.Matrix("Q");
  if (root.Has("upsilon")) {
    Reader u = root.Child("upsilon");
    cfg.lambda0 = u.Double("lambda0", cfg.lambda0);
    if (u.Has("matrix")) cfg.upsilon = u.Matrix("matrix");
    u.Finish();
    if (!(cfg.lambda0 > 0.0)) throw Invalid("upsilon.lambda0", "must be positive");
  }

  if (root.Has("saturation")) {
    Reader s = root.Child("saturation");
    cfg.u_max = s.Vector("u_max");
    s.Finish();
    for (Eigen::Index k = 0; k < cfg.u_max->size(); ++k) {
      if (!((*cfg.u_max)(k) > 0.0)) {
        throw Invalid("saturation.u_max", "entries must be positive");
      }
    }
    if (!AllowsSaturation(cfg.mode)) {
      throw Invalid("saturation",
                    "requires mode dmsac_rl or adaptive_no_antiwindup");
    }
  } else if (cfg.mode == ControllerMode::kAdaptiveNoAntiwindup) {
    throw Invalid("saturation", "is required by mode adaptive_no_antiwindup");
  }

  if (root.Has("integration")) {
    Reader i = root.Child("integration");
    cfg.integration.dt = i.Double("dt", cfg.integration.dt);
    cfg.integration.t_final = i.Double("t_final", cfg.integration.t_final);
    cfg.integration.record_every = i.Int("record_every", cfg.integration.record_every);
    i.Finish();
  }
  try {
    cfg.integration.Steps();
  } catch (const Error& e) {
    throw Invalid("integration", e.detail());
  }

  if (root.Has("initial_conditions")) {
    ParseInitial(root.Child("initial_conditions"), &cfg.initial);
  }
  cfg.warm_start = root.Bool("warm_start", cfg.warm_start);

  if (root.Has("divergence")) {
    Reader d = root.Child("divergence");
    cfg.state_bound = d.Double("state_bound", cfg.state_bound);
    if (d.Has("error_radius")) cfg.error_radius = d.Double("error_radius", 0.0);
    d.Finish();
    if (!(cfg.state_bound > 0.0)) throw Invalid("divergence.state_bound", "must be positive");
    if (cfg.error_radius && !(*cfg.error_radius > 0.0)) {
      throw Invalid("divergence.error_radius", "must be positive");
    }
  }
  if (root.Has("metrics")) {
    Reader m = root.Child("metrics");
    cfg.tail_fraction = m.Double("tail_fraction", cfg.tail_fraction);
    cfg.settle_epsilon = m.Double("settle_epsilon", cfg.settle_epsilon);
    m.Finish();
    if (!(cfg.tail_fraction > 0.0) || cfg.tail_fraction > 1.0) {
      throw Invalid("metrics.tail_fraction", "must lie in (0, 1]");
    }
    if (!(cfg.settle_epsilon > 0.0)) {
      throw Invalid("metrics.settle_epsilon", "must be positive");
    }
  }
  if (root.Has("decomposition")) {
    Reader d = root.Child("decomposition");
    cfg.decomposition_trials = d.Int("trials", cfg.decomposition_trials);
    cfg.decomposition_seed = d.Seed("seed", cfg.decomposition_seed);
    d.Finish();
    if (cfg.decomposition_trials < 0) {
      throw Invalid("decomposition.trials", "must be >= 0");
    }
  }
  root.Finish();

  const int N = cfg.agents.count;
  if (!cfg.initial.x0.empty() && cfg.initial.x0.size() != 1 &&
      static_cast<int>(cfg.initial.x0.size()) != N) {
    throw Invalid("initial_conditions.x0", "needs one shared state or one per agent");
  }
  if (cfg.graph.preset == "explicit" &&
      static_cast<int>(cfg.graph.adjacency.size()) != N) {
    throw Invalid("graph.adjacency", "size must equal the agent count");
  }
  if (cfg.graph.leader > N) throw Invalid("graph.leader", "exceeds the agent count");
  return cfg;
}

ScenarioConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ScenarioConfig cfg = ParseConfig(ss.str());
  cfg.base_dir = std::filesystem::path(path).parent_path().string();
  return cfg;
}

std::string EmitConfig(const ScenarioConfig& cfg) {
  ordered_json j;
  j["name"] = cfg.name;
  ordered_json g;
  if (cfg.graph.preset == "explicit") {
    g["preset"] = "explicit";
    g["adjacency"] = cfg.graph.adjacency;
  } else {
    g["preset"] = cfg.graph.preset;
    g["fanout"] = cfg.graph.fanout;
  }
  g["leader"] = cfg.graph.leader;
  j["graph"] = g;

  ordered_json pol;
  const PolicyConfig& p = cfg.policy;
  pol["kind"] = p.kind;
  if (p.kind == "surrogate") {
    pol["setpoint"] = p.setpoint;
    pol["k1"] = p.k1;
    pol["k2"] = p.k2;
  } else if (p.kind == "affine") {
    pol["K"] = MatJson(p.K);
    pol["x_set"] = VecJson(p.x_set);
    pol["u_ff"] = VecJson(p.u_ff);
  } else {
    pol["path"] = p.path;
  }
  ordered_json sched = ordered_json::array();
  for (const auto& c : p.schedule) {
    ordered_json e;
    e["t"] = c.time;
    e["setpoint"] = VecJson(c.setpoint);
    sched.push_back(e);
  }
  j["reference"] = {{"model", ModelJson(cfg.reference)},
                    {"policy", pol},
                    {"setpoint_schedule", sched}};

  if (cfg.agents.generated) {
    ordered_json gen;
    gen["base"] = ModelJson(cfg.agents.base);
    gen["range"] = {cfg.agents.low, cfg.agents.high};
    gen["seed"] = cfg.agents.seed;
    gen["count"] = cfg.agents.count;
    j["agents"] = {{"generator", gen}};
  } else {
    ordered_json list = ordered_json::array();
    for (const auto& e : cfg.agents.list) {
      ordered_json a = ModelJson(e.params);
      if (e.uncertainty) a["uncertainty"] = UncertaintyJson(*e.uncertainty);
      list.push_back(a);
    }
    j["agents"] = {{"list", list}};
  }
  j["uncertainty"] = UncertaintyJson(cfg.uncertainty);
  j["basis"] = cfg.basis;
  j["mode"] = std::string(ToString(cfg.mode));

  ordered_json gains;
  gains["gamma_k"] = cfg.gains.gamma_k;
  gains["gamma_theta"] = cfg.gains.gamma_theta;
  gains["gamma_p"] = cfg.gains.gamma_p;
  auto opt = [&](const char* key, const std::optional<Mat>& m) {
    if (m) gains[key] = MatJson(*m);
  };
  opt("Gamma_m", cfg.gains.Gamma_m);
  opt("Gamma_r", cfg.gains.Gamma_r);
  opt("Gamma_theta", cfg.gains.Gamma_theta);
  opt("Gamma_ij", cfg.gains.Gamma_ij);
  opt("Gamma_phi", cfg.gains.Gamma_phi);
  opt("Gamma_p", cfg.gains.Gamma_p);
  j["gains"] = gains;

  if (cfg.Q) j["Q"] = MatJson(*cfg.Q);
  ordered_json ups;
  ups["lambda0"] = cfg.lambda0;
  if (cfg.upsilon) ups["matrix"] = MatJson(*cfg.upsilon);
  j["upsilon"] = ups;
  if (cfg.u_max) j["saturation"] = {{"u_max", VecJson(*cfg.u_max)}};
  j["integration"] = {{"dt", cfg.integration.dt},
                      {"t_final", cfg.integration.t_final},
                      {"record_every", cfg.integration.record_every}};

  ordered_json ic;
  if (cfg.initial.x_m0.size() > 0) ic["x_m0"] = VecJson(cfg.initial.x_m0);
  if (cfg.initial.kind == "random") {
    ic["random"] = {{"low", VecJson(cfg.initial.low)},
                    {"high", VecJson(cfg.initial.high)},
                    {"seed", cfg.initial.seed}};
  } else if (!cfg.initial.x0.empty()) {
    ordered_json rows = ordered_json::array();
    for (const auto& x : cfg.initial.x0) rows.push_back(VecJson(x));
    ic["x0"] = rows;
  }
  j["initial_conditions"] = ic.is_null() ? ordered_json::object() : ic;
  j["warm_start"] = cfg.warm_start;
  ordered_json div;
  div["state_bound"] = cfg.state_bound;
  if (cfg.error_radius) div["error_radius"] = *cfg.error_radius;
  j["divergence"] = div;
  j["metrics"] = {{"tail_fraction", cfg.tail_fraction},
                  {"settle_epsilon", cfg.settle_epsilon}};
  j["decomposition"] = {{"trials", cfg.decomposition_trials},
                        {"seed", cfg.decomposition_seed}};
  return j.dump(2) + "\n";
}

void OverrideSeeds(ScenarioConfig* cfg, std::uint64_t seed) {
  cfg->agents.seed = seed;
  cfg->uncertainty.seed = seed;
  for (auto& e : cfg->agents.list) {
    if (e.uncertainty) e.uncertainty->seed = seed;
  }
  cfg->initial.seed = seed;
  cfg->decomposition_seed = seed;
}

namespace {

AgentTemplate TemplateFor(const ModelParams& m) {
  AgentTemplate t;
  t.family = m.model == "mimo3" ? PhysicalParams::Family::kMimo3
                                : PhysicalParams::Family::kPendulum;
  t.mass = m.mass;
  t.length = m.length;
  t.damping = m.damping;
  t.gravity = m.gravity;
  t.coefficients = m.coefficients;
  t.input_gain = m.input_gain;
  t.lambda = m.lambda;
  return t;
}

UncertaintySpec UncertaintyFor(const UncertaintyConfig& u, int agent_index) {
  UncertaintySpec s;
  if (u.kind == "sinusoid") {
    s = UncertaintySpec::Sinusoid(u.amplitude, u.omega);
  } else if (u.kind == "random") {
    s = UncertaintySpec::RandomPiecewiseConstant(
        u.low, u.high, u.hold, u.seed + static_cast<std::uint64_t>(agent_index));
  } else if (u.kind == "basis") {
    Basis basis;
    for (const auto& b : u.basis) basis.push_back(BasisFunction::Parse(b));
    s = UncertaintySpec::BasisWeighted(u.theta_star, basis);
  }
  s.additive_state = u.additive_state - 1;
  return s;
}

Policy PolicyFor(const ScenarioConfig& cfg) {
  const PolicyConfig& p = cfg.policy;
  Policy policy;
  if (p.kind == "surrogate") {
    if (cfg.reference.model != "pendulum") {
      throw Invalid("reference.policy", "the surrogate needs a pendulum reference");
    }
    SurrogateParams s;
    s.setpoint = p.setpoint;
    s.k1 = p.k1;
    s.k2 = p.k2;
    s.mass = cfg.reference.mass;
    s.length = cfg.reference.length;
    s.damping = cfg.reference.damping;
    s.gravity = cfg.reference.gravity;
    policy = Policy::PendulumSurrogate(s);
  } else if (p.kind == "affine") {
    policy = Policy::Affine(p.K, p.x_set, p.u_ff);
  } else {
    std::filesystem::path path(p.path);
    if (path.is_relative() && !cfg.base_dir.empty()) path = cfg.base_dir / path;
    policy = LoadPolicy(path.string());
  }
  return p.schedule.empty() ? policy : policy.WithSchedule(p.schedule);
}

}  // namespace

NetworkSpec BuildNetworkSpec(const ScenarioConfig& cfg) {
  NetworkSpec spec;
  const int N = cfg.agents.count;

  if (cfg.graph.preset == "tree") {
    spec.adjacency = TreeAdjacency(N, cfg.graph.fanout);
  } else if (cfg.graph.preset == "chain") {
    spec.adjacency = ChainAdjacency(N);
  } else {
    spec.adjacency = cfg.graph.adjacency;
  }
  spec.leader = cfg.graph.leader - 1;

  AgentModel nominal = BuildAgent(TemplateFor(cfg.reference));
  spec.reference = MakeReference(nominal, PolicyFor(cfg));

  if (cfg.agents.generated) {
    AgentTemplate base = TemplateFor(cfg.agents.base);
    auto templates = SampleHeterogeneousTemplates(base, cfg.agents.low,
                                                  cfg.agents.high, cfg.agents.seed, N);
    for (int a = 0; a < N; ++a) {
      templates[a].uncertainty = UncertaintyFor(cfg.uncertainty, a);
      spec.agents.push_back(BuildAgent(templates[a]));
    }
  } else {
    for (int a = 0; a < N; ++a) {
      const AgentEntry& e = cfg.agents.list[a];
      AgentTemplate t = TemplateFor(e.params);
      t.uncertainty = UncertaintyFor(e.uncertainty ? *e.uncertainty : cfg.uncertainty, a);
      spec.agents.push_back(BuildAgent(t));
    }
  }

  if (!cfg.basis.empty()) {
    Basis b;
    for (const auto& name : cfg.basis) b.push_back(BasisFunction::Parse(name));
    spec.bases = {b};
  }
  spec.mode = cfg.mode;
  spec.rates.m = AdaptationRate(cfg.gains.gamma_k);
  spec.rates.r = AdaptationRate(cfg.gains.gamma_k);
  spec.rates.ij = AdaptationRate(cfg.gains.gamma_k);
  spec.rates.theta = AdaptationRate(cfg.gains.gamma_theta);
  spec.rates.phi = AdaptationRate(cfg.gains.gamma_theta);
  spec.rates.p = AdaptationRate(cfg.gains.gamma_p);
  if (cfg.gains.Gamma_m) spec.rates.m = AdaptationRate(*cfg.gains.Gamma_m);
  if (cfg.gains.Gamma_r) spec.rates.r = AdaptationRate(*cfg.gains.Gamma_r);
  if (cfg.gains.Gamma_ij) spec.rates.ij = AdaptationRate(*cfg.gains.Gamma_ij);
  if (cfg.gains.Gamma_theta) spec.rates.theta = AdaptationRate(*cfg.gains.Gamma_theta);
  if (cfg.gains.Gamma_phi) spec.rates.phi = AdaptationRate(*cfg.gains.Gamma_phi);
  if (cfg.gains.Gamma_p) spec.rates.p = AdaptationRate(*cfg.gains.Gamma_p);
  if (cfg.Q) spec.Q = *cfg.Q;
  spec.upsilon.lambda0 = cfg.lambda0;
  spec.upsilon.upsilon = cfg.upsilon;

  const int n = spec.reference.n();
  const int p = spec.reference.p();
  if (cfg.u_max) {
    SaturationSpec sat;
    sat.u_max = cfg.u_max->size() == 1 && p > 1
                    ? Vec(Vec::Constant(p, (*cfg.u_max)(0)))
                    : *cfg.u_max;
    spec.saturation = sat;
  }
  spec.warm_start = cfg.warm_start;
  spec.integration = cfg.integration;
  spec.divergence.state_bound = cfg.state_bound;
  spec.decomposition_trials = cfg.decomposition_trials;
  spec.decomposition_seed = cfg.decomposition_seed;

  spec.x_m0 = cfg.initial.x_m0.size() > 0 ? cfg.initial.x_m0 : Vec(Vec::Zero(n));
  if (cfg.initial.kind == "random") {
    if (cfg.initial.low.size() != n) {
      throw Invalid("initial_conditions.random", "range length must equal n");
    }
    std::mt19937_64 rng(cfg.initial.seed);
    for (int a = 0; a < N; ++a) {
      Vec x(n);
      for (int k = 0; k < n; ++k) {
        std::uniform_real_distribution<double> d(cfg.initial.low(k), cfg.initial.high(k));
        x(k) = d(rng);
      }
      spec.x0.push_back(x);
    }
  } else if (cfg.initial.x0.size() == 1) {
    spec.x0.assign(N, cfg.initial.x0[0]);
  } else if (cfg.initial.x0.empty()) {
    spec.x0.assign(N, spec.x_m0);
  } else {
    spec.x0 = cfg.initial.x0;
  }
  return spec;
}

MetricsSettings MetricsSettingsFor(const ScenarioConfig& cfg) {
  MetricsSettings m;
  m.tail_fraction = cfg.tail_fraction;
  m.settle_epsilon = cfg.settle_epsilon;
  m.error_radius = cfg.error_radius;
  return m;
}

RunResult RunScenario(const ScenarioConfig& cfg) {
  Network net = Network::Build(BuildNetworkSpec(cfg));
  RunResult r;
  r.log = net.Run();
  r.metrics = ComputeMetrics(r.log, MetricsSettingsFor(cfg));
  r.h_mismatch = net.h_mismatch();
  r.decomposition_residual = net.max_decomposition_residual();
  return r;
}

}  // namespace syncnet
