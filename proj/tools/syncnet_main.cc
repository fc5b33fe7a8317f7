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

// Command-line entry point: run configs and presets, validate configs.

#include <cstdlib>
#include <filesystem>
#include <future>
#include <optional>
#include <sstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "syncnet/io.h"
#include "syncnet/presets.h"
#include "syncnet/scenario.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDiverged = 3;

namespace fs = std::filesystem;
using syncnet::Error;
using syncnet::ErrorCode;

std::string DefaultOutDir() {
  const char* env = std::getenv("SYNCNET_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : "out";
}

int ExitCodeFor(const Error& e) {
  return e.code() == ErrorCode::kIoError ? kExitIo : kExitValidation;
}

void PrintSummary(const syncnet::ScenarioConfig& cfg, const syncnet::RunResult& r,
                  const std::string& dir) {
  const auto& m = r.metrics;
  std::cout << cfg.name << " [" << syncnet::ToString(cfg.mode) << "] "
            << "tail_error=" << m.sup_error_tail
            << (m.diverged ? " DIVERGED (" + m.diverged_reason + ")" : "")
            << " -> " << dir << "\n";
}

struct PresetOutcome {
  int code = kExitOk;
  std::string message;
};

// Runs one preset into dir; never throws.
PresetOutcome RunPreset(const std::string& name, const std::string& dir) {
  PresetOutcome out;
  try {
    syncnet::ScenarioConfig cfg = syncnet::MakePreset(name);
    syncnet::RunResult r = syncnet::RunScenario(cfg);
    syncnet::WriteRunOutputs(dir, cfg, r);
    if (syncnet::IsComparisonPreset(name)) {
      syncnet::ScenarioConfig plain = cfg;
      plain.mode = syncnet::ControllerMode::kAdaptiveNoAntiwindup;
      plain.name = cfg.name + "_no_antiwindup";
      syncnet::RunResult rp = syncnet::RunScenario(plain);
      syncnet::WriteRunOutputs((fs::path(dir) / "no_antiwindup").string(), plain, rp);
      auto cmp = syncnet::CompareMagnitudes(r.log, rp.log);
      syncnet::WriteTextFile((fs::path(dir) / "magnitude_comparison.csv").string(),
                             syncnet::ComparisonCsv(cmp));
      syncnet::WriteTextFile((fs::path(dir) / "comparison.json").string(),
                             syncnet::ComparisonJson(cmp));
    }
    std::ostringstream os;
    const auto& m = r.metrics;
    os << cfg.name << " [" << syncnet::ToString(cfg.mode) << "] tail_error="
       << m.sup_error_tail
       << (m.diverged ? " DIVERGED (" + m.diverged_reason + ")" : "") << " -> "
       << dir;
    out.message = os.str();
    out.code = m.diverged ? kExitDiverged : kExitOk;
  } catch (const Error& e) {
    out.code = ExitCodeFor(e);
    out.message = name + ": " + e.what();
  } catch (const std::exception& e) {
    out.code = kExitIo;
    out.message = name + ": " + e.what();
  }
  return out;
}

int CmdRun(const std::string& path, const std::string& out_dir,
           const std::optional<std::uint64_t>& seed) {
  syncnet::ScenarioConfig cfg = syncnet::LoadConfig(path);
  if (seed) syncnet::OverrideSeeds(&cfg, *seed);
  syncnet::RunResult r = syncnet::RunScenario(cfg);
  syncnet::WriteRunOutputs(out_dir, cfg, r);
  PrintSummary(cfg, r, out_dir);
  return r.metrics.diverged ? kExitDiverged : kExitOk;
}

int CmdPreset(const std::string& name, const std::optional<std::string>& out) {
  if (name == "all") {
    const fs::path root = out.value_or(DefaultOutDir());
    const auto& names = syncnet::PresetNames();
    std::vector<std::future<PresetOutcome>> jobs;
    for (const auto& n : names) {
      jobs.push_back(std::async(std::launch::async, RunPreset, n, (root / n).string()));
    }
    int code = kExitOk;
    for (auto& job : jobs) {
      PresetOutcome o = job.get();
      (o.code == kExitOk || o.code == kExitDiverged ? std::cout : std::cerr)
          << o.message << "\n";
      // Hard failures outrank divergence.
      if (o.code == kExitIo || o.code == kExitValidation) {
        if (code == kExitOk || code == kExitDiverged) code = o.code;
      } else if (o.code == kExitDiverged && code == kExitOk) {
        code = kExitDiverged;
      }
    }
    return code;
  }
  const std::string canonical = syncnet::ResolvePresetName(name);
  const std::string dir = out ? *out : (fs::path(DefaultOutDir()) / canonical).string();
  PresetOutcome o = RunPreset(canonical, dir);
  (o.code == kExitOk || o.code == kExitDiverged ? std::cout : std::cerr)
      << o.message << "\n";
  return o.code;
}

int CmdValidate(const std::string& path) {
  syncnet::ScenarioConfig cfg = syncnet::LoadConfig(path);
  syncnet::Network::Build(syncnet::BuildNetworkSpec(cfg));
  std::cout << path << ": ok\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"syncnet: leader-follower adaptive synchronization simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("config", config_path, "scenario JSON")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed-override", seed, "replace every seed in the config");

  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "run a shipped preset (or 'all')");
  preset->add_option("name", preset_name, "preset name or 'all'")->required();
  preset->add_option("--out", out_dir, "output directory");

  auto* list = app.add_subcommand("list-presets", "list shipped presets");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", validate_path, "scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return CmdRun(config_path, out_dir.value_or(DefaultOutDir()), seed);
    if (*preset) return CmdPreset(preset_name, out_dir);
    if (*list) {
      for (const auto& n : syncnet::PresetNames()) {
        std::cout << n << "  " << syncnet::PresetDescription(n) << "\n";
      }
      return kExitOk;
    }
    if (*validate) return CmdValidate(validate_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
