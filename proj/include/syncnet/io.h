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

#ifndef SYNCNET_IO_H_
#define SYNCNET_IO_H_

#include <string>

#include "syncnet/metrics.h"
#include "syncnet/scenario.h"

namespace syncnet {

/// Header t,agent,state_1..n,u_1..p,usat_1..p,err_norm,V; per sample a
/// `ref` row followed by one row per agent (1-based ids). Numbers use 17
/// significant digits. Throws kEmptyLog.
std::string FormatCsv(const TrajectoryLog& log);

std::string MetricsJson(const ScenarioConfig& cfg, const RunResult& result);

std::string ComparisonCsv(const MagnitudeComparison& c);
std::string ComparisonJson(const MagnitudeComparison& c);

/// Throws kIoError.
void WriteTextFile(const std::string& path, const std::string& text);

/// Writes trajectory.csv, metrics.json and effective_config.json into dir
/// (created if missing).
void WriteRunOutputs(const std::string& dir, const ScenarioConfig& cfg,
                     const RunResult& result);

}  // namespace syncnet

#endif  // SYNCNET_IO_H_
