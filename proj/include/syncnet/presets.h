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

#ifndef SYNCNET_PRESETS_H_
#define SYNCNET_PRESETS_H_

#include <string>
#include <vector>

#include "syncnet/scenario.h"

namespace syncnet {

/// Canonical preset names in figure order.
const std::vector<std::string>& PresetNames();

/// Maps aliases onto canonical names; throws kInvalidArgument if unknown.
std::string ResolvePresetName(const std::string& name);

std::string PresetDescription(const std::string& name);

/// Config of a preset. For the comparison preset this is the dmsac_rl half;
/// the other half is the same config in adaptive_no_antiwindup mode.
ScenarioConfig MakePreset(const std::string& name);

/// True for presets that run a dmsac_rl / adaptive_no_antiwindup pair.
bool IsComparisonPreset(const std::string& name);

}  // namespace syncnet

#endif  // SYNCNET_PRESETS_H_
