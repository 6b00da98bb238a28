// Copyright 2026 The noisegrad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "noisegrad/harness.hpp"

#include <map>
#include <json.hpp>
#include <string>

namespace noisegrad {

/// Experiment configuration read from a sectioned key/value file:
///
///   [circuit]   qubits, layers, pattern (e.g. ZYZ), observable (e.g. XYZX)
///   [noise]     model = none | cnot_depolarizing | cnot_pauli | global_depolarizing
///               one rate: eta0 (per CNOT), eta_per_layer, or eta (total)
///               weights = 15 comma-separated rates (cnot_pauli), redraw = per_set | fixed
///   [targets]   list = gradient:1:2, diag:1:2, offdiag:1:2:2:2
///   [sampling]  n_total, parameter_sets, experiments_per_set, seed, schemes, workers
///   [meta]      free-form notes copied into the manifest
struct LoadedConfig {
  ExperimentConfig experiment;
  std::map<std::string, std::string> meta;
};

/// Throws ConfigError listing every problem with its section.key path.
LoadedConfig parse_config(const std::string& text);
LoadedConfig load_config(const std::string& path);

/// Copy-number grid: comma-separated integers or a:b:step ranges.
std::vector<std::int64_t> parse_grid(const std::string& text);

/// Semantic content of a configuration with sorted keys. Worker count and
/// [meta] are excluded since they do not change results.
nlohmann::json canonical_json(const ExperimentConfig& config);

/// SHA-256 hex digest of canonical_json(config).dump().
std::string config_hash(const ExperimentConfig& config);

std::string sha256_hex(const std::string& data);

}  // namespace noisegrad
