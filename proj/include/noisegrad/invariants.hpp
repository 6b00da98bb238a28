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

#include <cstdint>
#include <string>
#include <vector>

namespace noisegrad {

struct InvariantResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  /// Analytic invariants only.
  bool quick = false;
  std::uint64_t seed = 20240611;
  /// Multiplies the lambda_opt values fed to the stationarity check; any
  /// value other than 1 must make it fail.
  double lambda_scale = 1.0;
};

/// Stationarity, quadratic structure, N* roots, asymptotic eps_opt and
/// limiting behaviour; the full suite adds two-design moments, estimator exactness and
/// a constant-g noise plateau.
std::vector<InvariantResult> run_invariants(const VerifyOptions& options);

}  // namespace noisegrad
