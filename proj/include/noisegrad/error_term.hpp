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

#include "noisegrad/circuit.hpp"

#include <stdexcept>

namespace noisegrad {

/// Error-term expectation g = (f_eta - (1 - eta) f) / eta, with eta the total
/// error rate of the noise model on this layout.
inline double extract_g(const AnsatzLayout& layout, const ParameterVectord& theta,
                        const NoiseModel& noise, const PauliObservable& obs) {
  const double eta = total_eta(noise, layout.qubits(), layout.layers());
  if (eta < 1e-12) {
    throw std::domain_error("extract_g: total error rate " + std::to_string(eta) +
                            " below 1e-12, g is undefined");
  }
  const double f = circuit_function(layout, theta, NoiseModel{NoNoise{}}, obs);
  const double f_eta = circuit_function(layout, theta, noise, obs);
  return (f_eta - (1.0 - eta) * f) / eta;
}

}  // namespace noisegrad
