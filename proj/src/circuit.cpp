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

#include "noisegrad/circuit.hpp"

#include <string>

namespace noisegrad {

AnsatzLayout::AnsatzLayout(int n, int layers, Block pattern)
    : n_(n), layers_(layers), pattern_(pattern) {
  if (n < 1) throw std::invalid_argument("ansatz needs at least one qubit");
  if (layers < 1) throw std::invalid_argument("ansatz needs at least one layer");
  if (n > 12) throw std::invalid_argument("density-matrix simulation is limited to 12 qubits");
  axes_.reserve(static_cast<std::size_t>(kSlotsPerBlock * n * layers));
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q) {
      for (PauliAxis a : pattern_) axes_.push_back(a);
    }
  }
  if (n > 1) {
    for (int q = 0; q < n; ++q) ring_.emplace_back(q, (q + 1) % n);
  }
}

Eigen::Index AnsatzLayout::index(const ParameterLocation& loc) const {
  if (loc.layer < 0 || loc.layer >= layers_ || loc.qubit < 0 || loc.qubit >= n_ || loc.slot < 0 ||
      loc.slot >= kSlotsPerBlock) {
    throw std::out_of_range("parameter location (layer " + std::to_string(loc.layer) + ", qubit " +
                            std::to_string(loc.qubit) + ", slot " + std::to_string(loc.slot) +
                            ") outside layout");
  }
  return (static_cast<Eigen::Index>(loc.layer) * n_ + loc.qubit) * kSlotsPerBlock + loc.slot;
}

}  // namespace noisegrad
