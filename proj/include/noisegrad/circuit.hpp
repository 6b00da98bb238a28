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

#include "noisegrad/density.hpp"
#include "noisegrad/noise.hpp"

#include <array>
#include <utility>
#include <vector>

namespace noisegrad {

inline constexpr int kSlotsPerBlock = 3;

/// Address of one encoded angle. All indices are zero-based.
struct ParameterLocation {
  int layer = 0;
  int qubit = 0;
  int slot = 1;
  bool operator==(const ParameterLocation&) const = default;
};

template <typename Scalar>
using ParameterVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using ParameterVectord = ParameterVector<double>;

/// Layered ansatz: per layer, a three-rotation block on every qubit followed
/// by the CNOT ring (0,1), (1,2), ..., (n-1,0).
class AnsatzLayout {
 public:
  using Block = std::array<PauliAxis, kSlotsPerBlock>;

  /// Same block on every (layer, qubit).
  AnsatzLayout(int n, int layers, Block pattern = default_pattern());

  static constexpr Block default_pattern() { return {PauliAxis::Z, PauliAxis::Y, PauliAxis::Z}; }

  int qubits() const { return n_; }
  int layers() const { return layers_; }
  Eigen::Index dim() const { return Eigen::Index{1} << n_; }
  Eigen::Index parameter_count() const { return static_cast<Eigen::Index>(axes_.size()); }
  Eigen::Index index(const ParameterLocation& loc) const;
  PauliAxis axis(const ParameterLocation& loc) const { return axes_[static_cast<std::size_t>(index(loc))]; }
  const std::vector<std::pair<int, int>>& cnot_ring() const { return ring_; }
  std::size_t cnot_count() const { return ring_.size() * static_cast<std::size_t>(layers_); }
  const Block& pattern() const { return pattern_; }

 private:
  int n_;
  int layers_;
  Block pattern_;
  std::vector<PauliAxis> axes_;
  std::vector<std::pair<int, int>> ring_;
};

inline AnsatzLayout build_ansatz(int n, int layers,
                                 AnsatzLayout::Block pattern = AnsatzLayout::default_pattern()) {
  return AnsatzLayout(n, layers, pattern);
}

namespace detail {

template <typename Scalar>
DensityMatrix<Scalar> apply_cnot_noise(DensityMatrix<Scalar> rho, int j, int k, const NoiseModel& noise) {
  if (const auto* dep = std::get_if<CnotDepolarizing>(&noise)) {
    return apply_two_qubit_depolarizing(rho, j, k, dep->eta0);
  }
  if (const auto* pc = std::get_if<CnotPauliChannel>(&noise)) {
    return apply_two_qubit_pauli(rho, j, k, pc->weights);
  }
  return rho;
}

}  // namespace detail

/// Noisy ansatz state from |0...0>: noiseless rotations, then each CNOT of
/// the ring followed by its two-qubit channel.
template <typename Scalar>
DensityMatrix<Scalar> evolve(const AnsatzLayout& layout, const ParameterVector<Scalar>& theta,
                             const NoiseModel& noise) {
  if (theta.size() != layout.parameter_count()) {
    throw std::invalid_argument("parameter vector has " + std::to_string(theta.size()) +
                                " entries; layout needs " +
                                std::to_string(layout.parameter_count()));
  }
  validate(noise);
  const int n = layout.qubits();
  DensityMatrix<Scalar> rho = zero_state<Scalar>(n);
  Eigen::Index p = 0;
  for (int l = 0; l < layout.layers(); ++l) {
    for (int q = 0; q < n; ++q) {
      Matrix2c<Scalar> block = Matrix2c<Scalar>::Identity();
      for (int s = 0; s < kSlotsPerBlock; ++s, ++p) {
        block = rotation_matrix(layout.pattern()[static_cast<std::size_t>(s)], theta(p)) * block;
      }
      rho = apply_single_qubit(std::move(rho), q, block);
    }
    for (const auto& [c, t] : layout.cnot_ring()) {
      rho = apply_cnot(std::move(rho), c, t);
      rho = detail::apply_cnot_noise(std::move(rho), c, t, noise);
    }
  }
  if (const auto* g = std::get_if<GlobalDepolarizing>(&noise)) {
    rho = apply_global_depolarizing(rho, g->eta);
  }
  return rho;
}

/// Exact expectation of the (possibly noisy) circuit function.
template <typename Scalar>
Scalar circuit_function(const AnsatzLayout& layout, const ParameterVector<Scalar>& theta,
                        const NoiseModel& noise, const PauliObservable& obs) {
  if (obs.size() != layout.qubits()) throw std::invalid_argument("observable size mismatch");
  return expectation(evolve(layout, theta, noise), obs);
}

}  // namespace noisegrad
