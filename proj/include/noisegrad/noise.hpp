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

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <variant>

namespace noisegrad {

// ---------------------------------------------------------------------------
// Two-qubit channels

/// Number of non-identity two-qubit Pauli operators.
inline constexpr int kTwoQubitPaulis = 15;

/// Pauli pair for weight slot k in [0, 15): slot k corresponds to
/// (P_j, P_k) = (k+1) / 4, (k+1) % 4 in I, X, Y, Z order, i.e. IX, IY, IZ,
/// XI, XX, ..., ZZ.
inline std::pair<Pauli, Pauli> two_qubit_pauli(int slot) {
  const int code = slot + 1;
  return {static_cast<Pauli>(code / 4), static_cast<Pauli>(code % 4)};
}

using PauliWeights = std::array<double, kTwoQubitPaulis>;

namespace detail {

inline void check_pair(int j, int k, int n) {
  check_qubit(j, n);
  check_qubit(k, n);
  if (j == k) throw std::invalid_argument("two-qubit channel needs distinct qubits");
}

inline void check_rate(double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw std::invalid_argument("error rate must lie in [0, 1), got " + std::to_string(eta));
  }
}

}  // namespace detail

/// Replaces the (j, k) marginal by the maximally mixed state:
/// Tr_jk(rho) (x) 1_jk / 4.
template <typename Scalar>
DensityMatrix<Scalar> replace_pair_with_mixed(const DensityMatrix<Scalar>& rho, int j, int k) {
  const int n = qubit_count(rho);
  detail::check_pair(j, k, n);
  const Eigen::Index mj = qubit_mask(n, j);
  const Eigen::Index mk = qubit_mask(n, k);
  const Eigen::Index pair = mj | mk;
  const Eigen::Index offsets[4] = {0, mk, mj, mj | mk};
  const Eigen::Index dim = rho.rows();
  DensityMatrix<Scalar> out = DensityMatrix<Scalar>::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    if (a & pair) continue;
    for (Eigen::Index b = 0; b < dim; ++b) {
      if (b & pair) continue;
      std::complex<Scalar> s(0);
      for (Eigen::Index x : offsets) s += rho(a | x, b | x);
      s /= Scalar(4);
      for (Eigen::Index x : offsets) out(a | x, b | x) = s;
    }
  }
  return out;
}

/// Uniform two-qubit depolarizing channel with total error weight eta0 spread
/// over the 15 non-identity Paulis. Evaluated through the twirl identity
/// (1 - 16 eta0 / 15) rho + (16 eta0 / 15) Tr_jk(rho) (x) 1 / 4.
template <typename Scalar>
DensityMatrix<Scalar> apply_two_qubit_depolarizing(const DensityMatrix<Scalar>& rho, int j, int k,
                                                   double eta0) {
  detail::check_rate(eta0);
  detail::check_pair(j, k, qubit_count(rho));
  if (eta0 == 0.0) return rho;
  const Scalar w = static_cast<Scalar>(16.0 * eta0 / 15.0);
  return (Scalar(1) - w) * rho + w * replace_pair_with_mixed(rho, j, k);
}

/// P rho P for a Pauli string; all phases cancel into real signs.
template <typename Scalar>
DensityMatrix<Scalar> conjugate_by_pauli(const DensityMatrix<Scalar>& rho, const PauliString& p) {
  const Eigen::Index flip = p.flip_mask();
  const Eigen::Index sign = p.sign_mask();
  const Eigen::Index dim = rho.rows();
  DensityMatrix<Scalar> out(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const Eigen::Index sb = b ^ flip;
    const bool ob = std::popcount(static_cast<std::uint64_t>(sb & sign)) & 1;
    for (Eigen::Index a = 0; a < dim; ++a) {
      const Eigen::Index sa = a ^ flip;
      const bool oa = std::popcount(static_cast<std::uint64_t>(sa & sign)) & 1;
      out(a, b) = (oa != ob) ? -rho(sa, sb) : rho(sa, sb);
    }
  }
  return out;
}

/// General two-qubit Pauli channel: Kraus sum with identity weight
/// 1 - sum(weights).
template <typename Scalar>
DensityMatrix<Scalar> apply_two_qubit_pauli(const DensityMatrix<Scalar>& rho, int j, int k,
                                            const PauliWeights& weights) {
  const int n = qubit_count(rho);
  detail::check_pair(j, k, n);
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("Pauli channel weights must be nonnegative");
    total += w;
  }
  if (!(total < 1.0)) throw std::invalid_argument("Pauli channel weights must sum below 1");
  DensityMatrix<Scalar> out = static_cast<Scalar>(1.0 - total) * rho;
  std::vector<Pauli> letters(static_cast<std::size_t>(n), Pauli::I);
  for (int s = 0; s < kTwoQubitPaulis; ++s) {
    if (weights[static_cast<std::size_t>(s)] == 0.0) continue;
    const auto [pj, pk] = two_qubit_pauli(s);
    letters[static_cast<std::size_t>(j)] = pj;
    letters[static_cast<std::size_t>(k)] = pk;
    out += static_cast<Scalar>(weights[static_cast<std::size_t>(s)]) *
           conjugate_by_pauli(rho, PauliString(letters));
  }
  return out;
}

/// (1 - eta) rho + eta 1/d.
template <typename Scalar>
DensityMatrix<Scalar> apply_global_depolarizing(const DensityMatrix<Scalar>& rho, double eta) {
  detail::check_rate(eta);
  const Eigen::Index dim = rho.rows();
  DensityMatrix<Scalar> out = static_cast<Scalar>(1.0 - eta) * rho;
  out.diagonal().array() += static_cast<Scalar>(eta / static_cast<double>(dim));
  return out;
}

// ---------------------------------------------------------------------------
// Noise models

struct NoNoise {
  bool operator==(const NoNoise&) const = default;
};

/// Uniform depolarizing channel after every CNOT.
struct CnotDepolarizing {
  double eta0 = 0.0;
  bool operator==(const CnotDepolarizing&) const = default;
};

/// General Pauli channel after every CNOT; weights sum to eta0.
struct CnotPauliChannel {
  PauliWeights weights{};
  /// Draw fresh weights (same eta0) for every parameter set of an experiment.
  bool redraw_per_set = true;

  double eta0() const;
  bool operator==(const CnotPauliChannel&) const = default;
};

/// Single depolarizing step after the full circuit. Realizes a constant
/// error term g = tr(O)/d = 0 exactly.
struct GlobalDepolarizing {
  double eta = 0.0;
  bool operator==(const GlobalDepolarizing&) const = default;
};

using NoiseModel = std::variant<NoNoise, CnotDepolarizing, CnotPauliChannel, GlobalDepolarizing>;

void validate(const NoiseModel& noise);
std::string describe(const NoiseModel& noise);

/// Weights summing to eta0, drawn uniformly from the simplex.
PauliWeights random_pauli_weights(double eta0, std::mt19937_64& rng);

/// FNV-1a hash of the weight bit patterns; used to tag redrawn channels.
std::uint64_t weights_hash(const PauliWeights& weights);

// ---------------------------------------------------------------------------
// Error-rate bookkeeping

struct ErrorRateSummary {
  double eta0 = 0.0;
  double eta_per_layer = 0.0;
  double eta_total = 0.0;
  /// First-order estimate n L eta0.
  double eta_total_linear = 0.0;
};

ErrorRateSummary total_error_rate(double eta0, int n, int layers);

/// Inverse of eta_per_layer = 1 - (1 - eta0)^n.
double per_layer_error_rate_to_eta0(double eta_per_layer, int n);

/// Total error rate eta of a noise model on an n-qubit, L-layer ansatz.
double total_eta(const NoiseModel& noise, int n, int layers);

}  // namespace noisegrad
