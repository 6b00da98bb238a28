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

#include "noisegrad/noise.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace noisegrad {

double CnotPauliChannel::eta0() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void validate(const NoiseModel& noise) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CnotDepolarizing>) {
          detail::check_rate(m.eta0);
        } else if constexpr (std::is_same_v<T, CnotPauliChannel>) {
          for (double w : m.weights) {
            if (!(w >= 0.0)) throw std::invalid_argument("Pauli channel weights must be nonnegative");
          }
          detail::check_rate(m.eta0());
        } else if constexpr (std::is_same_v<T, GlobalDepolarizing>) {
          detail::check_rate(m.eta);
        }
      },
      noise);
}

std::string describe(const NoiseModel& noise) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NoNoise>) {
          os << "none";
        } else if constexpr (std::is_same_v<T, CnotDepolarizing>) {
          os << "cnot_depolarizing(eta0=" << m.eta0 << ")";
        } else if constexpr (std::is_same_v<T, CnotPauliChannel>) {
          os << "cnot_pauli(eta0=" << m.eta0() << (m.redraw_per_set ? ", per_set" : ", fixed") << ")";
        } else {
          os << "global_depolarizing(eta=" << m.eta << ")";
        }
      },
      noise);
  return os.str();
}

PauliWeights random_pauli_weights(double eta0, std::mt19937_64& rng) {
  detail::check_rate(eta0);
  // Normalized unit exponentials are uniform on the simplex.
  std::exponential_distribution<double> expo(1.0);
  PauliWeights w{};
  double sum = 0.0;
  for (double& x : w) {
    x = expo(rng);
    sum += x;
  }
  for (double& x : w) x *= eta0 / sum;
  return w;
}

std::uint64_t weights_hash(const PauliWeights& weights) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double w : weights) {
    const auto bits = std::bit_cast<std::uint64_t>(w);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

ErrorRateSummary total_error_rate(double eta0, int n, int layers) {
  detail::check_rate(eta0);
  if (n < 1 || layers < 1) throw std::invalid_argument("n and L must be >= 1");
  ErrorRateSummary s;
  s.eta0 = eta0;
  s.eta_per_layer = -std::expm1(n * std::log1p(-eta0));
  s.eta_total = -std::expm1(static_cast<double>(n) * layers * std::log1p(-eta0));
  s.eta_total_linear = static_cast<double>(n) * layers * eta0;
  return s;
}

double per_layer_error_rate_to_eta0(double eta_per_layer, int n) {
  detail::check_rate(eta_per_layer);
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return -std::expm1(std::log1p(-eta_per_layer) / n);
}

double total_eta(const NoiseModel& noise, int n, int layers) {
  return std::visit(
      [n, layers](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NoNoise>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, CnotDepolarizing>) {
          return n > 1 ? total_error_rate(m.eta0, n, layers).eta_total : 0.0;
        } else if constexpr (std::is_same_v<T, CnotPauliChannel>) {
          return n > 1 ? total_error_rate(m.eta0(), n, layers).eta_total : 0.0;
        } else {
          return m.eta;
        }
      },
      noise);
}

}  // namespace noisegrad
