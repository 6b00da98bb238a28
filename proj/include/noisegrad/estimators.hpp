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
#include "noisegrad/component.hpp"
#include "noisegrad/rng.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace noisegrad {

/// Gradient, diagonal Hessian or off-diagonal Hessian component at one or two
/// parameter locations.
class DerivativeTarget {
 public:
  static DerivativeTarget gradient(ParameterLocation loc);
  static DerivativeTarget diag_hessian(ParameterLocation loc);
  static DerivativeTarget off_diag_hessian(ParameterLocation first, ParameterLocation second);

  Component kind() const { return kind_; }
  const ParameterLocation& first() const { return first_; }
  /// Equals first() unless kind() is OffDiagHessian.
  const ParameterLocation& second() const { return second_; }

  /// "gradient:q:l", "diag:q:l" or "offdiag:q:l:q2:l2" with 1-based qubit and
  /// layer on the second (Y) slot; "q:l@s" selects slot s.
  static DerivativeTarget parse(std::string_view text);

  /// Throws if a location does not resolve in the layout.
  void check(const AnsatzLayout& layout) const;
  /// Inverse of parse.
  std::string str() const;

  bool operator==(const DerivativeTarget&) const = default;

 private:
  DerivativeTarget(Component kind, ParameterLocation a, ParameterLocation b)
      : kind_(kind), first_(a), second_(b) {}
  Component kind_;
  ParameterLocation first_;
  ParameterLocation second_;
};

enum class Scheme { PS, SPS, FD };

struct EstimatorSpec {
  Scheme scheme = Scheme::PS;
  /// lambda for SPS, epsilon for FD, unused for PS.
  double value = 1.0;
  DerivativeTarget target;

  static EstimatorSpec ps(const DerivativeTarget& t) { return {Scheme::PS, 1.0, t}; }
  static EstimatorSpec sps(double lambda, const DerivativeTarget& t);
  static EstimatorSpec fd(double epsilon, const DerivativeTarget& t);
};

struct ShotBudget {
  std::int64_t n_total = 0;
  std::int64_t per_point = 0;
  /// Copies left over by the floor division.
  std::int64_t discarded = 0;
};

/// Equal split of n_total over the 2/3/4 evaluation points.
ShotBudget shot_allocation(Component target, std::int64_t n_total);

/// One evaluation point of a finite-difference-style combination.
struct StencilPoint {
  std::array<double, 2> shifts{};  ///< added to target.first() / target.second()
  double weight = 0.0;
};

/// Linear combination sum_k weight_k f(theta + shift_k) realizing a scheme.
struct Stencil {
  std::array<Eigen::Index, 2> parameters{};
  std::vector<StencilPoint> points;

  ParameterVectord shifted(const ParameterVectord& theta, std::size_t point) const;
};

Stencil make_stencil(const EstimatorSpec& spec, const AnsatzLayout& layout);

/// Estimate of a +-1-valued observable mean from `shots` Bernoulli outcomes
/// with p(+1) = (1 + f) / 2.
double sample_function(double expectation_value, std::int64_t shots, std::mt19937_64& rng);
double sample_function(const DensityMatrixd& state, const PauliObservable& obs, std::int64_t shots,
                       std::mt19937_64& rng);

/// Exact parameter-shift value of the component for the (possibly noisy)
/// circuit function.
double exact_derivative(const DerivativeTarget& target, const AnsatzLayout& layout,
                        const ParameterVectord& theta, const NoiseModel& noise,
                        const PauliObservable& obs);

/// Infinite-shot mean of an estimator.
double expected_estimate(const EstimatorSpec& spec, const AnsatzLayout& layout,
                         const ParameterVectord& theta, const NoiseModel& noise,
                         const PauliObservable& obs);

/// Finite-shot estimate. Point k of the stencil draws its shots from
/// streams.child(k).
double estimate_derivative(const EstimatorSpec& spec, const AnsatzLayout& layout,
                           const ParameterVectord& theta, const NoiseModel& noise,
                           const PauliObservable& obs, const ShotBudget& budget,
                           const Substream& streams);

/// Combine stencil weights with per-point function values.
double combine(const Stencil& stencil, const std::vector<double>& values);

}  // namespace noisegrad
