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

#include "noisegrad/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

namespace noisegrad {

namespace {

std::string location_str(const ParameterLocation& loc) {
  std::string s = ":" + std::to_string(loc.qubit + 1) + ":" + std::to_string(loc.layer + 1);
  if (loc.slot != 1) s += "@" + std::to_string(loc.slot + 1);
  return s;
}

int parse_index(std::string_view text, std::string_view what, std::string_view full) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || v < 1) {
    throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(text) + "' in target '" +
                                std::string(full) + "' (1-based integer expected)");
  }
  return v - 1;
}

/// "q:l" or "q:l@s", all 1-based.
ParameterLocation parse_location(std::string_view q, std::string_view l, std::string_view full) {
  ParameterLocation loc;
  loc.qubit = parse_index(q, "qubit", full);
  const auto at = l.find('@');
  if (at == std::string_view::npos) {
    loc.layer = parse_index(l, "layer", full);
  } else {
    loc.layer = parse_index(l.substr(0, at), "layer", full);
    loc.slot = parse_index(l.substr(at + 1), "slot", full);
    if (loc.slot > 2) {
      throw std::invalid_argument("slot must be 1, 2 or 3 in target '" + std::string(full) + "'");
    }
  }
  return loc;
}

}  // namespace

Component parse_component(std::string_view name) {
  if (name == "gradient" || name == "grad") return Component::Gradient;
  if (name == "diag" || name == "diag_hessian") return Component::DiagHessian;
  if (name == "offdiag" || name == "off_diag_hessian") return Component::OffDiagHessian;
  throw std::invalid_argument("unknown derivative target '" + std::string(name) + "'");
}

DerivativeTarget DerivativeTarget::gradient(ParameterLocation loc) {
  return DerivativeTarget(Component::Gradient, loc, loc);
}

DerivativeTarget DerivativeTarget::diag_hessian(ParameterLocation loc) {
  return DerivativeTarget(Component::DiagHessian, loc, loc);
}

DerivativeTarget DerivativeTarget::off_diag_hessian(ParameterLocation first, ParameterLocation second) {
  if (first == second) {
    throw std::invalid_argument("off-diagonal Hessian needs two distinct parameters");
  }
  return DerivativeTarget(Component::OffDiagHessian, first, second);
}

void DerivativeTarget::check(const AnsatzLayout& layout) const {
  (void)layout.index(first_);
  (void)layout.index(second_);
}

std::string DerivativeTarget::str() const {
  std::string s(to_string(kind_));
  s += location_str(first_);
  if (kind_ == Component::OffDiagHessian) s += location_str(second_);
  return s;
}

DerivativeTarget DerivativeTarget::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  const Component kind = parse_component(parts[0]);
  const std::size_t want = kind == Component::OffDiagHessian ? 5 : 3;
  if (parts.size() != want) {
    throw std::invalid_argument("target '" + std::string(text) + "' needs " +
                                (want == 3 ? std::string("kind:qubit:layer")
                                           : std::string("offdiag:qubit:layer:qubit2:layer2")));
  }
  const ParameterLocation a = parse_location(parts[1], parts[2], text);
  switch (kind) {
    case Component::Gradient: return gradient(a);
    case Component::DiagHessian: return diag_hessian(a);
    case Component::OffDiagHessian: return off_diag_hessian(a, parse_location(parts[3], parts[4], text));
  }
  throw std::logic_error("unhandled component");
}

EstimatorSpec EstimatorSpec::sps(double lambda, const DerivativeTarget& t) {
  if (!(std::isfinite(lambda) && lambda > 0.0)) {
    throw std::invalid_argument("SPS scale lambda must be finite and positive");
  }
  return {Scheme::SPS, lambda, t};
}

EstimatorSpec EstimatorSpec::fd(double epsilon, const DerivativeTarget& t) {
  if (!(epsilon > 0.0 && epsilon < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("FD step epsilon must lie in (0, 2 pi)");
  }
  return {Scheme::FD, epsilon, t};
}

ShotBudget shot_allocation(Component target, std::int64_t n_total) {
  const int p = point_count(target);
  if (n_total < p) {
    throw std::invalid_argument("total copies " + std::to_string(n_total) + " below the " +
                                std::to_string(p) + " evaluation points of a " +
                                std::string(to_string(target)) + " estimate");
  }
  return {n_total, n_total / p, n_total % p};
}

ParameterVectord Stencil::shifted(const ParameterVectord& theta, std::size_t point) const {
  ParameterVectord t = theta;
  const StencilPoint& sp = points.at(point);
  t(parameters[0]) += sp.shifts[0];
  t(parameters[1]) += sp.shifts[1];
  return t;
}

Stencil make_stencil(const EstimatorSpec& spec, const AnsatzLayout& layout) {
  const DerivativeTarget& t = spec.target;
  Stencil st;
  st.parameters = {layout.index(t.first()), layout.index(t.second())};

  // half: shift of a first-order point; w1, w2: first- and second-order weights.
  double half = std::numbers::pi / 2;
  double w1 = 0.5;
  double w2 = 0.25;
  if (spec.scheme == Scheme::SPS) {
    w1 = spec.value / 2;
    w2 = spec.value / 4;
  } else if (spec.scheme == Scheme::FD) {
    if (!(spec.value > 0.0 && spec.value < 2.0 * std::numbers::pi)) {
      throw std::invalid_argument("FD step epsilon must lie in (0, 2 pi)");
    }
    half = spec.value / 2;
    w1 = 1.0 / spec.value;
    w2 = w1 * w1;
  }

  switch (t.kind()) {
    case Component::Gradient:
      st.points = {{{half, 0.0}, w1}, {{-half, 0.0}, -w1}};
      break;
    case Component::DiagHessian:
      st.points = {{{2 * half, 0.0}, w2}, {{0.0, 0.0}, -2 * w2}, {{-2 * half, 0.0}, w2}};
      break;
    case Component::OffDiagHessian:
      st.points = {{{half, half}, w2}, {{half, -half}, -w2}, {{-half, half}, -w2}, {{-half, -half}, w2}};
      break;
  }
  return st;
}

double combine(const Stencil& stencil, const std::vector<double>& values) {
  if (values.size() != stencil.points.size()) throw std::invalid_argument("stencil value count mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) acc += stencil.points[k].weight * values[k];
  return acc;
}

double sample_function(double f, std::int64_t shots, std::mt19937_64& rng) {
  if (shots < 1) throw std::invalid_argument("sample_function needs at least one shot");
  if (!(f >= -1.0 - 1e-10 && f <= 1.0 + 1e-10)) {
    throw std::invalid_argument("expectation value " + std::to_string(f) + " outside [-1, 1]");
  }
  const double p_plus = std::clamp((1.0 + f) / 2.0, 0.0, 1.0);
  std::int64_t plus;
  if (p_plus <= 0.0) {
    plus = 0;
  } else if (p_plus >= 1.0) {
    plus = shots;
  } else {
    std::binomial_distribution<std::int64_t> draw(shots, p_plus);
    plus = draw(rng);
  }
  return static_cast<double>(2 * plus - shots) / static_cast<double>(shots);
}

double sample_function(const DensityMatrixd& state, const PauliObservable& obs, std::int64_t shots,
                       std::mt19937_64& rng) {
  return sample_function(expectation(state, obs), shots, rng);
}

double exact_derivative(const DerivativeTarget& target, const AnsatzLayout& layout,
                        const ParameterVectord& theta, const NoiseModel& noise,
                        const PauliObservable& obs) {
  return expected_estimate(EstimatorSpec::ps(target), layout, theta, noise, obs);
}

double expected_estimate(const EstimatorSpec& spec, const AnsatzLayout& layout,
                         const ParameterVectord& theta, const NoiseModel& noise,
                         const PauliObservable& obs) {
  const Stencil st = make_stencil(spec, layout);
  std::vector<double> values(st.points.size());
  for (std::size_t k = 0; k < st.points.size(); ++k) {
    values[k] = circuit_function(layout, st.shifted(theta, k), noise, obs);
  }
  return combine(st, values);
}

double estimate_derivative(const EstimatorSpec& spec, const AnsatzLayout& layout,
                           const ParameterVectord& theta, const NoiseModel& noise,
                           const PauliObservable& obs, const ShotBudget& budget,
                           const Substream& streams) {
  if (budget.per_point < 1) {
    throw std::invalid_argument("shot budget leaves no copies per evaluation point");
  }
  const Stencil st = make_stencil(spec, layout);
  std::vector<double> values(st.points.size());
  for (std::size_t k = 0; k < st.points.size(); ++k) {
    const DensityMatrixd rho = evolve(layout, st.shifted(theta, k), noise);
    std::mt19937_64 rng = streams.child(k).engine();
    values[k] = sample_function(rho, obs, budget.per_point, rng);
  }
  return combine(st, values);
}

}  // namespace noisegrad
