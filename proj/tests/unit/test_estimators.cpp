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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace noisegrad {
namespace {

ParameterVectord random_theta(const AnsatzLayout& layout, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 2 * std::numbers::pi);
  ParameterVectord theta(layout.parameter_count());
  for (auto& x : theta) x = u(rng);
  return theta;
}

double f_at(const AnsatzLayout& layout, ParameterVectord theta, Eigen::Index i, double di,
            Eigen::Index j, double dj, const PauliObservable& obs) {
  theta(i) += di;
  theta(j) += dj;
  return circuit_function(layout, theta, NoNoise{}, obs);
}

double oracle_sinc(double x) { return std::sin(x) / x; }

DerivativeTarget random_target(Component c, const AnsatzLayout& layout, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> lq(0, layout.qubits() - 1), ll(0, layout.layers() - 1),
      ls(0, 2);
  const ParameterLocation a{ll(rng), lq(rng), ls(rng)};
  switch (c) {
    case Component::Gradient: return DerivativeTarget::gradient(a);
    case Component::DiagHessian: return DerivativeTarget::diag_hessian(a);
    default: {
      ParameterLocation b{ll(rng), lq(rng), ls(rng)};
      while (b == a) b = {ll(rng), lq(rng), ls(rng)};
      return DerivativeTarget::off_diag_hessian(a, b);
    }
  }
}

TEST(SampleFunction, DeterministicOutcome) {
  std::mt19937_64 rng(1);
  for (std::int64_t n : {1, 7, 1000}) {
    EXPECT_EQ(sample_function(1.0, n, rng), 1.0);
    EXPECT_EQ(sample_function(-1.0, n, rng), -1.0);
  }
  EXPECT_EQ(sample_function(zero_state<double>(1), PauliObservable::parse("Z"), 50, rng), 1.0);
}

TEST(SampleFunction, BinomialMean) {
  std::mt19937_64 rng(2);
  double mean = 0;
  for (int r = 0; r < 100; ++r) mean += sample_function(0.6, 1'000'000, rng) / 100;
  EXPECT_NEAR(mean, 0.6, 4 * std::sqrt(1 - 0.36) / 1e3);
}

TEST(SampleFunction, BernoulliVariance) {
  std::mt19937_64 rng(3);
  const int reps = 20000;
  const std::int64_t n = 400;
  double s = 0, s2 = 0;
  for (int r = 0; r < reps; ++r) {
    const double x = sample_function(0.0, n, rng);
    s += x;
    s2 += x * x;
  }
  const double var = s2 / reps - (s / reps) * (s / reps);
  // Relative sd of a sample variance of near-normal data is sqrt(2 / reps) = 1%.
  EXPECT_NEAR(var * n, 1.0, 0.05);
}

TEST(SampleFunction, RejectsBadInput) {
  std::mt19937_64 rng(4);
  EXPECT_THROW(sample_function(0.2, 0, rng), std::invalid_argument);
  EXPECT_THROW(sample_function(1.5, 10, rng), std::invalid_argument);
}

TEST(ShotAllocation, EqualSplit) {
  EXPECT_EQ(shot_allocation(Component::Gradient, 96).per_point, 48);
  EXPECT_EQ(shot_allocation(Component::DiagHessian, 96).per_point, 32);
  EXPECT_EQ(shot_allocation(Component::OffDiagHessian, 96).per_point, 24);
  const ShotBudget b = shot_allocation(Component::DiagHessian, 100);
  EXPECT_EQ(b.per_point, 33);
  EXPECT_EQ(b.discarded, 1);
  EXPECT_THROW(shot_allocation(Component::OffDiagHessian, 3), std::invalid_argument);
}

TEST(ExactDerivative, SingleQubitCosine) {
  const AnsatzLayout layout = build_ansatz(1, 1);
  const auto z = PauliObservable::parse("Z");
  const auto grad = DerivativeTarget::gradient({0, 0, 1});
  const auto diag = DerivativeTarget::diag_hessian({0, 0, 1});
  for (double t : {0.2, 1.3, 2.9, 4.4}) {
    ParameterVectord theta(3);
    theta << 0.7, t, -0.4;
    EXPECT_NEAR(exact_derivative(grad, layout, theta, NoNoise{}, z), -std::sin(t), 1e-14);
    EXPECT_NEAR(exact_derivative(diag, layout, theta, NoNoise{}, z), -std::cos(t), 1e-14);
  }
}

TEST(ExactDerivative, IdleParameterGivesZero) {
  const AnsatzLayout layout = build_ansatz(1, 1);
  ParameterVectord theta(3);
  theta << 0.7, 1.1, -0.4;
  const auto z = PauliObservable::parse("Z");
  EXPECT_NEAR(exact_derivative(DerivativeTarget::gradient({0, 0, 0}), layout, theta, NoNoise{}, z),
              0.0, 1e-15);
  EXPECT_NEAR(exact_derivative(DerivativeTarget::gradient({0, 0, 2}), layout, theta, NoNoise{}, z),
              0.0, 1e-15);
}

TEST(ExactDerivative, MatchesCentralDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-6;
  const double h2 = 1e-4;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    const AnsatzLayout layout = build_ansatz(n, 1 + trial % 3);
    const ParameterVectord theta = random_theta(layout, rng);
    const PauliObservable obs = PauliObservable::cyclic_xyz(n);
    const Component c = kAllComponents[static_cast<std::size_t>(trial % 3)];
    const DerivativeTarget t = random_target(c, layout, rng);
    const Eigen::Index i = layout.index(t.first());
    const Eigen::Index j = layout.index(t.second());
    double fd = 0;
    switch (c) {
      case Component::Gradient:
        fd = (f_at(layout, theta, i, h, i, 0, obs) - f_at(layout, theta, i, -h, i, 0, obs)) / (2 * h);
        break;
      case Component::DiagHessian:
        fd = (f_at(layout, theta, i, h2, i, 0, obs) - 2 * f_at(layout, theta, i, 0, i, 0, obs) +
              f_at(layout, theta, i, -h2, i, 0, obs)) /
             (h2 * h2);
        break;
      case Component::OffDiagHessian:
        fd = (f_at(layout, theta, i, h2, j, h2, obs) - f_at(layout, theta, i, h2, j, -h2, obs) -
              f_at(layout, theta, i, -h2, j, h2, obs) + f_at(layout, theta, i, -h2, j, -h2, obs)) /
             (4 * h2 * h2);
        break;
    }
    EXPECT_NEAR(exact_derivative(t, layout, theta, NoNoise{}, obs), fd, 1e-6) << t.str();
  }
}

TEST(ExactDerivative, SingleAngleExpansion) {
  // f(theta + s e) = f + sin(s) df + (1 - cos s) d2f for one Pauli-rotation angle.
  std::mt19937_64 rng(6);
  const AnsatzLayout layout = build_ansatz(3, 3);
  const PauliObservable obs = PauliObservable::cyclic_xyz(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ParameterVectord theta = random_theta(layout, rng);
    const DerivativeTarget g = random_target(Component::Gradient, layout, rng);
    const DerivativeTarget d2 = DerivativeTarget::diag_hessian(g.first());
    const double f = circuit_function(layout, theta, NoNoise{}, obs);
    const double df = exact_derivative(g, layout, theta, NoNoise{}, obs);
    const double ddf = exact_derivative(d2, layout, theta, NoNoise{}, obs);
    const Eigen::Index i = layout.index(g.first());
    for (double s : {0.3, -1.2, 2.5}) {
      EXPECT_NEAR(f_at(layout, theta, i, s, i, 0, obs), f + std::sin(s) * df + (1 - std::cos(s)) * ddf,
                  1e-9);
    }
  }
}

TEST(FiniteDifference, SincLaw) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 3;
    const AnsatzLayout layout = build_ansatz(n, 2);
    const ParameterVectord theta = random_theta(layout, rng);
    const PauliObservable obs = PauliObservable::cyclic_xyz(n);
    const double eps = 0.05 + 0.1 * trial;
    const double s = oracle_sinc(eps / 2);
    const auto g = random_target(Component::Gradient, layout, rng);
    const auto d2 = DerivativeTarget::diag_hessian(g.first());
    EXPECT_NEAR(expected_estimate(EstimatorSpec::fd(eps, g), layout, theta, NoNoise{}, obs),
                s * exact_derivative(g, layout, theta, NoNoise{}, obs), 1e-9);
    EXPECT_NEAR(expected_estimate(EstimatorSpec::fd(eps, d2), layout, theta, NoNoise{}, obs),
                s * s * exact_derivative(d2, layout, theta, NoNoise{}, obs), 1e-9);
    const auto off = random_target(Component::OffDiagHessian, layout, rng);
    EXPECT_NEAR(expected_estimate(EstimatorSpec::fd(eps, off), layout, theta, NoNoise{}, obs),
                s * s * exact_derivative(off, layout, theta, NoNoise{}, obs), 1e-9);
  }
}

TEST(ScaledShift, ExpectationIsScaled) {
  std::mt19937_64 rng(8);
  const AnsatzLayout layout = build_ansatz(3, 2);
  const PauliObservable obs = PauliObservable::cyclic_xyz(3);
  const ParameterVectord theta = random_theta(layout, rng);
  for (Component c : kAllComponents) {
    const auto t = random_target(c, layout, rng);
    EXPECT_NEAR(expected_estimate(EstimatorSpec::sps(0.8, t), layout, theta, NoNoise{}, obs),
                0.8 * exact_derivative(t, layout, theta, NoNoise{}, obs), 1e-14);
  }
}

TEST(ScaledShift, UnitScaleEqualsPs) {
  std::mt19937_64 rng(9);
  const AnsatzLayout layout = build_ansatz(3, 2);
  const PauliObservable obs = PauliObservable::cyclic_xyz(3);
  const ParameterVectord theta = random_theta(layout, rng);
  const NoiseModel noise = CnotDepolarizing{0.02};
  for (Component c : kAllComponents) {
    const auto t = random_target(c, layout, rng);
    const ShotBudget b = shot_allocation(c, 960);
    const Substream s(77);
    EXPECT_EQ(estimate_derivative(EstimatorSpec::sps(1.0, t), layout, theta, noise, obs, b, s),
              estimate_derivative(EstimatorSpec::ps(t), layout, theta, noise, obs, b, s));
  }
}

TEST(FiniteShot, MeanAndVariance) {
  // Unbiased around the infinite-shot mean; variance sum_k w_k^2 (1 - f_k^2) / shots.
  std::mt19937_64 rng(10);
  const AnsatzLayout layout = build_ansatz(2, 2);
  const PauliObservable obs = PauliObservable::cyclic_xyz(2);
  const ParameterVectord theta = random_theta(layout, rng);
  const NoiseModel noise = CnotDepolarizing{0.05};
  const auto target = DerivativeTarget::diag_hessian({1, 0, 1});
  for (const EstimatorSpec& spec : {EstimatorSpec::ps(target), EstimatorSpec::sps(0.7, target),
                                    EstimatorSpec::fd(0.4, target)}) {
    const ShotBudget b = shot_allocation(Component::DiagHessian, 300);
    const Stencil st = make_stencil(spec, layout);
    ASSERT_EQ(st.points.size(), 3u);
    double var = 0;
    for (std::size_t k = 0; k < st.points.size(); ++k) {
      const double fk = circuit_function(layout, st.shifted(theta, k), noise, obs);
      var += st.points[k].weight * st.points[k].weight * (1 - fk * fk) / b.per_point;
    }
    const int reps = 20000;
    double s = 0, s2 = 0;
    const Substream root(123);
    for (int r = 0; r < reps; ++r) {
      const double x = estimate_derivative(spec, layout, theta, noise, obs, b, root.child(r));
      s += x;
      s2 += x * x;
    }
    const double mean = s / reps;
    const double sample_var = s2 / reps - mean * mean;
    EXPECT_NEAR(mean, expected_estimate(spec, layout, theta, noise, obs), 4 * std::sqrt(var / reps));
    EXPECT_NEAR(sample_var / var, 1.0, 0.06);
  }
}

TEST(Stencil, ShiftsAndWeights) {
  const AnsatzLayout layout = build_ansatz(2, 2);
  const auto g = DerivativeTarget::gradient({1, 0, 1});
  const Stencil ps = make_stencil(EstimatorSpec::ps(g), layout);
  ASSERT_EQ(ps.points.size(), 2u);
  EXPECT_DOUBLE_EQ(std::abs(ps.points[0].shifts[0]), std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(std::abs(ps.points[0].weight), 0.5);
  const Stencil fd = make_stencil(EstimatorSpec::fd(0.2, g), layout);
  EXPECT_DOUBLE_EQ(std::abs(fd.points[0].shifts[0]), 0.1);
  EXPECT_DOUBLE_EQ(std::abs(fd.points[0].weight), 5.0);
  const Stencil off = make_stencil(
      EstimatorSpec::sps(0.5, DerivativeTarget::off_diag_hessian({1, 0, 1}, {1, 1, 1})), layout);
  ASSERT_EQ(off.points.size(), 4u);
  for (const auto& p : off.points) EXPECT_DOUBLE_EQ(std::abs(p.weight), 0.125);
}

TEST(Stencil, RejectsBadParameters) {
  const auto g = DerivativeTarget::gradient({0, 0, 1});
  EXPECT_THROW(EstimatorSpec::sps(0.0, g), std::invalid_argument);
  EXPECT_THROW(EstimatorSpec::fd(-0.1, g), std::invalid_argument);
  EXPECT_THROW(DerivativeTarget::off_diag_hessian({0, 0, 1}, {0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(make_stencil(EstimatorSpec::ps(DerivativeTarget::gradient({4, 0, 1})),
                            build_ansatz(2, 2)),
               std::out_of_range);
}

TEST(Target, ParseAndPrint) {
  const auto g = DerivativeTarget::parse("gradient:1:2");
  EXPECT_EQ(DerivativeTarget::parse("grad:1:2"), g);
  EXPECT_EQ(g.kind(), Component::Gradient);
  EXPECT_EQ(g.first(), (ParameterLocation{1, 0, 1}));
  const auto off = DerivativeTarget::parse("offdiag:1:2:2:2");
  EXPECT_EQ(off.kind(), Component::OffDiagHessian);
  EXPECT_EQ(off.second(), (ParameterLocation{1, 1, 1}));
  const auto d = DerivativeTarget::parse("diag:3:1@1");
  EXPECT_EQ(d.first(), (ParameterLocation{0, 2, 0}));
  for (const char* s : {"gradient:1:2", "diag:3:1@1", "offdiag:1:2:2:2", "offdiag:2:1@3:2:1"}) {
    EXPECT_EQ(DerivativeTarget::parse(s).str(), s);
  }
  for (const char* s : {"hess:1:2", "gradient:0:1", "gradient:1", "diag:1:1@4", "offdiag:1:1:1:1"}) {
    EXPECT_THROW(DerivativeTarget::parse(s), std::invalid_argument) << s;
  }
}

}  // namespace
}  // namespace noisegrad
