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

#include "noisegrad/invariants.hpp"

#include "noisegrad/analytics.hpp"
#include "noisegrad/harness.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace noisegrad {

namespace {

using Check = std::function<std::string(std::mt19937_64&)>;

Component random_component(std::mt19937_64& rng) {
  return kAllComponents[std::uniform_int_distribution<int>(0, 2)(rng)];
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

// Each check returns an empty string on success or a failure description.

std::string lambda_stationarity(std::mt19937_64& rng, double scale) {
  for (int i = 0; i < 200; ++i) {
    const Component c = random_component(rng);
    const double d = std::ldexp(1.0, std::uniform_int_distribution<int>(1, 8)(rng));
    const double n = log_uniform(rng, 1.0, 1e8);
    const double eta = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    for (int heuristic = 0; heuristic < 2; ++heuristic) {
      const double e = heuristic ? eta : 0.0;
      const double lam = scale * (heuristic ? lambda_opt_eta(c, d, n, e).value : lambda_opt(c, d, n).value);
      auto m = [&](double l) { return mse_sps(c, d, l, e, 0.0, n).total; };
      // Exact for a quadratic: one-sided three-point derivative.
      const double h = 0.5;
      const double slope = (-3.0 * m(lam) + 4.0 * m(lam + h) - m(lam + 2 * h)) / (2 * h);
      const double ref = 2.0 * (1.0 - e) * two_design_moments_for_dim(d).component(c);
      if (std::abs(slope) > 1e-9 * ref) {
        return fmt::format("{} d={} N_T={:.6g} eta={:.6g}: dMSE/dlambda={:.3g} at lambda={:.12g}",
                           to_string(c), d, n, e, slope, lam);
      }
      const double best = m(lam);
      const double top = std::max(2.0, 3.0 * lam);
      for (int k = 1; k <= 10000; ++k) {
        const double l = top * k / 10000.0;
        if (m(l) < best * (1.0 - 1e-12)) {
          return fmt::format("{} d={} N_T={:.6g}: grid lambda={:.6g} beats lambda_opt", to_string(c), d, n, l);
        }
      }
    }
  }
  return "";
}

std::string quadratic_structure(std::mt19937_64& rng) {
  for (int i = 0; i < 50; ++i) {
    const Component c = random_component(rng);
    const double d = std::ldexp(1.0, std::uniform_int_distribution<int>(1, 6)(rng));
    const double n = log_uniform(rng, 10.0, 1e6);
    const double eta = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    auto m = [&](double l) { return mse_sps(c, d, l, eta, 0.0, n).total; };
    const double m0 = m(0.5), m1 = m(1.0), m2 = m(1.5);
    for (int k = 1; k <= 100; ++k) {
      const double l = 0.03 * k;
      const double t = (l - 1.0) / 0.5;
      const double fit = m1 + t * (m2 - m0) / 2.0 + t * t * (m2 - 2.0 * m1 + m0) / 2.0;
      if (std::abs(fit - m(l)) > 1e-12 * std::max(1.0, std::abs(m(l)))) {
        return fmt::format("parabola through 3 points misses MSE at lambda={}", l);
      }
    }
  }
  return "";
}

std::string n_star_roots(std::mt19937_64& rng) {
  for (int i = 0; i < 100; ++i) {
    const Component c = random_component(rng);
    const double d = std::ldexp(1.0, std::uniform_int_distribution<int>(1, 8)(rng));
    const double eta = log_uniform(rng, 1e-3, 0.9);
    const double ns = n_star_sps_exact(c, d, eta);
    auto gap = [&](double n) {
      return mse_sps(c, d, lambda_opt(c, d, n).value, eta, 0.0, n).total - mse_sps(c, d, 1.0, eta, 0.0, n).total;
    };
    const double ps = mse_sps(c, d, 1.0, eta, 0.0, ns).total;
    if (std::abs(gap(ns)) > 1e-9 * ps) return fmt::format("residual at N*={:.10g}", ns);
    if (ns * 0.9 >= 1.0 && !(gap(ns * 0.9) < 0.0)) return "NSPS not below PS just under N*";
    if (!(gap(ns * 1.1) > 0.0)) return "NSPS not above PS just over N*";
  }
  for (Component c : kAllComponents) {
    const double ratio = n_star_sps_small_eta(c, 16.0, 1e-4) / n_star_sps_exact(c, 16.0, 1e-4);
    if (std::abs(ratio - 1.0) > 5e-3) return fmt::format("small-eta ratio {} at eta=1e-4", ratio);
  }
  for (double d : {2.0, 16.0, 256.0}) {
    if (std::abs(crossover_h(d, 1e-12) / (2 * d) - 1.0) > 1e-6) return "h(d, 0) != 2d";
  }
  return "";
}

std::string epsilon_asymptotics(std::mt19937_64&) {
  for (double d : {4.0, 16.0}) {
    for (Component c : kAllComponents) {
      const double num = epsilon_opt(c, d, 1e12).value;
      const double asym = epsilon_opt_asymptotic(c, d, 1e12);
      if (std::abs(num / asym - 1.0) > 0.01) {
        return fmt::format("{} d={}: numeric {:.6g} vs asymptotic {:.6g}", to_string(c), d, num, asym);
      }
    }
  }
  return "";
}

std::string sps_noiseless_scaling(std::mt19937_64&) {
  const double limits[] = {1.0, 9.0 / 8.0, 2.0};
  const double d = std::ldexp(1.0, 20);
  for (Component c : kAllComponents) {
    const double v = n_star_sps_small_eta(c, d, 0.01) * 0.01 / d;
    if (std::abs(v - limits[static_cast<int>(c)]) > 1e-3 * limits[static_cast<int>(c)]) {
      return fmt::format("{}: N* eta / d = {}", to_string(c), v);
    }
  }
  return "";
}

std::string hsps_bias_vanishes(std::mt19937_64&) {
  const double d = 16.0, eta = 0.226;
  for (Component c : kAllComponents) {
    double previous = INFINITY;
    double last = 0.0;
    for (int k = 2; k <= 9; ++k) {
      const double n = std::pow(10.0, k);
      last = mse_sps(c, d, lambda_opt_eta(c, d, n, eta).value, eta, 0.0, n).total;
      if (!(last < previous)) return fmt::format("{}: HSPS MSE not decreasing at N_T=1e{}", to_string(c), k);
      previous = last;
    }
    if (!(last < 1e-5 * noise_bias(c, d, eta))) {
      return fmt::format("{}: HSPS MSE {:.3g} at N_T=1e9", to_string(c), last);
    }
  }
  return "";
}

std::string fd_sinc_ceiling(std::mt19937_64&) {
  for (double d : {4.0, 16.0}) {
    for (double eta : {0.05, 0.226}) {
      for (Component c : kAllComponents) {
        for (int k = 2; k <= 12; ++k) {
          const double n = std::pow(10.0, k);
          const double eps = epsilon_opt(c, d, n, eta).value;
          const double approx = mse_fd(c, d, eps, eta, 0.0, n).approximation;
          if (approx < noise_bias(c, d, eta) * (1.0 - 1e-9)) {
            return fmt::format("{} d={} eta={} N_T=1e{}: HFD bias below the noise floor", to_string(c), d, eta, k);
          }
        }
      }
    }
  }
  return "";
}

std::string fd_crosses_first(std::mt19937_64&) {
  for (double d : {4.0, 16.0, 64.0}) {
    for (double eta : {0.05, 0.1, 0.25}) {
      for (Component c : kAllComponents) {
        if (!(n_star_fd(c, d, eta) < n_star_sps_exact(c, d, eta))) {
          return fmt::format("{} d={} eta={}: N*_FD >= N*_SPS", to_string(c), d, eta);
        }
      }
    }
  }
  return "";
}

std::string two_design(std::mt19937_64& rng) {
  for (int n : {2, 3}) {
    const TwoDesignCheck t = verify_two_design(n, 6, 5000, Substream(rng()));
    if (std::abs(t.f.mean) > 3 * t.f.std_error) return fmt::format("n={}: <f> = {}", n, t.f.mean);
    if (std::abs(t.f2.mean - t.exact.mean_f2) > 3 * t.f2.std_error) {
      return fmt::format("n={}: <f^2> = {} vs {}", n, t.f2.mean, t.exact.mean_f2);
    }
    const auto close = [](double a, double b) { return std::abs(a / b - 1.0) <= 0.1; };
    if (!close(t.grad2.mean, t.exact.mean_grad2) || !close(t.hess_diag2.mean, t.exact.mean_hess_diag2) ||
        !close(t.hess_off2->mean, t.exact.mean_hess_off2)) {
      return fmt::format("n={}: derivative moments {:.4g} {:.4g} {:.4g}", n, t.grad2.mean,
                         t.hess_diag2.mean, t.hess_off2->mean);
    }
  }
  return "";
}

std::string estimator_exactness(std::mt19937_64& rng) {
  const NoiseModel none = NoNoise{};
  for (int i = 0; i < 10; ++i) {
    const int n = 1 + i % 3;
    const AnsatzLayout layout(n, 2);
    const PauliObservable obs = PauliObservable::cyclic_xyz(n);
    const ParameterVectord theta = sample_parameter_set(layout, rng);
    const ParameterLocation loc{1, n - 1, 1};
    const auto grad = DerivativeTarget::gradient(loc);
    const auto diag = DerivativeTarget::diag_hessian(loc);
    const double g = exact_derivative(grad, layout, theta, none, obs);
    const double h = exact_derivative(diag, layout, theta, none, obs);
    const Eigen::Index p = layout.index(loc);
    auto f_at = [&](double shift) {
      ParameterVectord t = theta;
      t(p) += shift;
      return circuit_function(layout, t, none, obs);
    };
    if (std::abs((f_at(5e-7) - f_at(-5e-7)) / 1e-6 - g) > 1e-6) return "PS gradient vs central difference";
    const double eps = 0.3;
    const double fd_g = expected_estimate(EstimatorSpec::fd(eps, grad), layout, theta, none, obs);
    const double fd_h = expected_estimate(EstimatorSpec::fd(eps, diag), layout, theta, none, obs);
    if (std::abs(fd_g - sinc(eps / 2) * g) > 1e-9 || std::abs(fd_h - sinc(eps / 2) * sinc(eps / 2) * h) > 1e-9) {
      return "FD infinite-shot mean violates the sinc law";
    }
    const double t0 = 1.234;
    if (std::abs(f_at(t0) - (f_at(0) + std::sin(t0) * g + (1 - std::cos(t0)) * h)) > 1e-9) {
      return "shift expansion f + sin * df + (1 - cos) * ddf";
    }
  }
  return "";
}

std::string global_plateau(std::mt19937_64& rng) {
  ExperimentConfig config;
  config.qubits = 2;
  config.layers = 3;
  config.noise = GlobalDepolarizing{0.226};
  config.targets = {DerivativeTarget::gradient({1, 0, 1})};
  config.nt_grid = {96000000};
  config.parameter_sets = 30;
  config.experiments_per_set = 10;
  config.master_seed = rng();
  const MonteCarloResult r = monte_carlo_mse(config);
  const double floor = r.ensemble.mean_true2[0] * 0.226 * 0.226;
  for (const char* s : {"PS", "NSPS", "NFD", "HFD"}) {
    const double v = r.find(s, 0, 96000000).mean;
    if (std::abs(v / floor - 1.0) > 0.05) return fmt::format("{} plateau {:.4g} vs floor {:.4g}", s, v, floor);
  }
  if (!(r.find("HSPS", 0, 96000000).mean < 0.2 * floor)) return "HSPS not below 20% of the noise floor";
  return "";
}

}  // namespace

std::vector<InvariantResult> run_invariants(const VerifyOptions& options) {
  std::vector<std::pair<std::string, Check>> checks = {
      {"lambda_stationarity", [&](std::mt19937_64& r) { return lambda_stationarity(r, options.lambda_scale); }},
      {"quadratic_structure", quadratic_structure},
      {"n_star_roots", n_star_roots},
      {"epsilon_asymptotics", epsilon_asymptotics},
      {"sps_noiseless_scaling", sps_noiseless_scaling},
      {"hsps_bias_vanishes", hsps_bias_vanishes},
      {"fd_sinc_ceiling", fd_sinc_ceiling},
      {"fd_crosses_first", fd_crosses_first},
  };
  if (!options.quick) {
    checks.emplace_back("two_design_moments", two_design);
    checks.emplace_back("estimator_exactness", estimator_exactness);
    checks.emplace_back("global_noise_plateau", global_plateau);
  }
  std::vector<InvariantResult> results;
  std::uint64_t index = 0;
  for (const auto& [name, check] : checks) {
    std::mt19937_64 rng(Substream(options.seed).child(index++).key());
    const auto start = std::chrono::steady_clock::now();
    InvariantResult r;
    r.name = name;
    try {
      r.detail = check(rng);
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace noisegrad
