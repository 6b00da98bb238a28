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

#include "noisegrad/analytics.hpp"

#include "noisegrad/optimize.hpp"

#include <array>
#include <cmath>
#include <string>

namespace noisegrad {

namespace {

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in [0, 1)");
}

void check_n_total(double n_total) {
  if (!(n_total >= 1.0)) throw std::invalid_argument("N_T must be >= 1");
}

void check_dim(double d) {
  if (!(d >= 2.0)) throw std::invalid_argument("dimension d must be >= 2");
}

/// Shot-noise bracket 1 - (1-eta)^2 <f^2> - eta^2 g^2.
double shot_variance(const TwoDesignMoments& m, double eta, double g) {
  const double u = 1.0 - eta;
  return 1.0 - u * u * m.mean_f2 - eta * eta * g * g;
}

}  // namespace

double TwoDesignMoments::component(Component c) const {
  switch (c) {
    case Component::Gradient: return mean_grad2;
    case Component::DiagHessian: return mean_hess_diag2;
    case Component::OffDiagHessian: return mean_hess_off2;
  }
  return 0.0;
}

TwoDesignMoments two_design_moments_for_dim(double d) {
  check_dim(d);
  TwoDesignMoments m;
  m.d = d;
  m.mean_f = 0.0;
  m.mean_f2 = 1.0 / (d + 1.0);
  const double dm1 = d * d - 1.0;
  m.mean_grad2 = d * d / (2.0 * (d + 1.0) * dm1);
  m.mean_hess_diag2 = m.mean_grad2;
  m.mean_hess_off2 = d * d * d * d / (4.0 * (d + 1.0) * dm1 * dm1);
  return m;
}

TwoDesignMoments two_design_moments(int n) {
  if (n < 1 || n > 60) throw std::invalid_argument("qubit count must lie in [1, 60]");
  return two_design_moments_for_dim(std::ldexp(1.0, n));
}

double sps_variance_factor(Component c) {
  return c == Component::DiagHessian ? 9.0 / 8.0 : 1.0;
}

double fd_variance_factor(Component c) {
  switch (c) {
    case Component::Gradient: return 4.0;
    case Component::DiagHessian: return 18.0;
    case Component::OffDiagHessian: return 16.0;
  }
  return 0.0;
}

int fd_step_power(Component c) { return c == Component::Gradient ? 2 : 4; }

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

MseBreakdown mse_sps(Component c, const TwoDesignMoments& m, double lambda, double eta, double g,
                     double n_total) {
  check_eta(eta);
  check_n_total(n_total);
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(g >= -1.0 && g <= 1.0)) throw std::invalid_argument("g must lie in [-1, 1]");
  MseBreakdown r;
  r.finite_copy = sps_variance_factor(c) * lambda * lambda / n_total * shot_variance(m, eta, g);
  const double bias = 1.0 - (1.0 - eta) * lambda;
  r.approximation = bias * bias * m.component(c);
  r.total = r.finite_copy + r.approximation;
  return r;
}

MseBreakdown mse_sps(Component c, double d, double lambda, double eta, double g, double n_total) {
  return mse_sps(c, two_design_moments_for_dim(d), lambda, eta, g, n_total);
}

MseBreakdown mse_fd(Component c, const TwoDesignMoments& m, double epsilon, double eta, double g,
                    double n_total) {
  check_eta(eta);
  check_n_total(n_total);
  if (!(epsilon > 0.0 && epsilon < 2.0 * 3.141592653589793)) {
    throw std::invalid_argument("epsilon must lie in (0, 2 pi)");
  }
  if (!(g >= -1.0 && g <= 1.0)) throw std::invalid_argument("g must lie in [-1, 1]");
  MseBreakdown r;
  r.finite_copy = fd_variance_factor(c) / (n_total * std::pow(epsilon, fd_step_power(c))) *
                  shot_variance(m, eta, g);
  const double s = sinc(epsilon / 2.0);
  const double shrink = (c == Component::Gradient) ? s : s * s;
  const double bias = 1.0 - (1.0 - eta) * shrink;
  r.approximation = bias * bias * m.component(c);
  r.total = r.finite_copy + r.approximation;
  return r;
}

MseBreakdown mse_fd(Component c, double d, double epsilon, double eta, double g, double n_total) {
  return mse_fd(c, two_design_moments_for_dim(d), epsilon, eta, g, n_total);
}

SchemeParams lambda_opt(Component c, double d, double n_total) {
  check_dim(d);
  check_n_total(n_total);
  const double dn = d * n_total;
  double value = 1.0;
  switch (c) {
    case Component::Gradient:
      value = dn / (2.0 * d * d + dn - 2.0);
      break;
    case Component::DiagHessian:
      value = 4.0 * dn / (9.0 * d * d + 4.0 * dn - 9.0);
      break;
    case Component::OffDiagHessian: {
      const double dm1 = d * d - 1.0;
      const double d3n = d * d * dn;
      value = d3n / (4.0 * dm1 * dm1 + d3n);
      break;
    }
  }
  return {SchemeFamily::SPS, value, Regime::NaiveOpt, 0.0};
}

SchemeParams lambda_opt_eta(Component c, double d, double n_total, double eta) {
  check_dim(d);
  check_n_total(n_total);
  check_eta(eta);
  const double dn = d * n_total;
  const double u = 1.0 - eta;
  const double k = eta * (2.0 - eta);
  double value = 1.0;
  switch (c) {
    case Component::Gradient:
      value = dn * u / (2.0 * d * d + dn - 2.0 + k * (2.0 * d - dn - 2.0 / d));
      break;
    case Component::DiagHessian:
      value = 4.0 * dn * u / (9.0 * d * d + 4.0 * dn - 9.0 + k * (9.0 * d - 4.0 * dn - 9.0 / d));
      break;
    case Component::OffDiagHessian: {
      const double dm1 = d * d - 1.0;
      const double d3n = d * d * dn;
      value = d3n * u / (4.0 * dm1 * dm1 + d3n + k * (4.0 / d * dm1 * dm1 - d3n));
      break;
    }
  }
  return {SchemeFamily::SPS, value, Regime::HeuristicOpt, eta};
}

EpsilonSearch epsilon_search(Component c, double d, double n_total, double eta) {
  const TwoDesignMoments m = two_design_moments_for_dim(d);
  check_eta(eta);
  check_n_total(n_total);
  auto f = [&](double eps) { return mse_fd(c, m, eps, eta, 0.0, n_total).total; };

  constexpr int kScan = 512;
  std::array<double, kScan> xs{};
  std::array<double, kScan> ys{};
  const double log_lo = std::log(kEpsilonMin);
  const double log_hi = std::log(kEpsilonMax);
  int best = 0;
  for (int i = 0; i < kScan; ++i) {
    xs[i] = (i == kScan - 1) ? kEpsilonMax : std::exp(log_lo + (log_hi - log_lo) * i / (kScan - 1));
    ys[i] = f(xs[i]);
    if (ys[i] < ys[best]) best = i;
  }
  int local_minima = 0;
  for (int i = 1; i + 1 < kScan; ++i) {
    if (ys[i] < ys[i - 1] && ys[i] <= ys[i + 1]) ++local_minima;
  }

  EpsilonSearch out;
  out.unimodal = local_minima <= 1;
  const double a = xs[static_cast<std::size_t>(std::max(best - 1, 0))];
  const double b = xs[static_cast<std::size_t>(std::min(best + 1, kScan - 1))];
  const double refined = golden_section_minimize(f, a, b, 1e-9);
  const double fr = f(refined);
  if (fr <= ys[best]) {
    out.epsilon = refined;
    out.mse = fr;
  } else {
    out.epsilon = xs[best];
    out.mse = ys[best];
  }
  return out;
}

SchemeParams epsilon_opt(Component c, double d, double n_total, std::optional<double> eta) {
  const EpsilonSearch s = epsilon_search(c, d, n_total, eta.value_or(0.0));
  return {SchemeFamily::FD, s.epsilon, eta ? Regime::HeuristicOpt : Regime::NaiveOpt, eta.value_or(0.0)};
}

double epsilon_opt_asymptotic(Component c, double d, double n_total) {
  check_n_total(n_total);
  const TwoDesignMoments m = two_design_moments_for_dim(d);
  const double base = d / (m.component(c) * n_total * (d + 1.0));
  switch (c) {
    case Component::Gradient: return std::pow(1152.0 * base, 1.0 / 6.0);
    case Component::DiagHessian: return std::pow(2592.0 * base, 1.0 / 8.0);
    case Component::OffDiagHessian: return std::pow(2304.0 * base, 1.0 / 8.0);
  }
  return 0.0;
}

double crossover_h(double d, double eta) {
  const double e = eta;
  const double root = std::sqrt(4.0 * e * e * (2.0 - e) * (2.0 - e) +
                                4.0 * d * e * (2.0 + e * (1.0 - e) * (3.0 - e)) +
                                d * d * (1.0 + e * (8.0 - 6.0 * e + e * e * e)));
  return d + 4.0 * e + e * e * (d - 2.0) + root;
}

double n_star_sps_exact(Component c, double d, double eta) {
  check_dim(d);
  check_eta(eta);
  if (eta == 0.0) {
    throw CrossoverError(CrossoverError::Kind::NoNoise, "no crossover without noise: N* is infinite");
  }
  const double h = crossover_h(d, eta);
  const double dm1 = d * d - 1.0;
  const double denom = eta * (1.0 - eta);
  double n_star = 0.0;
  switch (c) {
    case Component::Gradient:
      n_star = dm1 * h / (2.0 * d * d * denom);
      break;
    case Component::DiagHessian:
      n_star = 9.0 * dm1 * h / (16.0 * d * d * denom);
      break;
    case Component::OffDiagHessian:
      n_star = dm1 * dm1 * h / (d * d * d * d * denom);
      break;
  }
  const double naive = mse_sps(c, d, lambda_opt(c, d, n_star).value, eta, 0.0, n_star).total;
  const double ps = mse_sps(c, d, 1.0, eta, 0.0, n_star).total;
  if (std::abs(naive - ps) > 1e-9 * ps) {
    throw std::logic_error("NSPS crossover residual above 1e-9 at d=" + std::to_string(d) +
                           ", eta=" + std::to_string(eta));
  }
  return n_star;
}

double n_star_sps_small_eta(Component c, double d, double eta) {
  check_dim(d);
  check_eta(eta);
  if (eta == 0.0) {
    throw CrossoverError(CrossoverError::Kind::NoNoise, "no crossover without noise: N* is infinite");
  }
  const double dm1 = d * d - 1.0;
  switch (c) {
    case Component::Gradient: return dm1 / (d * eta);
    case Component::DiagHessian: return 9.0 * dm1 / (8.0 * d * eta);
    case Component::OffDiagHessian: return 2.0 * dm1 * dm1 / (d * d * d * eta);
  }
  return 0.0;
}

double n_star_fd(Component c, double d, double eta) {
  check_dim(d);
  check_eta(eta);
  const TwoDesignMoments m = two_design_moments_for_dim(d);
  // Relative MSE gap NFD - PS at N_T = exp(log_n).
  auto gap = [&](double log_n) {
    const double n = std::exp(log_n);
    const double eps = epsilon_search(c, d, n, 0.0).epsilon;
    const double ps = mse_sps(c, m, 1.0, eta, 0.0, n).total;
    return (mse_fd(c, m, eps, eta, 0.0, n).total - ps) / ps;
  };
  const double lo = std::log(kNStarFdLower);
  const double hi = std::log(kNStarFdUpper);
  if (gap(lo) >= 0.0) {
    throw CrossoverError(CrossoverError::Kind::BelowBracket,
                         "NFD is not better than PS at the lower bracket N_T = 12");
  }
  if (gap(hi) < 0.0) {
    throw CrossoverError(CrossoverError::Kind::AboveBracket,
                         "NFD still beats PS at the upper bracket N_T = 1e12");
  }
  const double root = bisect_root(gap, lo, hi, 1e-13);
  return std::exp(root);
}

double noise_bias(Component c, double d, double eta) {
  check_eta(eta);
  return two_design_moments_for_dim(d).component(c) * eta * eta;
}

}  // namespace noisegrad
