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

#include "noisegrad/component.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace noisegrad {

/// Circuit-ensemble moments entering the closed-form MSEs. For a unitary
/// two-design with the differentiated gate sandwiched in the bulk these are
/// fixed functions of the dimension d (see two_design_moments); measured
/// ensemble values can be substituted.
struct TwoDesignMoments {
  double d = 2.0;
  double mean_f = 0.0;
  double mean_f2 = 0.0;
  double mean_grad2 = 0.0;
  double mean_hess_diag2 = 0.0;
  double mean_hess_off2 = 0.0;

  double component(Component c) const;
};

TwoDesignMoments two_design_moments(int n);
TwoDesignMoments two_design_moments_for_dim(double d);

/// MSE = finite-copy error + approximation error.
struct MseBreakdown {
  double finite_copy = 0.0;
  double approximation = 0.0;
  double total = 0.0;
};

/// Prefactor of lambda^2 / N_T in the SPS finite-copy error: 1, 9/8, 1.
double sps_variance_factor(Component c);
/// Prefactor of 1 / (N_T eps^k) in the FD finite-copy error: 4, 18, 16.
double fd_variance_factor(Component c);
/// Power of eps in the FD finite-copy error: 2, 4, 4.
int fd_step_power(Component c);

/// sin(x) / x with sinc(0) = 1.
double sinc(double x);

/// Closed-form MSEs for constant error term g and two-design averages.
/// lambda = 1 gives PS.
MseBreakdown mse_sps(Component c, const TwoDesignMoments& m, double lambda, double eta, double g,
                     double n_total);
MseBreakdown mse_sps(Component c, double d, double lambda, double eta, double g, double n_total);
MseBreakdown mse_fd(Component c, const TwoDesignMoments& m, double epsilon, double eta, double g,
                    double n_total);
MseBreakdown mse_fd(Component c, double d, double epsilon, double eta, double g, double n_total);

enum class SchemeFamily { SPS, FD };
enum class Regime { NaiveOpt, HeuristicOpt, Manual };

struct SchemeParams {
  SchemeFamily family = SchemeFamily::SPS;
  double value = 1.0;
  Regime regime = Regime::Manual;
  double eta = 0.0;  ///< rate the heuristic optimization used
};

/// Noiseless-optimal SPS scale (minimizes mse_sps with eta = g = 0).
SchemeParams lambda_opt(Component c, double d, double n_total);

/// Minimizer of the g-free upper bound of mse_sps at error rate eta.
SchemeParams lambda_opt_eta(Component c, double d, double n_total, double eta);

/// Diagnostics of the FD step search.
struct EpsilonSearch {
  double epsilon = 0.0;
  double mse = 0.0;
  /// False if the 512-point scan showed more than one local minimum.
  bool unimodal = true;
};

inline constexpr double kEpsilonMin = 1e-6;
inline constexpr double kEpsilonMax = 6.283185307179586 - 1e-6;

/// Minimizes mse_fd(g = 0) at rate eta over [kEpsilonMin, kEpsilonMax]:
/// 512-point log-spaced scan, then golden-section refinement to 1e-9
/// around the scan minimum.
EpsilonSearch epsilon_search(Component c, double d, double n_total, double eta);

/// Naive (eta unset) or heuristic (eta given) optimal FD step.
SchemeParams epsilon_opt(Component c, double d, double n_total,
                         std::optional<double> eta = std::nullopt);

/// Large-N_T closed form of the noiseless-optimal FD step.
double epsilon_opt_asymptotic(Component c, double d, double n_total);

/// h(d, eta) of the exact NSPS crossover. The constant under the square root
/// is 4 eta^2 (2 - eta)^2.
double crossover_h(double d, double eta);

/// Why a crossover copy number does not exist.
class CrossoverError : public std::runtime_error {
 public:
  enum class Kind {
    NoNoise,         ///< eta = 0: NSPS never loses to PS
    BelowBracket,    ///< naive scheme already worse at the lower bracket
    AboveBracket,    ///< naive scheme still better at the upper bracket
  };
  CrossoverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// N_T at which MSE_NSPS = MSE_PS for g = 0.
double n_star_sps_exact(Component c, double d, double eta);
/// First-order-in-eta form of n_star_sps_exact.
double n_star_sps_small_eta(Component c, double d, double eta);

inline constexpr double kNStarFdLower = 12.0;
inline constexpr double kNStarFdUpper = 1e12;

/// N_T at which MSE_NFD = MSE_PS for g = 0, by bisection on log N_T.
/// Finite at eta = 0 too: the noiseless NFD error decays like N_T^(-2/3).
double n_star_fd(Component c, double d, double eta);

/// Large-N_T MSE floor of PS, NSPS, NFD and HFD: moment * eta^2.
double noise_bias(Component c, double d, double eta);

}  // namespace noisegrad
