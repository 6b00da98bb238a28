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

#include "noisegrad/analytics.hpp"
#include "noisegrad/estimators.hpp"
#include "noisegrad/rng.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace noisegrad {

/// Estimator choice of an experiment. Naive and heuristic schemes resolve
/// their lambda / epsilon per (target, N_T).
struct SchemeChoice {
  enum class Kind { PS, NSPS, HSPS, NFD, HFD, SPS, FD };
  Kind kind = Kind::PS;
  double value = 0.0;  ///< manual lambda (SPS) or epsilon (FD)

  /// "PS", "NSPS", ..., "SPS:0.5", "FD:0.1".
  std::string name() const;
  bool is_fd() const { return kind == Kind::NFD || kind == Kind::HFD || kind == Kind::FD; }
  bool operator==(const SchemeChoice&) const = default;

  static SchemeChoice parse(std::string_view text);
};

std::vector<SchemeChoice> default_schemes();

/// lambda or epsilon of a scheme for a component at N_T (1 for PS); eta is the
/// rate assumed by HSPS / HFD.
double scheme_parameter(const SchemeChoice& scheme, Component c, double d, std::int64_t n_total,
                        double eta);

/// Estimator for a target at N_T.
EstimatorSpec resolve_scheme(const SchemeChoice& scheme, const DerivativeTarget& target, double d,
                             std::int64_t n_total, double eta);

struct ExperimentConfig {
  int qubits = 4;
  int layers = 5;
  AnsatzLayout::Block pattern = AnsatzLayout::default_pattern();
  NoiseModel noise = NoNoise{};
  std::optional<PauliObservable> observable;  ///< default: cyclic X, Y, Z
  std::vector<DerivativeTarget> targets;
  std::vector<std::int64_t> nt_grid;
  int parameter_sets = 200;
  int experiments_per_set = 200;
  std::uint64_t master_seed = 1;
  std::vector<SchemeChoice> schemes = default_schemes();
  int workers = 1;

  AnsatzLayout layout() const { return AnsatzLayout(qubits, layers, pattern); }
  PauliObservable resolved_observable() const;
  double eta_total() const { return total_eta(noise, qubits, layers); }

  /// Throws ConfigError listing every violation.
  void validate() const;
};

/// Default targets: gradient and diagonal Hessian at (qubit 1, layer 2) and
/// the off-diagonal Hessian pairing qubits 1 and 2 of layer 2, all on the
/// second (Y) slot.
std::vector<DerivativeTarget> default_targets(int qubits, int layers);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Haar-random single-qubit blocks in ZYZ coordinates.
ParameterVectord sample_parameter_set(const AnsatzLayout& layout, std::mt19937_64& rng);

/// Noise model used for parameter set `set` (redraws Pauli weights when asked).
NoiseModel noise_for_set(const ExperimentConfig& config, int set);

/// Stream layout of a run rooted at the master seed.
struct RunStreams {
  Substream root;

  explicit RunStreams(std::uint64_t seed) : root(seed) {}
  Substream parameters(int set) const { return root.child(static_cast<std::uint64_t>(set)).child(0); }
  Substream noise(int set) const { return root.child(static_cast<std::uint64_t>(set)).child(1); }
  /// Parent of the per-point streams of one estimate.
  Substream experiment(int set, int experiment, std::size_t target) const {
    return root.child(static_cast<std::uint64_t>(set)).child(2).child(static_cast<std::uint64_t>(experiment)).child(target);
  }
};

struct MseEstimate {
  std::string scheme;
  std::string target;
  Component component = Component::Gradient;
  std::int64_t n_total = 0;
  double param = 1.0;  ///< lambda or epsilon actually used
  double mean = 0.0;
  double std_error = 0.0;
  /// Paired per-set difference to PS at the same target and N_T.
  double diff_vs_ps = 0.0;
  double diff_stderr = 0.0;
};

/// Ensemble averages over the parameter sets of a run.
struct EnsembleStats {
  double mean_f = 0.0;
  double mean_f2 = 0.0;
  double std_error_f = 0.0;
  double std_error_f2 = 0.0;
  /// Mean of the squared true (noiseless) component per target.
  std::vector<double> mean_true2;
  std::vector<double> std_error_true2;
};

struct MonteCarloResult {
  std::vector<MseEstimate> rows;  ///< ordered by target, N_T, scheme
  EnsembleStats ensemble;
  std::vector<Component> target_components;
  double eta_total = 0.0;

  /// Two-design-shaped moments with the measured values substituted.
  TwoDesignMoments measured_moments(double d) const;
  const MseEstimate& find(const std::string& scheme, std::size_t target, std::int64_t n_total) const;
  /// Rows of one scheme and target in grid order.
  std::vector<MseEstimate> series(const std::string& scheme, std::size_t target) const;
};

MonteCarloResult monte_carlo_mse(const ExperimentConfig& config);

struct Crossing {
  double n_star = 0.0;
  double uncertainty = 0.0;
  std::int64_t lower = 0;  ///< last grid point below PS
  std::int64_t upper = 0;  ///< first grid point above PS
};

class NoCrossingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Crossing of `other` with `ps`, interpolated linearly in log N_T between the
/// last point where other - PS is negative beyond its stderr and the first
/// where it is positive beyond its stderr.
Crossing empirical_n_star(const std::vector<MseEstimate>& ps, const std::vector<MseEstimate>& other);

struct DistributionSummary {
  std::vector<double> f_samples;
  std::vector<double> g_samples;
  std::vector<std::uint64_t> weight_hashes;  ///< per set; empty unless Pauli channel
  double var_f = 0.0;
  double var_g = 0.0;
  std::optional<double> r_var;  ///< unset when var_g <= 1e-15
  ErrorRateSummary rates;
  double eta_total = 0.0;
};

DistributionSummary distribution_study(const ExperimentConfig& config);

/// Sample mean and standard error.
struct MeanWithError {
  double mean = 0.0;
  double std_error = 0.0;
};

struct TwoDesignCheck {
  TwoDesignMoments exact;
  MeanWithError f;
  MeanWithError f2;
  MeanWithError grad2;
  MeanWithError hess_diag2;
  std::optional<MeanWithError> hess_off2;  ///< needs two qubits
  int layer = 0;                           ///< zero-based layer of the evaluated gate
};

/// Monte Carlo moments over Haar parameter sets, noiseless, cyclic XYZ
/// observable, at the middle layer ceil(L/2) on the Y slot.
TwoDesignCheck verify_two_design(int n, int layers, int samples, const Substream& stream);

MeanWithError mean_with_error(const std::vector<double>& x);
/// Unbiased sample variance.
double sample_variance(const std::vector<double>& x);

}  // namespace noisegrad
