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

#include "noisegrad/harness.hpp"

#include "noisegrad/error_term.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace noisegrad {

namespace {

/// Runs fn(i) for i in [0, count) on `workers` threads. The first exception
/// thrown by any task is rethrown after all threads join.
template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string SchemeChoice::name() const {
  switch (kind) {
    case Kind::PS: return "PS";
    case Kind::NSPS: return "NSPS";
    case Kind::HSPS: return "HSPS";
    case Kind::NFD: return "NFD";
    case Kind::HFD: return "HFD";
    case Kind::SPS: return "SPS:" + format_value(value);
    case Kind::FD: return "FD:" + format_value(value);
  }
  return "?";
}

SchemeChoice SchemeChoice::parse(std::string_view text) {
  if (text == "PS") return {Kind::PS, 0.0};
  if (text == "NSPS") return {Kind::NSPS, 0.0};
  if (text == "HSPS") return {Kind::HSPS, 0.0};
  if (text == "NFD") return {Kind::NFD, 0.0};
  if (text == "HFD") return {Kind::HFD, 0.0};
  const auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    const std::string_view head = text.substr(0, colon);
    const std::string value_text(text.substr(colon + 1));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == value_text.size() && used > 0) {
      if (head == "SPS") {
        if (!(std::isfinite(v) && v > 0.0)) throw std::invalid_argument("SPS lambda must be positive");
        return {Kind::SPS, v};
      }
      if (head == "FD") {
        if (!(v > 0.0 && v < 2.0 * std::numbers::pi)) {
          throw std::invalid_argument("FD epsilon must lie in (0, 2 pi)");
        }
        return {Kind::FD, v};
      }
    }
  }
  throw std::invalid_argument("unknown scheme '" + std::string(text) +
                              "' (PS, NSPS, HSPS, NFD, HFD, SPS:<lambda>, FD:<epsilon>)");
}

std::vector<SchemeChoice> default_schemes() {
  using K = SchemeChoice::Kind;
  return {{K::PS, 0.0}, {K::NSPS, 0.0}, {K::NFD, 0.0}, {K::HSPS, 0.0}, {K::HFD, 0.0}};
}

double scheme_parameter(const SchemeChoice& scheme, Component c, double d, std::int64_t n_total,
                        double eta) {
  const auto n = static_cast<double>(n_total);
  using K = SchemeChoice::Kind;
  switch (scheme.kind) {
    case K::PS: return 1.0;
    case K::NSPS: return lambda_opt(c, d, n).value;
    case K::HSPS: return lambda_opt_eta(c, d, n, eta).value;
    case K::NFD: return epsilon_opt(c, d, n).value;
    case K::HFD: return epsilon_opt(c, d, n, eta).value;
    case K::SPS:
    case K::FD: return scheme.value;
  }
  throw std::logic_error("unhandled scheme");
}

EstimatorSpec resolve_scheme(const SchemeChoice& scheme, const DerivativeTarget& target, double d,
                             std::int64_t n_total, double eta) {
  const double v = scheme_parameter(scheme, target.kind(), d, n_total, eta);
  if (scheme.kind == SchemeChoice::Kind::PS) return EstimatorSpec::ps(target);
  return scheme.is_fd() ? EstimatorSpec::fd(v, target) : EstimatorSpec::sps(v, target);
}

std::vector<DerivativeTarget> default_targets(int qubits, int layers) {
  const int l = std::min(1, layers - 1);
  std::vector<DerivativeTarget> t = {DerivativeTarget::gradient({l, 0, 1}),
                                     DerivativeTarget::diag_hessian({l, 0, 1})};
  if (qubits >= 2) t.push_back(DerivativeTarget::off_diag_hessian({l, 0, 1}, {l, 1, 1}));
  return t;
}

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string s = "invalid configuration:";
  for (const auto& p : problems) s += "\n  " + p;
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

PauliObservable ExperimentConfig::resolved_observable() const {
  return observable ? *observable : PauliObservable::cyclic_xyz(qubits);
}

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  if (qubits < 1 || qubits > 12) {
    problems.push_back("circuit.qubits: " + std::to_string(qubits) + " outside [1, 12]");
  }
  if (layers < 1) problems.push_back("circuit.layers: " + std::to_string(layers) + " must be >= 1");
  try {
    noisegrad::validate(noise);
  } catch (const std::exception& e) {
    problems.push_back(std::string("noise: ") + e.what());
  }
  if (observable && observable->size() != qubits) {
    problems.push_back("circuit.observable: " + std::to_string(observable->size()) +
                       " letters for " + std::to_string(qubits) + " qubits");
  }
  if (targets.empty()) problems.push_back("targets.list: no derivative targets");
  if (problems.empty()) {
    const AnsatzLayout lay = layout();
    for (std::size_t i = 0; i < targets.size(); ++i) {
      try {
        targets[i].check(lay);
      } catch (const std::exception& e) {
        problems.push_back("targets.list[" + std::to_string(i) + "]: " + e.what());
      }
    }
  }
  if (nt_grid.empty()) problems.push_back("sampling.n_total: empty copy-number grid");
  for (std::size_t i = 0; i < nt_grid.size(); ++i) {
    const std::int64_t n = nt_grid[i];
    if (n % 12 != 0) {
      problems.push_back("sampling.n_total[" + std::to_string(i) + "]: " + std::to_string(n) +
                         " is not a multiple of 12, so the 2-, 3- and 4-point splits would discard copies");
    } else if (n < 48) {
      problems.push_back("sampling.n_total[" + std::to_string(i) + "]: " + std::to_string(n) +
                         " below the minimum of 48");
    }
  }
  if (parameter_sets < 1) problems.push_back("sampling.parameter_sets: must be >= 1");
  if (experiments_per_set < 1) problems.push_back("sampling.experiments_per_set: must be >= 1");
  if (workers < 1) problems.push_back("sampling.workers: must be >= 1");
  if (schemes.empty()) problems.push_back("sampling.schemes: no estimator schemes");
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

ParameterVectord sample_parameter_set(const AnsatzLayout& layout, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  ParameterVectord theta(layout.parameter_count());
  for (Eigen::Index block = 0; block < theta.size() / kSlotsPerBlock; ++block) {
    const double alpha = two_pi * unit(rng);
    const double beta = std::acos(1.0 - 2.0 * unit(rng));
    const double gamma = two_pi * unit(rng);
    theta(block * kSlotsPerBlock + 0) = alpha;
    theta(block * kSlotsPerBlock + 1) = beta;
    theta(block * kSlotsPerBlock + 2) = gamma;
  }
  return theta;
}

NoiseModel noise_for_set(const ExperimentConfig& config, int set) {
  if (const auto* pc = std::get_if<CnotPauliChannel>(&config.noise); pc && pc->redraw_per_set) {
    std::mt19937_64 rng = RunStreams(config.master_seed).noise(set).engine();
    CnotPauliChannel redrawn = *pc;
    redrawn.weights = random_pauli_weights(pc->eta0(), rng);
    return redrawn;
  }
  return config.noise;
}

MeanWithError mean_with_error(const std::vector<double>& x) {
  MeanWithError r;
  if (x.empty()) return r;
  double sum = 0.0;
  for (double v : x) sum += v;
  r.mean = sum / static_cast<double>(x.size());
  if (x.size() > 1) r.std_error = std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
  return r;
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

// ---------------------------------------------------------------------------
// Monte Carlo MSE

namespace {

struct PlanEntry {
  EstimatorSpec spec;
  Stencil stencil;
  bool shares_ps_points = false;
};

struct SetOutcome {
  double f = 0.0;
  std::vector<double> true2;       // per target
  std::vector<double> mse;         // per (target, grid, scheme)
  std::vector<double> diff_vs_ps;  // per (target, grid, scheme)
};

}  // namespace

TwoDesignMoments MonteCarloResult::measured_moments(double d) const {
  TwoDesignMoments m;
  m.d = d;
  m.mean_f = ensemble.mean_f;
  m.mean_f2 = ensemble.mean_f2;
  std::array<bool, 3> seen{};
  for (std::size_t t = 0; t < target_components.size(); ++t) {
    const auto c = static_cast<std::size_t>(target_components[t]);
    if (seen[c]) continue;
    seen[c] = true;
    switch (target_components[t]) {
      case Component::Gradient: m.mean_grad2 = ensemble.mean_true2[t]; break;
      case Component::DiagHessian: m.mean_hess_diag2 = ensemble.mean_true2[t]; break;
      case Component::OffDiagHessian: m.mean_hess_off2 = ensemble.mean_true2[t]; break;
    }
  }
  return m;
}

namespace {

std::vector<std::string> target_names(const std::vector<MseEstimate>& rows) {
  std::vector<std::string> names;
  for (const auto& r : rows) {
    if (names.empty() || names.back() != r.target) names.push_back(r.target);
  }
  return names;
}

}  // namespace

const MseEstimate& MonteCarloResult::find(const std::string& scheme, std::size_t target,
                                          std::int64_t n_total) const {
  const std::vector<std::string> names = target_names(rows);
  if (target >= names.size()) throw std::out_of_range("target index out of range");
  for (const auto& r : rows) {
    if (r.target == names[target] && r.scheme == scheme && r.n_total == n_total) return r;
  }
  throw std::out_of_range("no MSE row for scheme " + scheme + " at N_T=" + std::to_string(n_total));
}

std::vector<MseEstimate> MonteCarloResult::series(const std::string& scheme, std::size_t target) const {
  const std::vector<std::string> names = target_names(rows);
  if (target >= names.size()) throw std::out_of_range("target index out of range");
  std::vector<MseEstimate> out;
  for (const auto& r : rows) {
    if (r.target == names[target] && r.scheme == scheme) out.push_back(r);
  }
  return out;
}

MonteCarloResult monte_carlo_mse(const ExperimentConfig& config) {
  config.validate();
  const AnsatzLayout layout = config.layout();
  const PauliObservable obs = config.resolved_observable();
  const double d = static_cast<double>(layout.dim());
  const double eta = config.eta_total();
  const RunStreams streams(config.master_seed);
  const NoiseModel noiseless = NoNoise{};

  const std::size_t n_targets = config.targets.size();
  const std::size_t n_grid = config.nt_grid.size();
  const std::size_t n_schemes = config.schemes.size();
  auto slot = [&](std::size_t t, std::size_t g, std::size_t s) { return (t * n_grid + g) * n_schemes + s; };

  // Scheme parameters do not depend on the parameter set.
  std::vector<PlanEntry> plan;
  plan.reserve(n_targets * n_grid * n_schemes);
  std::vector<Stencil> ps_stencils;
  for (std::size_t t = 0; t < n_targets; ++t) {
    const DerivativeTarget& target = config.targets[t];
    ps_stencils.push_back(make_stencil(EstimatorSpec::ps(target), layout));
    for (std::size_t g = 0; g < n_grid; ++g) {
      for (std::size_t s = 0; s < n_schemes; ++s) {
        EstimatorSpec spec = resolve_scheme(config.schemes[s], target, d, config.nt_grid[g], eta);
        Stencil st = make_stencil(spec, layout);
        const bool shares = spec.scheme != Scheme::FD;
        plan.push_back({std::move(spec), std::move(st), shares});
      }
    }
  }

  std::vector<SetOutcome> outcomes(static_cast<std::size_t>(config.parameter_sets));
  parallel_for(config.parameter_sets, config.workers, [&](int set) {
    std::mt19937_64 param_rng = streams.parameters(set).engine();
    const ParameterVectord theta = sample_parameter_set(layout, param_rng);
    const NoiseModel noise = noise_for_set(config, set);

    SetOutcome& out = outcomes[static_cast<std::size_t>(set)];
    out.f = circuit_function(layout, theta, noiseless, obs);
    out.true2.assign(n_targets, 0.0);
    out.mse.assign(plan.size(), 0.0);
    out.diff_vs_ps.assign(plan.size(), 0.0);

    const auto noisy_values = [&](const Stencil& st) {
      std::vector<double> v(st.points.size());
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = circuit_function(layout, st.shifted(theta, k), noise, obs);
      return v;
    };

    for (std::size_t t = 0; t < n_targets; ++t) {
      const DerivativeTarget& target = config.targets[t];
      const double truth = exact_derivative(target, layout, theta, noiseless, obs);
      out.true2[t] = truth * truth;
      const Stencil& ps_st = ps_stencils[t];
      const std::vector<double> ps_exact = noisy_values(ps_st);
      const std::size_t points = ps_st.points.size();

      for (std::size_t g = 0; g < n_grid; ++g) {
        const ShotBudget budget = shot_allocation(target.kind(), config.nt_grid[g]);
        std::vector<std::vector<double>> fd_exact(n_schemes);
        for (std::size_t s = 0; s < n_schemes; ++s) {
          const PlanEntry& e = plan[slot(t, g, s)];
          if (!e.shares_ps_points) fd_exact[s] = noisy_values(e.stencil);
        }
        std::vector<double> sum_sq(n_schemes, 0.0);
        std::vector<double> sum_diff(n_schemes, 0.0);
        std::vector<double> hats(points);
        std::vector<double> fd_hats(points);
        for (int ex = 0; ex < config.experiments_per_set; ++ex) {
          const Substream parent = streams.experiment(set, ex, t);
          for (std::size_t k = 0; k < points; ++k) {
            std::mt19937_64 rng = parent.child(k).engine();
            hats[k] = sample_function(ps_exact[k], budget.per_point, rng);
          }
          const double ps_err = combine(ps_st, hats) - truth;
          const double ps_sq = ps_err * ps_err;
          for (std::size_t s = 0; s < n_schemes; ++s) {
            const PlanEntry& e = plan[slot(t, g, s)];
            double est;
            if (e.shares_ps_points) {
              est = combine(e.stencil, hats);
            } else {
              for (std::size_t k = 0; k < points; ++k) {
                std::mt19937_64 rng = parent.child(k).engine();
                fd_hats[k] = sample_function(fd_exact[s][k], budget.per_point, rng);
              }
              est = combine(e.stencil, fd_hats);
            }
            const double sq = (est - truth) * (est - truth);
            sum_sq[s] += sq;
            sum_diff[s] += sq - ps_sq;
          }
        }
        const double inv = 1.0 / config.experiments_per_set;
        for (std::size_t s = 0; s < n_schemes; ++s) {
          out.mse[slot(t, g, s)] = sum_sq[s] * inv;
          out.diff_vs_ps[slot(t, g, s)] = sum_diff[s] * inv;
        }
      }
    }
  });

  // Ordered reduction over sets.
  MonteCarloResult result;
  result.eta_total = eta;
  for (const auto& t : config.targets) result.target_components.push_back(t.kind());
  const std::size_t sets = outcomes.size();
  std::vector<double> column(sets);
  for (std::size_t i = 0; i < sets; ++i) column[i] = outcomes[i].f;
  MeanWithError mf = mean_with_error(column);
  for (std::size_t i = 0; i < sets; ++i) column[i] = outcomes[i].f * outcomes[i].f;
  MeanWithError mf2 = mean_with_error(column);
  result.ensemble.mean_f = mf.mean;
  result.ensemble.std_error_f = mf.std_error;
  result.ensemble.mean_f2 = mf2.mean;
  result.ensemble.std_error_f2 = mf2.std_error;
  for (std::size_t t = 0; t < n_targets; ++t) {
    for (std::size_t i = 0; i < sets; ++i) column[i] = outcomes[i].true2[t];
    const MeanWithError m = mean_with_error(column);
    result.ensemble.mean_true2.push_back(m.mean);
    result.ensemble.std_error_true2.push_back(m.std_error);
  }
  for (std::size_t t = 0; t < n_targets; ++t) {
    for (std::size_t g = 0; g < n_grid; ++g) {
      for (std::size_t s = 0; s < n_schemes; ++s) {
        const std::size_t j = slot(t, g, s);
        MseEstimate row;
        row.scheme = config.schemes[s].name();
        row.target = config.targets[t].str();
        row.component = config.targets[t].kind();
        row.n_total = config.nt_grid[g];
        row.param = plan[j].spec.value;
        for (std::size_t i = 0; i < sets; ++i) column[i] = outcomes[i].mse[j];
        const MeanWithError m = mean_with_error(column);
        row.mean = m.mean;
        row.std_error = m.std_error;
        for (std::size_t i = 0; i < sets; ++i) column[i] = outcomes[i].diff_vs_ps[j];
        const MeanWithError dm = mean_with_error(column);
        row.diff_vs_ps = dm.mean;
        row.diff_stderr = dm.std_error;
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Crossings

Crossing empirical_n_star(const std::vector<MseEstimate>& ps, const std::vector<MseEstimate>& other) {
  if (ps.size() != other.size() || ps.empty()) {
    throw std::invalid_argument("empirical_n_star: series lengths differ or are empty");
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].n_total != other[i].n_total) {
      throw std::invalid_argument("empirical_n_star: N_T grids do not overlap");
    }
    if (i > 0 && ps[i].n_total <= ps[i - 1].n_total) {
      throw std::invalid_argument("empirical_n_star: N_T grid must be increasing");
    }
  }
  const std::size_t n = ps.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = other[i].mean - ps[i].mean;
  const auto log_n = [&](std::size_t i) { return std::log(static_cast<double>(ps[i].n_total)); };

  std::optional<std::size_t> last_negative;
  std::optional<std::size_t> zero_point;
  for (std::size_t i = 0; i < n; ++i) {
    const double se = other[i].diff_stderr;
    if (diff[i] < -se) {
      last_negative = i;
      zero_point.reset();
    } else if (diff[i] == 0.0 && last_negative && !zero_point) {
      zero_point = i;
    } else if (diff[i] > se && last_negative) {
      Crossing c;
      if (zero_point) {
        c.n_star = static_cast<double>(ps[*zero_point].n_total);
        c.lower = c.upper = ps[*zero_point].n_total;
        c.uncertainty = static_cast<double>(ps[i].n_total - ps[*last_negative].n_total) / 4.0;
        return c;
      }
      const std::size_t a = *last_negative;
      const double frac = diff[a] / (diff[a] - diff[i]);
      c.n_star = std::exp(log_n(a) + frac * (log_n(i) - log_n(a)));
      c.uncertainty = static_cast<double>(ps[i].n_total - ps[a].n_total) / 2.0;
      c.lower = ps[a].n_total;
      c.upper = ps[i].n_total;
      return c;
    }
  }
  throw NoCrossingError("no crossing of " + (other.empty() ? std::string("?") : other.front().scheme) +
                        " with PS in the N_T range");
}

// ---------------------------------------------------------------------------
// Distribution study

DistributionSummary distribution_study(const ExperimentConfig& config) {
  config.validate();
  const AnsatzLayout layout = config.layout();
  const PauliObservable obs = config.resolved_observable();
  const double eta = config.eta_total();
  if (eta < 1e-12) {
    throw std::domain_error("distribution_study: total error rate below 1e-12, g is undefined");
  }
  const RunStreams streams(config.master_seed);
  const bool pauli = std::holds_alternative<CnotPauliChannel>(config.noise);

  DistributionSummary out;
  const auto sets = static_cast<std::size_t>(config.parameter_sets);
  out.f_samples.assign(sets, 0.0);
  out.g_samples.assign(sets, 0.0);
  if (pauli) out.weight_hashes.assign(sets, 0);
  parallel_for(config.parameter_sets, config.workers, [&](int set) {
    std::mt19937_64 rng = streams.parameters(set).engine();
    const ParameterVectord theta = sample_parameter_set(layout, rng);
    const NoiseModel noise = noise_for_set(config, set);
    const auto i = static_cast<std::size_t>(set);
    out.f_samples[i] = circuit_function(layout, theta, NoiseModel{NoNoise{}}, obs);
    out.g_samples[i] = extract_g(layout, theta, noise, obs);
    if (pauli) out.weight_hashes[i] = weights_hash(std::get<CnotPauliChannel>(noise).weights);
  });
  out.var_f = sample_variance(out.f_samples);
  out.var_g = sample_variance(out.g_samples);
  if (out.var_g > 1e-15) out.r_var = out.var_f / out.var_g;
  out.eta_total = eta;
  if (const auto* dep = std::get_if<CnotDepolarizing>(&config.noise)) {
    out.rates = total_error_rate(dep->eta0, config.qubits, config.layers);
  } else if (pauli) {
    out.rates = total_error_rate(std::get<CnotPauliChannel>(config.noise).eta0(), config.qubits,
                                 config.layers);
  } else {
    out.rates.eta_total = eta;
    out.rates.eta_per_layer = eta;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-design moments

TwoDesignCheck verify_two_design(int n, int layers, int samples, const Substream& stream) {
  if (layers < 2) throw std::invalid_argument("verify_two_design needs L >= 2");
  if (samples < 2) throw std::invalid_argument("verify_two_design needs at least 2 samples");
  const AnsatzLayout layout(n, layers);
  const PauliObservable obs = PauliObservable::cyclic_xyz(n);
  const NoiseModel noiseless = NoNoise{};
  TwoDesignCheck out;
  out.exact = two_design_moments(n);
  out.layer = (layers + 1) / 2 - 1;
  const ParameterLocation a{out.layer, 0, 1};
  const auto grad = DerivativeTarget::gradient(a);
  const auto diag = DerivativeTarget::diag_hessian(a);
  std::optional<DerivativeTarget> off;
  if (n >= 2) off = DerivativeTarget::off_diag_hessian(a, {out.layer, 1, 1});

  const auto count = static_cast<std::size_t>(samples);
  std::vector<double> f(count), f2(count), g2(count), h2(count), o2(off ? count : 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng = stream.child(i).engine();
    const ParameterVectord theta = sample_parameter_set(layout, rng);
    f[i] = circuit_function(layout, theta, noiseless, obs);
    f2[i] = f[i] * f[i];
    const double dg = exact_derivative(grad, layout, theta, noiseless, obs);
    const double dh = exact_derivative(diag, layout, theta, noiseless, obs);
    g2[i] = dg * dg;
    h2[i] = dh * dh;
    if (off) {
      const double dof = exact_derivative(*off, layout, theta, noiseless, obs);
      o2[i] = dof * dof;
    }
  }
  out.f = mean_with_error(f);
  out.f2 = mean_with_error(f2);
  out.grad2 = mean_with_error(g2);
  out.hess_diag2 = mean_with_error(h2);
  if (off) out.hess_off2 = mean_with_error(o2);
  return out;
}

}  // namespace noisegrad
