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

#include "noisegrad/cli.hpp"

#include "noisegrad/analytics.hpp"
#include "noisegrad/config.hpp"
#include "noisegrad/harness.hpp"
#include "noisegrad/invariants.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#ifndef NOISEGRAD_VERSION
#define NOISEGRAD_VERSION "0.0.0"
#endif

namespace noisegrad {

namespace fs = std::filesystem;

namespace {

/// Thrown for bad command-line values; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return fs::current_path();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError(what + ": '" + s + "' is not a number");
  return v;
}

/// Integers given as a list or an inclusive a:b range.
std::vector<int> parse_int_range(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (const std::string& item : split_list(text)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.push_back(static_cast<int>(parse_double(item, what)));
    } else {
      const int a = static_cast<int>(parse_double(item.substr(0, colon), what));
      const int b = static_cast<int>(parse_double(item.substr(colon + 1), what));
      for (int i = a; i <= b; ++i) out.push_back(i);
    }
  }
  return out;
}

nlohmann::json manifest(const ExperimentConfig& config, const std::map<std::string, std::string>& meta,
                        const std::string& command, const std::string& start,
                        const std::vector<std::string>& outputs, nlohmann::json run) {
  nlohmann::json m;
  m["tool"] = "noisegrad";
  m["version"] = NOISEGRAD_VERSION;
  m["command"] = command;
  m["config_hash"] = config_hash(config);
  m["master_seed"] = config.master_seed;
  m["start_time"] = start;
  m["end_time"] = utc_now();
  m["outputs"] = outputs;
  m["config"] = canonical_json(config);
  m["meta"] = meta;
  m["run"] = std::move(run);
  return m;
}

nlohmann::json rate_metadata(const ExperimentConfig& config) {
  nlohmann::json j;
  j["noise"] = describe(config.noise);
  j["eta_total"] = config.eta_total();
  double eta0 = -1.0;
  if (const auto* d = std::get_if<CnotDepolarizing>(&config.noise)) eta0 = d->eta0;
  if (const auto* p = std::get_if<CnotPauliChannel>(&config.noise)) eta0 = p->eta0();
  if (eta0 >= 0.0 && config.qubits > 1) {
    const ErrorRateSummary s = total_error_rate(eta0, config.qubits, config.layers);
    j["eta0"] = s.eta0;
    j["eta_per_layer"] = s.eta_per_layer;
    j["eta_total_linear"] = s.eta_total_linear;
  }
  return j;
}

// ---------------------------------------------------------------------------

struct AnalyticArgs {
  std::string targets = "gradient,diag,offdiag";
  std::string d;
  std::string n;
  std::string eta = "0";
  std::string nt;
  std::string schemes = "PS,NSPS,HSPS,NFD,HFD";
  double g = 0.0;
  bool nstar = false;
  std::string out;
};

int cmd_analytic(const AnalyticArgs& a, std::ostream& out) {
  std::vector<Component> targets;
  for (const auto& t : split_list(a.targets)) {
    try {
      targets.push_back(parse_component(t));
    } catch (const std::exception& e) {
      throw UsageError(std::string("--targets: ") + e.what());
    }
  }
  std::vector<double> dims;
  if (!a.d.empty() && !a.n.empty()) throw UsageError("give either --d or --n, not both");
  for (const auto& v : split_list(a.d)) dims.push_back(parse_double(v, "--d"));
  for (int n : parse_int_range(a.n, "--n")) {
    if (n < 1 || n > 60) throw UsageError("--n: qubit count " + std::to_string(n) + " outside [1, 60]");
    dims.push_back(std::ldexp(1.0, n));
  }
  std::vector<double> etas;
  for (const auto& v : split_list(a.eta)) etas.push_back(parse_double(v, "--eta"));
  for (double d : dims) {
    if (!(d >= 2.0)) throw UsageError("dimension d = " + num(d) + " must be >= 2");
  }
  for (double e : etas) {
    if (!(e >= 0.0 && e < 1.0)) throw UsageError("--eta: " + num(e) + " outside [0, 1)");
  }
  if (!(a.g >= -1.0 && a.g <= 1.0)) throw UsageError("--g must lie in [-1, 1]");
  if (targets.empty() || dims.empty() || etas.empty()) {
    throw UsageError("empty grid: need at least one target, dimension (--d or --n) and --eta value");
  }

  std::ostringstream csv;
  if (a.nstar) {
    csv << "target,d,eta,n_star_sps_exact,n_star_sps_small_eta,n_star_fd,fd_status\n";
    for (Component c : targets) {
      for (double d : dims) {
        for (double eta : etas) {
          std::string exact = "inf", small = "inf", fd = "nan", status;
          if (eta > 0.0) {
            exact = num(n_star_sps_exact(c, d, eta));
            small = num(n_star_sps_small_eta(c, d, eta));
          }
          try {
            fd = num(n_star_fd(c, d, eta));
            status = "ok";
          } catch (const CrossoverError& e) {
            status = e.kind() == CrossoverError::Kind::BelowBracket ? "below_bracket" : "above_bracket";
          }
          csv << to_string(c) << ',' << num(d) << ',' << num(eta) << ',' << exact << ',' << small << ','
              << fd << ',' << status << '\n';
        }
      }
    }
  } else {
    std::vector<std::int64_t> grid;
    try {
      grid = parse_grid(a.nt);
    } catch (const std::exception& e) {
      throw UsageError(std::string("--nt: ") + e.what());
    }
    if (grid.empty()) throw UsageError("empty grid: --nt yields no copy numbers");
    std::vector<SchemeChoice> schemes;
    for (const auto& s : split_list(a.schemes)) {
      try {
        schemes.push_back(SchemeChoice::parse(s));
      } catch (const std::exception& e) {
        throw UsageError(std::string("--schemes: ") + e.what());
      }
    }
    if (schemes.empty()) throw UsageError("empty grid: no schemes");
    csv << "target,d,eta,n_total,scheme,param,mse_finite,mse_approx,mse_total\n";
    for (Component c : targets) {
      for (double d : dims) {
        for (double eta : etas) {
          for (std::int64_t n : grid) {
            if (n < point_count(c)) {
              throw UsageError("--nt: " + std::to_string(n) + " copies below the " +
                               std::to_string(point_count(c)) + " points of " + std::string(to_string(c)));
            }
            for (const SchemeChoice& s : schemes) {
              const double p = scheme_parameter(s, c, d, n, eta);
              const auto nd = static_cast<double>(n);
              const MseBreakdown m = s.is_fd() ? mse_fd(c, d, p, eta, a.g, nd) : mse_sps(c, d, p, eta, a.g, nd);
              csv << to_string(c) << ',' << num(d) << ',' << num(eta) << ',' << n << ',' << s.name() << ','
                  << num(p) << ',' << num(m.finite_copy) << ',' << num(m.approximation) << ',' << num(m.total)
                  << '\n';
            }
          }
        }
      }
    }
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    write_file(a.out, csv.str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string config;
  std::string out_dir;
  int workers = 0;
  std::optional<std::uint64_t> seed;
  int bins = 40;
};

LoadedConfig load_for_run(const RunArgs& a) {
  LoadedConfig lc = load_config(a.config);
  if (a.workers > 0) lc.experiment.workers = a.workers;
  if (a.seed) lc.experiment.master_seed = *a.seed;
  return lc;
}

int cmd_mse_curves(const RunArgs& a, std::ostream& out) {
  const std::string start = utc_now();
  const LoadedConfig lc = load_for_run(a);
  const ExperimentConfig& c = lc.experiment;
  const MonteCarloResult r = monte_carlo_mse(c);

  std::ostringstream csv;
  csv << "scheme,target,n_total,param,mse_mean,mse_stderr,diff_vs_ps,diff_stderr\n";
  for (const auto& row : r.rows) {
    csv << row.scheme << ',' << row.target << ',' << row.n_total << ',' << num(row.param) << ','
        << num(row.mean) << ',' << num(row.std_error) << ',' << num(row.diff_vs_ps) << ','
        << num(row.diff_stderr) << '\n';
  }
  const fs::path dir = output_dir(a.out_dir);
  fs::create_directories(dir);
  const std::string stem = fs::path(a.config).stem().string();
  const std::string csv_name = stem + ".mse.csv";
  write_file(dir / csv_name, csv.str());

  nlohmann::json run = rate_metadata(c);
  nlohmann::json ens;
  ens["mean_f"] = r.ensemble.mean_f;
  ens["mean_f2"] = r.ensemble.mean_f2;
  nlohmann::json per_target = nlohmann::json::array();
  for (std::size_t t = 0; t < c.targets.size(); ++t) {
    per_target.push_back({{"target", c.targets[t].str()},
                          {"mean_true2", r.ensemble.mean_true2[t]},
                          {"stderr_true2", r.ensemble.std_error_true2[t]}});
  }
  ens["targets"] = per_target;
  run["ensemble"] = ens;
  nlohmann::json discarded = nlohmann::json::object();
  for (const auto& t : c.targets) {
    nlohmann::json per_n = nlohmann::json::object();
    for (std::int64_t n : c.nt_grid) per_n[std::to_string(n)] = shot_allocation(t.kind(), n).discarded;
    discarded[t.str()] = per_n;
  }
  run["discarded_copies"] = discarded;
  const std::string manifest_name = stem + ".mse.manifest.json";
  write_file(dir / manifest_name,
             manifest(c, lc.meta, "mse-curves", start, {csv_name}, std::move(run)).dump(2) + "\n");
  out << (dir / csv_name).string() << '\n' << (dir / manifest_name).string() << '\n';
  return kExitOk;
}

int cmd_dist(const RunArgs& a, std::ostream& out) {
  if (a.bins < 1) throw UsageError("--bins must be >= 1");
  const std::string start = utc_now();
  const LoadedConfig lc = load_for_run(a);
  const ExperimentConfig& c = lc.experiment;
  const DistributionSummary s = distribution_study(c);
  const bool hashes = !s.weight_hashes.empty();

  std::ostringstream samples;
  samples << "set,f,g" << (hashes ? ",weights_hash" : "") << '\n';
  for (std::size_t i = 0; i < s.f_samples.size(); ++i) {
    samples << i << ',' << num(s.f_samples[i]) << ',' << num(s.g_samples[i]);
    if (hashes) samples << ',' << fmt::format("{:016x}", s.weight_hashes[i]);
    samples << '\n';
  }
  std::ostringstream summary;
  summary << "qubits,layers,noise,eta0,eta_per_layer,eta_total,var_f,var_g,r_var\n";
  summary << c.qubits << ',' << c.layers << ',' << canonical_json(c)["noise"]["model"].get<std::string>() << ',' << num(s.rates.eta0) << ','
          << num(s.rates.eta_per_layer) << ',' << num(s.eta_total) << ',' << num(s.var_f) << ','
          << num(s.var_g) << ',' << (s.r_var ? num(*s.r_var) : std::string("undefined")) << '\n';
  std::ostringstream hist;
  hist << "quantity,bin,lo,hi,count\n";
  for (const auto& [name, xs] : {std::pair{"f", &s.f_samples}, std::pair{"g", &s.g_samples}}) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(a.bins), 0);
    for (double x : *xs) {
      const double u = (std::clamp(x, -1.0, 1.0) + 1.0) / 2.0;
      const auto b = std::min(static_cast<std::size_t>(u * a.bins), counts.size() - 1);
      ++counts[b];
    }
    for (int b = 0; b < a.bins; ++b) {
      hist << name << ',' << b << ',' << num(-1.0 + 2.0 * b / a.bins) << ',' << num(-1.0 + 2.0 * (b + 1) / a.bins)
           << ',' << counts[static_cast<std::size_t>(b)] << '\n';
    }
  }

  const fs::path dir = output_dir(a.out_dir);
  fs::create_directories(dir);
  const std::string stem = fs::path(a.config).stem().string();
  const std::vector<std::string> files = {stem + ".dist_samples.csv", stem + ".dist_summary.csv",
                                          stem + ".dist_histogram.csv"};
  write_file(dir / files[0], samples.str());
  write_file(dir / files[1], summary.str());
  write_file(dir / files[2], hist.str());

  nlohmann::json run = rate_metadata(c);
  run["var_f"] = s.var_f;
  run["var_g"] = s.var_g;
  run["r_var"] = s.r_var ? nlohmann::json(*s.r_var) : nlohmann::json("undefined");
  if (hashes) {
    std::vector<std::string> hx;
    for (auto h : s.weight_hashes) hx.push_back(fmt::format("{:016x}", h));
    run["weights_hashes"] = hx;
  }
  const std::string manifest_name = stem + ".dist.manifest.json";
  write_file(dir / manifest_name, manifest(c, lc.meta, "dist", start, files, std::move(run)).dump(2) + "\n");
  for (const auto& f : files) out << (dir / f).string() << '\n';
  out << (dir / manifest_name).string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  bool quick = false;
  std::string out;
  double lambda_scale = 1.0;
  std::uint64_t seed = VerifyOptions{}.seed;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  VerifyOptions o;
  o.quick = a.quick;
  o.lambda_scale = a.lambda_scale;
  o.seed = a.seed;
  const auto start = std::chrono::steady_clock::now();
  const std::vector<InvariantResult> results = run_invariants(o);
  bool ok = true;
  nlohmann::json report;
  report["quick"] = a.quick;
  nlohmann::json items = nlohmann::json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    items.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  report["invariants"] = items;
  report["passed"] = ok;
  report["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (a.out.empty()) {
    out << report.dump(2) << '\n';
  } else {
    write_file(a.out, report.dump(2) + "\n");
  }
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"noisegrad: noisy gradient and Hessian estimator toolkit", "noisegrad"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NOISEGRAD_VERSION);

  AnalyticArgs analytic;
  auto* an = app.add_subcommand("analytic", "Tabulate closed-form MSEs or crossover copy numbers");
  an->add_option("--targets", analytic.targets, "Comma list of gradient, diag, offdiag");
  an->add_option("--d", analytic.d, "Comma list of Hilbert-space dimensions");
  an->add_option("--n", analytic.n, "Qubit counts as a list or a:b range (d = 2^n)");
  an->add_option("--eta", analytic.eta, "Comma list of total error rates");
  an->add_option("--nt", analytic.nt, "N_T grid: integers and a:b:step ranges");
  an->add_option("--schemes", analytic.schemes, "PS, NSPS, HSPS, NFD, HFD, SPS:<lambda>, FD:<epsilon>");
  an->add_option("--g", analytic.g, "Constant error term g");
  an->add_flag("--nstar", analytic.nstar, "Emit the N* table instead of MSE rows");
  an->add_option("--out", analytic.out, "Write CSV to this file instead of stdout");

  RunArgs mse;
  auto* mc = app.add_subcommand("mse-curves", "Monte Carlo MSE curves for a config file");
  mc->add_option("config", mse.config, "Config file")->required();
  mc->add_option("--workers", mse.workers, "Worker threads (overrides the config)");
  mc->add_option("--out-dir", mse.out_dir, std::string("Output directory (default $") + kOutDirEnv + " or .)");
  mc->add_option("--seed", mse.seed, "Master seed (overrides the config)");

  RunArgs dist;
  auto* ds = app.add_subcommand("dist", "Distribution study of f and g for a config file");
  ds->add_option("config", dist.config, "Config file")->required();
  ds->add_option("--workers", dist.workers, "Worker threads (overrides the config)");
  ds->add_option("--out-dir", dist.out_dir, std::string("Output directory (default $") + kOutDirEnv + " or .)");
  ds->add_option("--seed", dist.seed, "Master seed (overrides the config)");
  ds->add_option("--bins", dist.bins, "Histogram bins on [-1, 1]");

  VerifyArgs verify;
  auto* vf = app.add_subcommand("verify", "Run the invariant suite and report JSON");
  vf->add_flag("--quick", verify.quick, "Analytic invariants only");
  vf->add_option("--out", verify.out, "Write the JSON report to this file");
  vf->add_option("--seed", verify.seed, "Seed of the randomized checks");
  vf->add_option("--lambda-scale", verify.lambda_scale, "Scale lambda_opt in the stationarity check (negative control)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (an->parsed()) return cmd_analytic(analytic, out);
    if (mc->parsed()) return cmd_mse_curves(mse, out);
    if (ds->parsed()) return cmd_dist(dist, out);
    if (vf->parsed()) return cmd_verify(verify, out);
  } catch (const UsageError& e) {
    err << "noisegrad: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "noisegrad: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "noisegrad: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace noisegrad
