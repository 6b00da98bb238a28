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

#include "noisegrad/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace noisegrad {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"circuit", {"qubits", "layers", "pattern", "observable"}},
      {"noise", {"model", "eta0", "eta_per_layer", "eta", "weights", "redraw"}},
      {"targets", {"list"}},
      {"sampling", {"n_total", "parameter_sets", "experiments_per_set", "seed", "schemes", "workers"}},
      {"meta", {}},
  };
  return keys;
}

/// Collects problems instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  template <typename T>
  T number(const std::string& section, const std::string& key, T fallback) {
    const auto v = raw(section, key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      T out{};
      if constexpr (std::is_floating_point_v<T>) {
        out = static_cast<T>(std::stod(*v, &used));
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!v->empty() && v->front() == '-') throw std::invalid_argument("negative");
        out = static_cast<T>(std::stoull(*v, &used));
      } else {
        out = static_cast<T>(std::stoll(*v, &used));
      }
      if (used != v->size()) throw std::invalid_argument("trailing characters");
      return out;
    } catch (const std::exception&) {
      fail(section + "." + key, "'" + *v + "' is not a valid number");
      return fallback;
    }
  }

  void fail(const std::string& path, const std::string& what) { problems.push_back(path + ": " + what); }

  std::vector<std::string> problems;

 private:
  const pt::ptree& tree_;
};

}  // namespace

std::vector<std::int64_t> parse_grid(const std::string& text) {
  std::vector<std::int64_t> grid;
  const auto as_int = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || used == 0 || v != std::floor(v) || std::abs(v) > 9e18) {
      throw std::invalid_argument("'" + s + "' is not an integer copy number");
    }
    return static_cast<std::int64_t>(v);
  };
  for (const std::string& item : split(text, ',')) {
    const std::vector<std::string> parts = split(item, ':');
    if (parts.size() == 1) {
      grid.push_back(as_int(parts[0]));
    } else if (parts.size() == 3) {
      const std::int64_t a = as_int(parts[0]);
      const std::int64_t b = as_int(parts[1]);
      const std::int64_t step = as_int(parts[2]);
      if (step <= 0) throw std::invalid_argument("range '" + item + "' needs a positive step");
      for (std::int64_t n = a; n <= b; n += step) grid.push_back(n);
    } else {
      throw std::invalid_argument("'" + item + "' is neither an integer nor a:b:step");
    }
  }
  return grid;
}

LoadedConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({"line " + std::to_string(e.line()) + ": " + e.message()});
  }

  Reader r(tree);
  LoadedConfig out;
  ExperimentConfig& c = out.experiment;

  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) {
      if (body.empty()) {
        r.fail(section, "key outside any section");
      } else {
        r.fail(section, "unknown section");
      }
      continue;
    }
    for (const auto& [key, value] : body) {
      if (section == "meta") {
        out.meta[key] = trim(value.data());
      } else if (!known->second.count(key)) {
        r.fail(section + "." + key, "unknown key");
      }
    }
  }

  c.qubits = r.number<int>("circuit", "qubits", 4);
  c.layers = r.number<int>("circuit", "layers", 5);
  if (const auto p = r.raw("circuit", "pattern")) {
    if (p->size() != 3) {
      r.fail("circuit.pattern", "'" + *p + "' must name three axes, e.g. ZYZ");
    } else {
      try {
        for (std::size_t i = 0; i < 3; ++i) c.pattern[i] = parse_axis((*p)[i]);
      } catch (const std::exception& e) {
        r.fail("circuit.pattern", e.what());
      }
    }
  }
  if (const auto o = r.raw("circuit", "observable")) {
    try {
      c.observable = PauliObservable::parse(*o);
    } catch (const std::exception& e) {
      r.fail("circuit.observable", e.what());
    }
  }

  // Sampling first: fixed random Pauli weights are drawn from the seed.
  if (const auto g = r.raw("sampling", "n_total")) {
    try {
      c.nt_grid = parse_grid(*g);
    } catch (const std::exception& e) {
      r.fail("sampling.n_total", e.what());
    }
  } else {
    r.fail("sampling.n_total", "missing");
  }
  c.parameter_sets = r.number<int>("sampling", "parameter_sets", 200);
  c.experiments_per_set = r.number<int>("sampling", "experiments_per_set", 200);
  c.master_seed = r.number<std::uint64_t>("sampling", "seed", 1);
  c.workers = r.number<int>("sampling", "workers", 1);
  if (const auto s = r.raw("sampling", "schemes")) {
    c.schemes.clear();
    for (const std::string& name : split(*s, ',')) {
      try {
        c.schemes.push_back(SchemeChoice::parse(name));
      } catch (const std::exception& e) {
        r.fail("sampling.schemes", e.what());
      }
    }
  }

  const std::string model = r.raw("noise", "model").value_or("none");
  const auto eta0 = r.raw("noise", "eta0");
  const auto eta_pl = r.raw("noise", "eta_per_layer");
  const auto eta = r.raw("noise", "eta");
  const int rate_keys = (eta0 ? 1 : 0) + (eta_pl ? 1 : 0) + (eta ? 1 : 0);
  const bool shape_ok = c.qubits >= 1 && c.layers >= 1;
  const auto cnot_rate = [&]() -> double {
    if (rate_keys != 1) {
      r.fail("noise", "give exactly one of eta0, eta_per_layer, eta");
      return 0.0;
    }
    if (eta0) return r.number<double>("noise", "eta0", 0.0);
    const double v = eta_pl ? r.number<double>("noise", "eta_per_layer", 0.0) : r.number<double>("noise", "eta", 0.0);
    if (!(v >= 0.0 && v < 1.0) || !shape_ok) {
      r.fail(eta_pl ? "noise.eta_per_layer" : "noise.eta", "rate must lie in [0, 1)");
      return 0.0;
    }
    if (eta_pl) return per_layer_error_rate_to_eta0(v, c.qubits);
    return -std::expm1(std::log1p(-v) / (static_cast<double>(c.qubits) * c.layers));
  };
  if (model == "none") {
    if (rate_keys != 0) r.fail("noise", "model 'none' takes no rate");
    c.noise = NoNoise{};
  } else if (model == "cnot_depolarizing") {
    c.noise = CnotDepolarizing{cnot_rate()};
  } else if (model == "cnot_pauli") {
    CnotPauliChannel pc;
    const std::string redraw = r.raw("noise", "redraw").value_or("per_set");
    if (redraw == "per_set") {
      pc.redraw_per_set = true;
    } else if (redraw == "fixed") {
      pc.redraw_per_set = false;
    } else {
      r.fail("noise.redraw", "'" + redraw + "' is not per_set or fixed");
    }
    if (const auto w = r.raw("noise", "weights")) {
      if (rate_keys != 0) r.fail("noise", "weights already fix the rate; drop eta0/eta_per_layer/eta");
      const std::vector<std::string> items = split(*w, ',');
      if (items.size() != kTwoQubitPaulis) {
        r.fail("noise.weights", std::to_string(items.size()) + " values given, 15 expected");
      } else {
        for (std::size_t i = 0; i < items.size(); ++i) {
          try {
            pc.weights[i] = std::stod(items[i]);
          } catch (const std::exception&) {
            r.fail("noise.weights[" + std::to_string(i) + "]", "'" + items[i] + "' is not a number");
          }
        }
      }
    } else {
      const double rate = cnot_rate();
      if (rate >= 0.0 && rate < 1.0) {
        std::mt19937_64 rng = Substream(c.master_seed).child(~std::uint64_t{0}).engine();
        pc.weights = random_pauli_weights(rate, rng);
      }
    }
    c.noise = pc;
  } else if (model == "global_depolarizing") {
    if (eta0 || eta_pl || !eta) {
      r.fail("noise", "global_depolarizing takes the total rate 'eta' only");
    }
    c.noise = GlobalDepolarizing{r.number<double>("noise", "eta", 0.0)};
  } else {
    r.fail("noise.model", "'" + model + "' is not none, cnot_depolarizing, cnot_pauli or global_depolarizing");
  }

  if (const auto t = r.raw("targets", "list")) {
    const std::vector<std::string> items = split(*t, ',');
    for (std::size_t i = 0; i < items.size(); ++i) {
      try {
        c.targets.push_back(DerivativeTarget::parse(items[i]));
      } catch (const std::exception& e) {
        r.fail("targets.list[" + std::to_string(i) + "]", e.what());
      }
    }
  } else if (shape_ok) {
    c.targets = default_targets(c.qubits, c.layers);
  }

  try {
    c.validate();
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) {
      if (std::find(r.problems.begin(), r.problems.end(), p) == r.problems.end()) r.problems.push_back(p);
    }
  }
  if (!r.problems.empty()) throw ConfigError(r.problems);
  return out;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open config file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

nlohmann::json canonical_json(const ExperimentConfig& c) {
  nlohmann::json j;
  std::string pattern;
  for (PauliAxis a : c.pattern) pattern += to_char(a);
  j["circuit"] = {{"qubits", c.qubits},
                  {"layers", c.layers},
                  {"pattern", pattern},
                  {"observable", c.resolved_observable().str()}};
  nlohmann::json noise;
  std::visit(
      [&noise](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NoNoise>) {
          noise["model"] = "none";
        } else if constexpr (std::is_same_v<T, CnotDepolarizing>) {
          noise["model"] = "cnot_depolarizing";
          noise["eta0"] = m.eta0;
        } else if constexpr (std::is_same_v<T, CnotPauliChannel>) {
          noise["model"] = "cnot_pauli";
          noise["eta0"] = m.eta0();
          noise["redraw"] = m.redraw_per_set ? "per_set" : "fixed";
          if (!m.redraw_per_set) noise["weights"] = m.weights;
        } else {
          noise["model"] = "global_depolarizing";
          noise["eta"] = m.eta;
        }
      },
      c.noise);
  j["noise"] = noise;
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : c.targets) targets.push_back(t.str());
  j["targets"] = targets;
  nlohmann::json schemes = nlohmann::json::array();
  for (const auto& s : c.schemes) schemes.push_back(s.name());
  j["sampling"] = {{"n_total", c.nt_grid},
                   {"parameter_sets", c.parameter_sets},
                   {"experiments_per_set", c.experiments_per_set},
                   {"seed", c.master_seed},
                   {"schemes", schemes}};
  return j;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string config_hash(const ExperimentConfig& config) { return sha256_hex(canonical_json(config).dump()); }

}  // namespace noisegrad
