#include "fanetsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fanetsim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& key) const {
  return values_.count(key) != 0;
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

std::string Config::get_string(const std::string& key,
                               const std::string& def) const {
  consumed_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + it->second);
  }
}

long Config::get_long(const std::string& key, long def) const {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + it->second);
  }
}

int Config::get_int(const std::string& key, int def) const {
  return static_cast<int>(get_long(key, def));
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t def) const {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + it->second);
  }
}

bool Config::get_bool(const std::string& key, bool def) const {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': not a boolean: " + it->second);
}

std::vector<std::string> Config::get_list(
    const std::string& key, const std::vector<std::string>& def) const {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::vector<std::string> out;
  std::istringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty())
    throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::vector<std::string> Config::unconsumed() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_)
    if (consumed_.count(key) == 0) out.push_back(key);
  return out;
}

void Config::require_fully_consumed() const {
  const auto leftovers = unconsumed();
  if (leftovers.empty()) return;
  std::string msg = "unknown config keys:";
  for (const std::string& key : leftovers) msg += " " + key;
  throw ConfigError(msg);
}

ScenarioConfig scenario_from_config(const Config& cfg) {
  ScenarioConfig sc;
  sc.n = cfg.get_int("n", sc.n);
  sc.arena_l = cfg.get_double("arena_l", sc.arena_l);
  sc.range = cfg.get_double("range", sc.range);
  sc.hyper.mu0 = cfg.get_double("mu0", sc.hyper.mu0);
  sc.hyper.sigma0_sq = cfg.get_double("sigma0_sq", sc.hyper.sigma0_sq);
  sc.hyper.alpha = cfg.get_double("alpha", sc.hyper.alpha);
  sc.hyper.beta = cfg.get_double("beta", sc.hyper.beta);
  sc.hyper.tau = cfg.get_double("tau", sc.hyper.tau);
  sc.policy = policy_from_string(
      cfg.get_string("policy", to_string(sc.policy)));
  sc.packet_count = cfg.get_long("packet_count", sc.packet_count);
  sc.packet_interval = cfg.get_double("packet_interval", sc.packet_interval);
  sc.ttl = cfg.get_int("ttl", sc.ttl);
  sc.seed = cfg.get_u64("seed", sc.seed);
  sc.energy.e_elec = cfg.get_double("e_elec", sc.energy.e_elec);
  sc.energy.e_amp = cfg.get_double("e_amp", sc.energy.e_amp);
  sc.energy.kappa = cfg.get_double("kappa", sc.energy.kappa);
  sc.energy.q_cost = cfg.get_double("q_cost", sc.energy.q_cost);
  sc.hop_latency = cfg.get_double("hop_latency", sc.hop_latency);
  sc.src = cfg.get_int("src", sc.src);
  sc.dst = cfg.get_int("dst", sc.dst);
  sc.random_pairs = cfg.get_bool("random_pairs", sc.random_pairs);
  sc.freeze_mobility = cfg.get_bool("freeze_mobility", sc.freeze_mobility);
  sc.charge_echo_energy =
      cfg.get_bool("charge_echo_energy", sc.charge_echo_energy);
  sc.replay_file = cfg.get_string("replay_file", sc.replay_file);

  PolicyParams& pp = sc.policy_params;
  pp.epsilon = cfg.get_double("epsilon", pp.epsilon);
  pp.pe_temperature = cfg.get_double("pe_temperature", pp.pe_temperature);
  pp.k_max = cfg.get_long("k_max", pp.k_max);
  pp.eta = cfg.get_double("eta", pp.eta);
  pp.k_tune = cfg.get_double("k_tune", pp.k_tune);
  pp.reinit_threshold = cfg.get_double("reinit_threshold", pp.reinit_threshold);
  pp.f_delta_fraction =
      cfg.get_double("f_delta_fraction", pp.f_delta_fraction);
  pp.exponential_cooling =
      cfg.get_bool("exponential_cooling", pp.exponential_cooling);
  pp.heuristic_eps_init =
      cfg.get_double("heuristic_eps_init", pp.heuristic_eps_init);
  pp.gd_window = cfg.get_int("gd_window", pp.gd_window);
  pp.gd_delta = cfg.get_double("gd_delta", pp.gd_delta);
  pp.gd_step = cfg.get_double("gd_step", pp.gd_step);
  pp.ga_population = cfg.get_int("ga_population", pp.ga_population);
  pp.ga_generation_packets =
      cfg.get_int("ga_generation_packets", pp.ga_generation_packets);
  pp.ga_mutation_sigma =
      cfg.get_double("ga_mutation_sigma", pp.ga_mutation_sigma);
  pp.pso_particles = cfg.get_int("pso_particles", pp.pso_particles);
  pp.pso_iteration_packets =
      cfg.get_int("pso_iteration_packets", pp.pso_iteration_packets);
  pp.pso_inertia = cfg.get_double("pso_inertia", pp.pso_inertia);
  pp.pso_cognitive = cfg.get_double("pso_cognitive", pp.pso_cognitive);
  pp.pso_social = cfg.get_double("pso_social", pp.pso_social);

  sc.validate();
  return sc;
}

}  // namespace fanetsim
