#include "fanetsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "fanetsim/rng.hpp"

namespace fanetsim {

namespace {

std::uint64_t fnv64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::ofstream open_out(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  return out;
}

}  // namespace

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

Stats Stats::compute(std::vector<double> values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (double x : values)
    if (std::isfinite(x)) v.push_back(x);
  Stats s;
  if (v.empty()) {
    s.mean = s.stddev = s.median = s.ci95_lo = s.ci95_hi =
        std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  const double n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.median = median_of(v);
  const double half = 1.96 * s.stddev / std::sqrt(n);
  s.ci95_lo = s.mean - half;
  s.ci95_hi = s.mean + half;
  return s;
}

std::vector<SpeedProfile> standard_profiles() {
  return {{"slow", 10.0, 2.5}, {"medium", 25.0, 5.0}, {"fast", 50.0, 10.0}};
}

SpeedProfile profile_by_name(const std::string& name) {
  for (const SpeedProfile& p : standard_profiles())
    if (p.name == name) return p;
  throw ConfigError("unknown speed profile: " + name);
}

void ExperimentGrid::validate() const {
  if (policies.empty()) throw ConfigError("grid: empty policy list");
  if (sizes.empty()) throw ConfigError("grid: empty size list");
  if (ranges.empty()) throw ConfigError("grid: empty range list");
  if (profiles.empty()) throw ConfigError("grid: empty profile list");
  if (seeds_per_cell < 1) throw ConfigError("grid: seeds_per_cell must be >= 1");
}

ExperimentGrid grid_from_config(const Config& cfg) {
  ExperimentGrid grid;
  grid.base = scenario_from_config(cfg);
  const std::vector<std::string> default_policies{"ree",  "pe",   "qr",
                                                  "afeq", "sahq", "adaptive-sa"};
  grid.policies.clear();
  for (const std::string& name : cfg.get_list("policies", default_policies))
    grid.policies.push_back(policy_from_string(name));
  grid.sizes.clear();
  for (const std::string& s : cfg.get_list("sizes", {"10", "20"}))
    grid.sizes.push_back(std::stoi(s));
  grid.ranges.clear();
  for (const std::string& s : cfg.get_list("ranges", {"5000", "7500", "10000"}))
    grid.ranges.push_back(std::stod(s));
  grid.profiles.clear();
  for (const std::string& s :
       cfg.get_list("profiles", {"slow", "medium", "fast"}))
    grid.profiles.push_back(profile_by_name(s));
  grid.seeds_per_cell = cfg.get_int("seeds_per_cell", grid.seeds_per_cell);
  grid.validate();
  return grid;
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::size_t workers = std::min<std::size_t>(hw, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

struct CellSpec {
  int n = 0;
  SpeedProfile profile;
  double range = 0.0;
};

struct UnitOutcome {
  double energy = 0.0;
  double delivery = 0.0;
  double mean_t = 0.0;
  std::string hash;
};

ScenarioConfig cell_config(const ScenarioConfig& base, const CellSpec& cell,
                           std::uint64_t seed) {
  ScenarioConfig cfg = base;
  cfg.n = cell.n;
  cfg.range = cell.range;
  cfg.hyper.mu0 = cell.profile.mu0;
  cfg.hyper.sigma0_sq = cell.profile.sigma0_sq;
  cfg.seed = seed;
  return cfg;
}

// Runs every (cell, seed) unit in the work pool; policies within a unit
// share one trajectory set so the comparison is fair by construction.
TableResult run_grid(const std::string& name, const ExperimentGrid& grid,
                     const std::vector<PolicyKind>& policies,
                     const std::vector<CellSpec>& cells) {
  const std::size_t seeds = static_cast<std::size_t>(grid.seeds_per_cell);
  const std::size_t units = cells.size() * seeds;
  std::vector<std::vector<UnitOutcome>> outcomes(
      units, std::vector<UnitOutcome>(policies.size()));

  parallel_for(units, [&](std::size_t unit) {
    const std::size_t cell_idx = unit / seeds;
    const std::size_t seed_idx = unit % seeds;
    const CellSpec& cell = cells[cell_idx];
    ScenarioConfig cfg =
        cell_config(grid.base, cell, grid.base.seed + seed_idx);
    const TrajectorySet world =
        generate_fleet(cfg.n, cfg.hyper, Arena::from_length(cfg.arena_l),
                       cfg.horizon(), cfg.seed, cfg.freeze_mobility);
    for (std::size_t p = 0; p < policies.size(); ++p) {
      ScenarioConfig run_cfg = cfg;
      run_cfg.policy = policies[p];
      Engine engine(run_cfg, world);
      const ScenarioReport report = engine.run();
      outcomes[unit][p] = UnitOutcome{report.mean_delivered_energy,
                                      report.delivery_ratio,
                                      report.mean_temperature,
                                      report.trajectory_hash};
    }
  });

  TableResult table;
  table.name = name;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t p = 0; p < policies.size(); ++p) {
      CellResult cell;
      cell.policy = policies[p];
      cell.n = cells[c].n;
      cell.profile = cells[c].profile.name;
      cell.range = cells[c].range;
      std::string hash_concat;
      for (std::size_t s = 0; s < seeds; ++s) {
        const UnitOutcome& u = outcomes[c * seeds + s][p];
        cell.energy_per_seed.push_back(u.energy);
        cell.delivery_per_seed.push_back(u.delivery);
        cell.mean_t_per_seed.push_back(u.mean_t);
        hash_concat += u.hash;
      }
      cell.energy = Stats::compute(cell.energy_per_seed);
      cell.delivery = Stats::compute(cell.delivery_per_seed);
      cell.mean_temperature = Stats::compute(cell.mean_t_per_seed);
      cell.trajectory_hash = hex64(fnv64(hash_concat));
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

}  // namespace

const CellResult* TableResult::find(PolicyKind policy, int n,
                                    const std::string& profile,
                                    double range) const {
  for (const CellResult& cell : cells) {
    if (cell.policy == policy && cell.n == n && cell.profile == profile &&
        cell.range == range)
      return &cell;
  }
  return nullptr;
}

TableResult table3_experiment(const ExperimentGrid& grid) {
  grid.validate();
  std::vector<CellSpec> cells;
  for (int n : grid.sizes)
    for (const SpeedProfile& profile : grid.profiles)
      cells.push_back(CellSpec{n, profile, grid.base.range});
  return run_grid("table3_energy", grid, grid.policies, cells);
}

TableResult table4_experiment(const ExperimentGrid& grid) {
  grid.validate();
  const SpeedProfile medium = profile_by_name("medium");
  std::vector<CellSpec> cells;
  for (int n : grid.sizes)
    for (double r : grid.ranges) cells.push_back(CellSpec{n, medium, r});
  return run_grid("table4_delivery", grid, grid.policies, cells);
}

TableResult table5_experiment(const ExperimentGrid& grid) {
  grid.validate();
  const std::vector<PolicyKind> heuristics{PolicyKind::Pso, PolicyKind::Ga,
                                           PolicyKind::Gd,
                                           PolicyKind::AdaptiveSa};
  std::vector<CellSpec> cells;
  for (int n : grid.sizes)
    for (const SpeedProfile& profile : grid.profiles)
      cells.push_back(CellSpec{n, profile, grid.base.range});
  return run_grid("table5_heuristics", grid, heuristics, cells);
}

TrajectorySet static_world(const std::vector<Vec2>& positions,
                           const Arena& arena, double horizon) {
  TrajectorySet set;
  set.arena = arena;
  set.horizon = horizon;
  int id = 0;
  for (const Vec2& pos : positions) {
    Trajectory traj;
    traj.node_id = id++;
    traj.initial_position = pos;
    traj.arena = arena;
    traj.horizon = horizon;
    traj.segments.push_back(MotionSegment{0.0, horizon, 0.0, 0.0});
    traj.finalize();
    set.nodes.push_back(std::move(traj));
  }
  return set;
}

TrajectorySet deceptive_instance(double range, Arena* arena_out) {
  // Two 2-hop routes to the destination: the optimal route starts with the
  // longer (more expensive-looking) first hop, so a low fixed exploration
  // rate locks onto the cheap first hop within the packet budget.
  const double r = range;
  const std::vector<Vec2> positions{
      {0.10 * r, 0.10 * r},             // 0: source
      {0.10 * r + 0.25 * r, 0.40 * r},  // 1: tempting short first hop
      {0.10 * r + 0.60 * r, 0.10 * r},  // 2: optimal relay
      {0.10 * r + 1.20 * r, 0.10 * r},  // 3: destination
  };
  const Arena arena{2.0 * r, 1.0 * r};
  if (arena_out != nullptr) *arena_out = arena;
  return static_world(positions, arena, 1e6);
}

ConvergenceOutcome convergence_run(const ScenarioConfig& cfg,
                                   int stable_window,
                                   const TrajectorySet* world) {
  ConvergenceOutcome outcome;
  Engine engine = world ? Engine(cfg, *world) : Engine(cfg);

  const ContactGraph g0 = snapshot(engine.world().nodes, 0.0, cfg.range);
  const auto oracle =
      oracle_min_cost_path(g0, cfg.src, cfg.dst, engine.edge_cost_fn());
  if (!oracle) return outcome;  // disconnected instance
  outcome.oracle_path = oracle->nodes;
  outcome.oracle_cost = oracle->cost;

  int streak = 0;
  for (long i = 0; i < cfg.packet_count; ++i) {
    const double t0 = static_cast<double>(i) * cfg.packet_interval;
    engine.route_packet(i, t0, cfg.src, cfg.dst);
    const auto greedy = engine.greedy_walk(t0, cfg.src, cfg.dst);
    const bool match = greedy && greedy->nodes == oracle->nodes;
    streak = match ? streak + 1 : 0;
    if (!outcome.converged && streak >= stable_window) {
      outcome.converged = true;
      outcome.packets_until_converged = i + 2 - stable_window;  // 1-based
    }
  }
  const auto final_walk = engine.greedy_walk(
      static_cast<double>(cfg.packet_count - 1) * cfg.packet_interval,
      cfg.src, cfg.dst);
  if (final_walk) outcome.final_path = final_walk->nodes;
  outcome.reached_optimal = final_walk && final_walk->nodes == oracle->nodes;
  return outcome;
}

std::vector<ConvergenceSummary> convergence_experiment(
    const ScenarioConfig& base, int seeds, const TrajectorySet* world) {
  struct Entry {
    std::string label;
    PolicyKind policy;
    double epsilon;
  };
  const std::vector<Entry> entries{
      {"low", PolicyKind::Ree, 0.02},
      {"medium", PolicyKind::Ree, 0.1},
      {"high", PolicyKind::Ree, 0.5},
      {"proposed", PolicyKind::AdaptiveSa, 0.0},
  };

  std::vector<ConvergenceSummary> summaries(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    summaries[e].label = entries[e].label;
    summaries[e].policy = entries[e].policy;
    summaries[e].epsilon = entries[e].epsilon;
    summaries[e].outcomes.resize(static_cast<std::size_t>(seeds));
  }

  const std::size_t units = entries.size() * static_cast<std::size_t>(seeds);
  parallel_for(units, [&](std::size_t unit) {
    const std::size_t e = unit / static_cast<std::size_t>(seeds);
    const std::size_t s = unit % static_cast<std::size_t>(seeds);
    ScenarioConfig cfg = base;
    cfg.policy = entries[e].policy;
    cfg.policy_params.epsilon = entries[e].epsilon;
    cfg.freeze_mobility = true;
    cfg.seed = base.seed + s;
    summaries[e].outcomes[s] = convergence_run(cfg, 10, world);
  });

  for (ConvergenceSummary& summary : summaries) {
    std::vector<double> packets;
    long optimal = 0;
    for (const ConvergenceOutcome& o : summary.outcomes) {
      // Right-censor never-converged runs at packet_count + 1.
      packets.push_back(o.converged
                            ? static_cast<double>(o.packets_until_converged)
                            : static_cast<double>(base.packet_count + 1));
      if (o.reached_optimal) ++optimal;
    }
    summary.median_packets = static_cast<long>(median_of(packets));
    summary.optimal_fraction =
        summary.outcomes.empty()
            ? 0.0
            : static_cast<double>(optimal) /
                  static_cast<double>(summary.outcomes.size());
  }
  return summaries;
}

std::map<std::string, double> temperature_by_profile(
    const ScenarioConfig& base, int seeds) {
  const std::vector<SpeedProfile> profiles = standard_profiles();
  std::vector<std::vector<double>> means(profiles.size());
  for (auto& m : means) m.resize(static_cast<std::size_t>(seeds));

  const std::size_t units = profiles.size() * static_cast<std::size_t>(seeds);
  parallel_for(units, [&](std::size_t unit) {
    const std::size_t p = unit / static_cast<std::size_t>(seeds);
    const std::size_t s = unit % static_cast<std::size_t>(seeds);
    ScenarioConfig cfg = base;
    cfg.policy = PolicyKind::AdaptiveSa;
    cfg.hyper.mu0 = profiles[p].mu0;
    cfg.hyper.sigma0_sq = profiles[p].sigma0_sq;
    cfg.seed = base.seed + s;
    means[p][s] = run_scenario(cfg).mean_temperature;
  });

  std::map<std::string, double> result;
  for (std::size_t p = 0; p < profiles.size(); ++p)
    result[profiles[p].name] = median_of(means[p]);
  return result;
}

void write_table_csv(const std::string& path, const TableResult& table) {
  std::ofstream out = open_out(path);
  out << "policy,n,profile,range,seeds,energy_mean,energy_std,energy_median,"
         "energy_ci95_lo,energy_ci95_hi,delivery_mean,delivery_median,"
         "mean_temperature_median,trajectory_hash\n";
  for (const CellResult& cell : table.cells) {
    out << to_string(cell.policy) << ',' << cell.n << ',' << cell.profile
        << ',' << fmt_double(cell.range) << ','
        << cell.energy_per_seed.size() << ',' << fmt_double(cell.energy.mean)
        << ',' << fmt_double(cell.energy.stddev) << ','
        << fmt_double(cell.energy.median) << ','
        << fmt_double(cell.energy.ci95_lo) << ','
        << fmt_double(cell.energy.ci95_hi) << ','
        << fmt_double(cell.delivery.mean) << ','
        << fmt_double(cell.delivery.median) << ','
        << fmt_double(cell.mean_temperature.median) << ','
        << cell.trajectory_hash << '\n';
  }
}

void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceSummary>& summaries) {
  std::ofstream out = open_out(path);
  out << "label,policy,epsilon,seed,converged,packets_until_converged,"
         "reached_optimal\n";
  for (const ConvergenceSummary& summary : summaries) {
    for (std::size_t s = 0; s < summary.outcomes.size(); ++s) {
      const ConvergenceOutcome& o = summary.outcomes[s];
      out << summary.label << ',' << to_string(summary.policy) << ','
          << fmt_double(summary.epsilon) << ',' << s << ','
          << (o.converged ? 1 : 0) << ',' << o.packets_until_converged << ','
          << (o.reached_optimal ? 1 : 0) << '\n';
    }
  }
}

namespace {

void append_gain_lines(std::ostream& out, const TableResult& table,
                       PolicyKind proposed) {
  // Per-cell relative gain of the proposed policy against each other policy.
  std::vector<std::pair<int, std::string>> cell_keys;
  for (const CellResult& cell : table.cells) {
    const std::pair<int, std::string> key{cell.n,
                                          cell.profile + "/" +
                                              fmt_double(cell.range)};
    if (std::find(cell_keys.begin(), cell_keys.end(), key) == cell_keys.end())
      cell_keys.push_back(key);
  }
  for (const auto& [n, label] : cell_keys) {
    const CellResult* prop = nullptr;
    std::vector<const CellResult*> others;
    for (const CellResult& cell : table.cells) {
      if (cell.n != n || cell.profile + "/" + fmt_double(cell.range) != label)
        continue;
      if (cell.policy == proposed)
        prop = &cell;
      else
        others.push_back(&cell);
    }
    if (prop == nullptr) continue;
    for (const CellResult* other : others) {
      const double gain =
          (other->energy.mean - prop->energy.mean) / other->energy.mean;
      out << "  n=" << n << " " << label << "  " << to_string(other->policy)
          << "=" << fmt_double(other->energy.mean) << "  proposed="
          << fmt_double(prop->energy.mean) << "  gain="
          << fmt_double(100.0 * gain) << "%\n";
    }
  }
}

}  // namespace

void write_summary(const std::string& path,
                   const std::vector<TableResult>& tables,
                   const std::vector<ConvergenceSummary>& convergence) {
  std::ofstream out = open_out(path);
  for (const TableResult& table : tables) {
    out << "== " << table.name << " ==\n";
    if (table.name == "table4_delivery") {
      for (const CellResult& cell : table.cells)
        out << "  " << to_string(cell.policy) << " n=" << cell.n
            << " range=" << fmt_double(cell.range) << "  delivery="
            << fmt_double(100.0 * cell.delivery.mean) << "%\n";
    } else {
      append_gain_lines(out, table, PolicyKind::AdaptiveSa);
    }
    out << '\n';
  }
  if (!convergence.empty()) {
    out << "== convergence ==\n";
    for (const ConvergenceSummary& summary : convergence)
      out << "  " << summary.label
          << "  median_packets=" << summary.median_packets
          << "  optimal_fraction=" << fmt_double(summary.optimal_fraction)
          << '\n';
  }
}

void write_packets_csv(const std::string& path, const ScenarioReport& report) {
  std::ofstream out = open_out(path);
  out << "packet_id,src,dst,status,hops,energy,latency\n";
  for (const Packet& p : report.packets) {
    out << p.id << ',' << p.src << ',' << p.dst << ',' << to_string(p.status)
        << ',';
    for (std::size_t i = 0; i < p.hops.size(); ++i) {
      if (i > 0) out << '|';
      out << p.hops[i];
    }
    out << ',' << fmt_double(p.accumulated_cost) << ','
        << fmt_double(p.latency) << '\n';
  }
}

void write_temperature_csv(const std::string& path,
                           const ScenarioReport& report) {
  std::ofstream out = open_out(path);
  out << "time,node,k,temperature,f\n";
  for (const DecisionTrace& d : report.temperature_trace)
    out << fmt_double(d.time) << ',' << d.node << ',' << d.k << ','
        << fmt_double(d.temperature) << ',' << fmt_double(d.f) << '\n';
}

void write_q_evolution_csv(const std::string& path,
                           const ScenarioReport& report) {
  std::ofstream out = open_out(path);
  out << "round,owner,dest,neighbor,q_value\n";
  for (const QSample& q : report.q_evolution)
    out << q.round << ',' << q.owner << ',' << q.dest << ',' << q.neighbor
        << ',' << fmt_double(q.q) << '\n';
}

void write_figure_traces(const std::string& out_dir,
                         const ScenarioConfig& base, int seeds) {
  // Q-value evolution at the source (Fig. 5 style) for the SA-family
  // policies and a high-exploration baseline, on identical trajectories.
  const std::vector<std::pair<std::string, PolicyKind>> fig5{
      {"adaptive_sa", PolicyKind::AdaptiveSa},
      {"sahq", PolicyKind::Sahq},
      {"ree_high", PolicyKind::Ree},
  };
  for (const auto& [label, policy] : fig5) {
    ScenarioConfig cfg = base;
    cfg.policy = policy;
    if (policy == PolicyKind::Ree) cfg.policy_params.epsilon = 0.5;
    const ScenarioReport report = run_scenario(cfg);
    write_q_evolution_csv(out_dir + "/q_evolution_" + label + ".csv", report);
  }

  // Temperature traces (Fig. 6 style), per profile.
  for (const SpeedProfile& profile : standard_profiles()) {
    ScenarioConfig cfg = base;
    cfg.policy = PolicyKind::AdaptiveSa;
    cfg.hyper.mu0 = profile.mu0;
    cfg.hyper.sigma0_sq = profile.sigma0_sq;
    const ScenarioReport report = run_scenario(cfg);
    write_temperature_csv(
        out_dir + "/temperature_trace_" + profile.name + ".csv", report);
  }
  {
    ScenarioConfig cfg = base;
    cfg.policy = PolicyKind::Sahq;
    const ScenarioReport report = run_scenario(cfg);
    write_temperature_csv(out_dir + "/temperature_trace_sahq.csv", report);
  }

  // Mean temperature per profile (Fig. 7 style), adaptive vs non-adaptive.
  std::ofstream out = open_out(out_dir + "/mean_temperature.csv");
  out << "profile,policy,seed,mean_temperature\n";
  for (const SpeedProfile& profile : standard_profiles()) {
    for (const PolicyKind policy :
         {PolicyKind::AdaptiveSa, PolicyKind::Sahq}) {
      for (int s = 0; s < seeds; ++s) {
        ScenarioConfig cfg = base;
        cfg.policy = policy;
        cfg.hyper.mu0 = profile.mu0;
        cfg.hyper.sigma0_sq = profile.sigma0_sq;
        cfg.seed = base.seed + static_cast<std::uint64_t>(s);
        const ScenarioReport report = run_scenario(cfg);
        out << profile.name << ',' << to_string(policy) << ',' << s << ','
            << fmt_double(report.mean_temperature) << '\n';
      }
    }
  }
}

}  // namespace fanetsim
