#ifndef FANETSIM_HARNESS_HPP_
#define FANETSIM_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fanetsim/config.hpp"
#include "fanetsim/sim.hpp"

namespace fanetsim {

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double median = 0.0;
  double ci95_lo = 0.0;  // normal-approximation 95% interval
  double ci95_hi = 0.0;

  static Stats compute(std::vector<double> values);
};

struct SpeedProfile {
  std::string name;
  double mu0 = 0.0;
  double sigma0_sq = 0.0;
};

// slow (10, 2.5), medium (25, 5), fast (50, 10); alpha=5, beta=1 throughout.
std::vector<SpeedProfile> standard_profiles();
SpeedProfile profile_by_name(const std::string& name);

struct ExperimentGrid {
  std::vector<PolicyKind> policies;
  std::vector<int> sizes{10, 20};
  std::vector<double> ranges{5000.0, 7500.0, 10000.0};
  std::vector<SpeedProfile> profiles = standard_profiles();
  int seeds_per_cell = 20;
  ScenarioConfig base{};

  void validate() const;
};

ExperimentGrid grid_from_config(const Config& cfg);

// One grid cell, aggregated per policy over the seed battery. Every policy
// in a cell consumes identical trajectories; hash is the combined hash of
// the per-seed trajectory files.
struct CellResult {
  PolicyKind policy{};
  int n = 0;
  std::string profile;
  double range = 0.0;
  Stats energy;
  Stats delivery;
  Stats mean_temperature;
  std::vector<double> energy_per_seed;
  std::vector<double> delivery_per_seed;
  std::vector<double> mean_t_per_seed;
  std::string trajectory_hash;
};

struct TableResult {
  std::string name;
  std::vector<CellResult> cells;

  const CellResult* find(PolicyKind policy, int n,
                         const std::string& profile, double range) const;
};

// Energy consumption per (policy, N, speed profile) at the base range.
TableResult table3_experiment(const ExperimentGrid& grid);

// Delivery ratio per (policy, N, communication range) at the medium profile.
TableResult table4_experiment(const ExperimentGrid& grid);

// Energy per (policy, N, profile) restricted to the heuristic controllers
// and the adaptive-SA policy.
TableResult table5_experiment(const ExperimentGrid& grid);

struct ConvergenceOutcome {
  long packets_until_converged = 0;  // 1-based; 0 when never converged
  bool converged = false;
  bool reached_optimal = false;
  std::vector<int> final_path;
  std::vector<int> oracle_path;
  double oracle_cost = 0.0;
};

// Routes cfg.packet_count packets on a static world and tracks when the
// greedy path first matches the oracle path for stable_window consecutive
// packets. When world is provided it overrides cfg's trajectory source.
ConvergenceOutcome convergence_run(const ScenarioConfig& cfg,
                                   int stable_window = 10,
                                   const TrajectorySet* world = nullptr);

struct ConvergenceSummary {
  std::string label;
  PolicyKind policy{};
  double epsilon = 0.0;          // fixed rate; unused for the adaptive policy
  std::vector<ConvergenceOutcome> outcomes;  // one per seed
  long median_packets = 0;       // over converged seeds; 0 if none converged
  double optimal_fraction = 0.0;
};

// Fixed low/medium/high exploration rates plus the proposed adaptive policy
// on static instances.
std::vector<ConvergenceSummary> convergence_experiment(
    const ScenarioConfig& base, int seeds,
    const TrajectorySet* world = nullptr);

// Stationary fleet pinned at explicit positions (test/ablation helper).
TrajectorySet static_world(const std::vector<Vec2>& positions,
                           const Arena& arena, double horizon);

// A 4-node layout on which a low fixed exploration rate locks into a
// suboptimal path within the packet budget while adaptive exploration finds
// the oracle path. Used by the convergence experiment and its tests.
TrajectorySet deceptive_instance(double range, Arena* arena_out = nullptr);

// Fig. 5/6/7-style outputs: Q-value evolution at the source, per-decision
// temperature traces, and per-profile mean-temperature summaries.
void write_figure_traces(const std::string& out_dir,
                         const ScenarioConfig& base, int seeds);

// Per-profile mean temperature of the adaptive policy, median over seeds.
std::map<std::string, double> temperature_by_profile(
    const ScenarioConfig& base, int seeds);

// CSV / summary output. All numbers are formatted deterministically so a
// rerun with the same config is byte-identical.
void write_table_csv(const std::string& path, const TableResult& table);
void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceSummary>& summaries);
void write_summary(const std::string& path,
                   const std::vector<TableResult>& tables,
                   const std::vector<ConvergenceSummary>& convergence);
void write_packets_csv(const std::string& path, const ScenarioReport& report);
void write_temperature_csv(const std::string& path,
                           const ScenarioReport& report);
void write_q_evolution_csv(const std::string& path,
                           const ScenarioReport& report);

std::string fmt_double(double v);

// Simple work pool: applies fn to [0, count) with a bounded thread count;
// results must be written to pre-sized slots so merge order is fixed.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace fanetsim

#endif  // FANETSIM_HARNESS_HPP_
