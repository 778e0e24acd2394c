// fanetsim command line: single scenario runs, experiment grids, trajectory
// replays and figure-trace exports. Exit code is nonzero only for
// configuration or I/O errors; packet drops are results, not failures.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fanetsim/config.hpp"
#include "fanetsim/harness.hpp"
#include "fanetsim/sim.hpp"

namespace {

using namespace fanetsim;

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("FANETSIM_OUT"); env && *env) return env;
  return "out";
}

Config load_config(const std::string& path) {
  if (path.empty()) return Config::from_string("");
  return Config::from_file(path);
}

void apply_overrides(Config& cfg, const std::string& seed,
                     const std::string& policy) {
  if (!seed.empty()) cfg.set("seed", seed);
  if (!policy.empty()) cfg.set("policy", policy);
}

void report_scenario(const ScenarioConfig& cfg, const ScenarioReport& report,
                     const std::string& out_dir) {
  write_packets_csv(out_dir + "/packets.csv", report);
  write_q_evolution_csv(out_dir + "/q_evolution.csv", report);
  write_temperature_csv(out_dir + "/temperature_trace.csv", report);
  std::cout << "policy=" << to_string(cfg.policy) << " n=" << cfg.n
            << " range=" << cfg.range << " seed=" << cfg.seed << '\n'
            << "delivered=" << report.delivered << '/' << report.packet_count
            << " (ratio " << fmt_double(report.delivery_ratio) << ")\n"
            << "drops: no_neighbor=" << report.dropped_no_neighbor
            << " out_of_range=" << report.dropped_out_of_range
            << " ttl=" << report.dropped_ttl << '\n'
            << "mean_delivered_energy="
            << fmt_double(report.mean_delivered_energy) << '\n'
            << "trajectory_hash=" << report.trajectory_hash << '\n'
            << "outputs in " << out_dir << '\n';
}

int cmd_run(const std::string& config_path, const std::string& seed,
            const std::string& policy, const std::string& out,
            bool dump_adjacency_flag, const std::string& save_traj) {
  Config cfg = load_config(config_path);
  apply_overrides(cfg, seed, policy);
  ScenarioConfig sc = scenario_from_config(cfg);
  cfg.require_fully_consumed();
  const std::string out_dir = resolve_out_dir(out);

  Engine engine(sc);
  if (!save_traj.empty()) save_trajectories(save_traj, engine.world());
  const ScenarioReport report = engine.run();
  report_scenario(sc, report, out_dir);
  save_trajectories(out_dir + "/trajectories.txt", engine.world());

  std::ofstream qdump(out_dir + "/qtable_final.txt");
  qdump << "# owner destination neighbor q_value\n";
  for (int node = 0; node < sc.n; ++node) engine.table(node).dump(qdump);

  if (dump_adjacency_flag) {
    std::ofstream adj(out_dir + "/adjacency.txt");
    for (long i = 0; i < sc.packet_count; ++i) {
      const double t = static_cast<double>(i) * sc.packet_interval;
      dump_adjacency(adj, snapshot(engine.world().nodes, t, sc.range));
    }
  }
  return 0;
}

int cmd_grid(const std::string& config_path, const std::string& seed,
             const std::string& out, const std::string& experiment) {
  const std::vector<std::string> known{"table3", "table4", "table5",
                                       "convergence", "all"};
  if (std::find(known.begin(), known.end(), experiment) == known.end())
    throw ConfigError("unknown experiment: " + experiment);
  Config cfg = load_config(config_path);
  apply_overrides(cfg, seed, "");
  ExperimentGrid grid = grid_from_config(cfg);
  const int convergence_seeds =
      cfg.get_int("convergence_seeds", grid.seeds_per_cell);
  const long convergence_packets = cfg.get_long("convergence_packets", 60);
  const double convergence_eta = cfg.get_double("convergence_eta", 0.1);
  cfg.require_fully_consumed();
  const std::string out_dir = resolve_out_dir(out);

  std::vector<TableResult> tables;
  std::vector<ConvergenceSummary> convergence;

  const bool all = experiment == "all";
  if (all || experiment == "table3") {
    tables.push_back(table3_experiment(grid));
    write_table_csv(out_dir + "/table3_energy.csv", tables.back());
  }
  if (all || experiment == "table4") {
    tables.push_back(table4_experiment(grid));
    write_table_csv(out_dir + "/table4_delivery.csv", tables.back());
  }
  if (all || experiment == "table5") {
    tables.push_back(table5_experiment(grid));
    write_table_csv(out_dir + "/table5_heuristics.csv", tables.back());
  }
  if (all || experiment == "convergence") {
    ScenarioConfig base = grid.base;
    base.packet_count = convergence_packets;
    base.policy_params.eta = convergence_eta;
    convergence = convergence_experiment(base, convergence_seeds);
    write_convergence_csv(out_dir + "/convergence.csv", convergence);
  }
  write_summary(out_dir + "/summary.txt", tables, convergence);
  std::cout << "grid outputs in " << out_dir << '\n';
  return 0;
}

int cmd_replay(const std::string& trajectories, const std::string& config_path,
               const std::string& seed, const std::string& policy,
               const std::string& out) {
  Config cfg = load_config(config_path);
  apply_overrides(cfg, seed, policy);
  cfg.set("replay_file", trajectories);
  ScenarioConfig sc = scenario_from_config(cfg);
  cfg.require_fully_consumed();
  const std::string out_dir = resolve_out_dir(out);

  const ScenarioReport report = run_scenario(sc);
  report_scenario(sc, report, out_dir);
  return 0;
}

int cmd_traces(const std::string& config_path, const std::string& seed,
               const std::string& out) {
  Config cfg = load_config(config_path);
  apply_overrides(cfg, seed, "");
  ScenarioConfig sc = scenario_from_config(cfg);
  const int seeds = cfg.get_int("trace_seeds", 20);
  cfg.require_fully_consumed();
  const std::string out_dir = resolve_out_dir(out);

  write_figure_traces(out_dir, sc, seeds);
  std::cout << "trace outputs in " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning-based packet routing simulator for flying ad-hoc "
               "networks"};
  app.require_subcommand(1);

  std::string config_path, seed, policy, out, save_traj, trajectories;
  std::string experiment = "all";
  bool dump_adj = false;

  CLI::App* run = app.add_subcommand("run", "run a single scenario");
  run->add_option("--config", config_path, "scenario config file");
  run->add_option("--seed", seed, "override the master seed");
  run->add_option("--policy", policy, "override the routing policy");
  run->add_option("--out", out, "output directory");
  run->add_option("--save-trajectories", save_traj,
                  "also write the generated trajectories to this file");
  run->add_flag("--dump-adjacency", dump_adj,
                "dump per-packet contact graph snapshots");

  CLI::App* grid = app.add_subcommand("grid", "run an experiment grid");
  grid->add_option("--config", config_path, "grid config file");
  grid->add_option("--seed", seed, "override the master seed");
  grid->add_option("--out", out, "output directory");
  grid->add_option("--exp", experiment,
                   "table3|table4|table5|convergence|all");

  CLI::App* replay = app.add_subcommand("replay",
                                        "run a scenario from a trajectory file");
  replay->add_option("--trajectories", trajectories, "trajectory file")
      ->required();
  replay->add_option("--config", config_path, "scenario config file");
  replay->add_option("--seed", seed, "override the master seed");
  replay->add_option("--policy", policy, "override the routing policy");
  replay->add_option("--out", out, "output directory");

  CLI::App* traces = app.add_subcommand("traces", "write figure-style traces");
  traces->add_option("--config", config_path, "scenario config file");
  traces->add_option("--seed", seed, "override the master seed");
  traces->add_option("--out", out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, seed, policy, out, dump_adj, save_traj);
    if (grid->parsed()) return cmd_grid(config_path, seed, out, experiment);
    if (replay->parsed())
      return cmd_replay(trajectories, config_path, seed, policy, out);
    if (traces->parsed()) return cmd_traces(config_path, seed, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
