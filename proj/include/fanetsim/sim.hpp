#ifndef FANETSIM_SIM_HPP_
#define FANETSIM_SIM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "fanetsim/mobility.hpp"
#include "fanetsim/policy.hpp"
#include "fanetsim/routing.hpp"
#include "fanetsim/topology.hpp"

namespace fanetsim {

// First-order radio model: q is a fixed queuing cost per hop, transmission
// costs e_elec + e_amp * d^kappa.
struct EnergyModel {
  double e_elec = 1.0;
  double e_amp = 1e-6;
  double kappa = 2.0;
  double q_cost = 1.0;

  void validate() const;
};

struct HopCost {
  double q = 0.0;
  double s = 0.0;
  double total() const { return q + s; }
};

HopCost hop_cost(const EnergyModel& model, double d_xy);

enum class PacketStatus {
  Delivered,
  DroppedNoNeighbor,
  DroppedOutOfRange,
  DroppedTtl,
};

std::string to_string(PacketStatus status);

struct Packet {
  long id = 0;
  int src = 0;
  int dst = 0;
  double creation_time = 0.0;
  std::vector<int> hops;  // visited holders, starts with src
  double accumulated_cost = 0.0;
  double latency = 0.0;
  PacketStatus status = PacketStatus::DroppedNoNeighbor;
};

struct ScenarioConfig {
  int n = 10;
  double arena_l = 15000.0;  // arena is arena_l x arena_l/2
  double range = 7500.0;     // communication range R, meters
  HyperParams hyper{};
  PolicyKind policy = PolicyKind::AdaptiveSa;
  PolicyParams policy_params{};
  long packet_count = 500;
  double packet_interval = 1.5;  // s
  int ttl = 0;                   // max hops per packet; 0 means 4*n
  std::uint64_t seed = 1;
  EnergyModel energy{};
  double hop_latency = 1e-3;  // s
  int src = 0;
  int dst = 1;
  bool random_pairs = false;
  bool freeze_mobility = false;
  bool charge_echo_energy = false;  // bill estimation packets as energy
  std::string replay_file;          // when set, trajectories come from here

  int effective_ttl() const { return ttl > 0 ? ttl : 4 * n; }
  double horizon() const;
  void validate() const;
};

// One per-decision sample of the annealing state (SA-family policies).
struct DecisionTrace {
  double time = 0.0;
  int node = 0;
  long k = 0;
  double temperature = 0.0;
  double f = 0.0;
};

// Source-node Q-value sample after a packet has been routed.
struct QSample {
  long round = 0;
  int owner = 0;
  int dest = 0;
  int neighbor = 0;
  double q = 0.0;
};

struct ScenarioReport {
  long packet_count = 0;
  long delivered = 0;
  long dropped_no_neighbor = 0;
  long dropped_out_of_range = 0;
  long dropped_ttl = 0;
  double delivery_ratio = 0.0;
  double mean_delivered_energy = 0.0;  // NaN when nothing was delivered
  double mean_temperature = 0.0;       // over decision trace; 0 if no trace
  std::vector<Packet> packets;
  std::vector<DecisionTrace> temperature_trace;
  std::vector<QSample> q_evolution;
  std::string trajectory_hash;
};

// Hop-by-hop simulator over a moving contact graph. The contact graph is
// re-evaluated at every forwarding event, so mid-route link breaks are
// observable. Fully deterministic for a given config.
class Engine {
 public:
  explicit Engine(const ScenarioConfig& cfg);
  Engine(const ScenarioConfig& cfg, TrajectorySet world);

  Packet route_packet(long packet_id, double t0, int src, int dst);
  ScenarioReport run();

  const TrajectorySet& world() const { return world_; }
  const QTable& table(int node) const { return tables_[node]; }
  NodePolicy& policy(int node) { return policies_[node]; }
  const LearningRates& rates(int node) const { return rates_[node]; }

  // Energy of the current greedy walk src->dst on the snapshot at time t;
  // returns the path and its cost, or nullopt when the walk dead-ends or
  // loops before reaching dst.
  std::optional<OraclePath> greedy_walk(double t, int src, int dst) const;

  EdgeCostFn edge_cost_fn() const;

 private:
  void feed_delivery(const Packet& packet);

  ScenarioConfig cfg_;
  TrajectorySet world_;
  std::vector<QTable> tables_;
  std::vector<NodePolicy> policies_;
  std::vector<LearningRates> rates_;
  std::mt19937_64 traffic_rng_;
  std::vector<DecisionTrace> trace_;
};

ScenarioReport run_scenario(const ScenarioConfig& cfg);

}  // namespace fanetsim

#endif  // FANETSIM_SIM_HPP_
