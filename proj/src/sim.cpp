#include "fanetsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "fanetsim/rng.hpp"

namespace fanetsim {

void EnergyModel::validate() const {
  if (e_elec < 0.0 || e_amp < 0.0 || q_cost < 0.0)
    throw ConfigError("energy model coefficients must be >= 0");
  if (kappa < 2.0 || kappa > 4.0)
    throw ConfigError("kappa must be in [2, 4]");
}

HopCost hop_cost(const EnergyModel& model, double d_xy) {
  if (d_xy < 0.0) throw std::invalid_argument("distance must be >= 0");
  return HopCost{model.q_cost,
                 model.e_elec + model.e_amp * std::pow(d_xy, model.kappa)};
}

std::string to_string(PacketStatus status) {
  switch (status) {
    case PacketStatus::Delivered: return "delivered";
    case PacketStatus::DroppedNoNeighbor: return "dropped_no_neighbor";
    case PacketStatus::DroppedOutOfRange: return "dropped_out_of_range";
    case PacketStatus::DroppedTtl: return "dropped_ttl";
  }
  return "unknown";
}

double ScenarioConfig::horizon() const {
  return static_cast<double>(packet_count) * packet_interval +
         static_cast<double>(effective_ttl()) * hop_latency + 1.0;
}

void ScenarioConfig::validate() const {
  if (n < 2) throw ConfigError("n must be >= 2");
  if (!(arena_l > 0.0)) throw ConfigError("arena_l must be > 0");
  if (!(range > 0.0)) throw ConfigError("range must be > 0");
  if (packet_count < 1) throw ConfigError("packet_count must be >= 1");
  if (!(packet_interval > 0.0)) throw ConfigError("packet_interval must be > 0");
  if (ttl < 0) throw ConfigError("ttl must be >= 0");
  if (hop_latency < 0.0) throw ConfigError("hop_latency must be >= 0");
  if (!random_pairs) {
    if (src < 0 || src >= n || dst < 0 || dst >= n)
      throw ConfigError("src/dst must be node ids in [0, n)");
    if (src == dst) throw ConfigError("src and dst must differ");
  }
  if (!(policy_params.eta > 0.0) || policy_params.eta > 1.0)
    throw ConfigError("eta must be in (0, 1]");
  if (policy_params.epsilon < 0.0 || policy_params.epsilon > 1.0)
    throw ConfigError("epsilon must be in [0, 1]");
  if (policy_params.k_max < 1) throw ConfigError("k_max must be >= 1");
  if (policy_params.k_tune < 0.0) throw ConfigError("k_tune must be >= 0");
  if (!(policy_params.f_delta_fraction > 0.0))
    throw ConfigError("f_delta_fraction must be > 0");
  hyper.validate();
  energy.validate();
}

namespace {

TrajectorySet make_world(const ScenarioConfig& cfg) {
  if (!cfg.replay_file.empty()) return load_trajectories(cfg.replay_file);
  return generate_fleet(cfg.n, cfg.hyper, Arena::from_length(cfg.arena_l),
                        cfg.horizon(), cfg.seed, cfg.freeze_mobility);
}

}  // namespace

Engine::Engine(const ScenarioConfig& cfg) : Engine(cfg, make_world(cfg)) {}

Engine::Engine(const ScenarioConfig& cfg, TrajectorySet world)
    : cfg_(cfg),
      world_(std::move(world)),
      traffic_rng_(make_engine(cfg.seed, Stream::Traffic)) {
  cfg_.validate();
  if (static_cast<int>(world_.nodes.size()) != cfg_.n)
    throw ConfigError("trajectory set does not match configured n");
  for (int i = 0; i < cfg_.n; ++i) {
    if (world_.nodes[static_cast<std::size_t>(i)].node_id != i)
      throw ConfigError("trajectory node ids must be contiguous from 0");
  }
  const double needed = static_cast<double>(cfg_.packet_count - 1) *
                            cfg_.packet_interval +
                        static_cast<double>(cfg_.effective_ttl()) *
                            cfg_.hop_latency;
  if (world_.horizon < needed)
    throw ConfigError("trajectory horizon too short for the configured run");

  tables_.reserve(static_cast<std::size_t>(cfg_.n));
  policies_.reserve(static_cast<std::size_t>(cfg_.n));
  rates_.reserve(static_cast<std::size_t>(cfg_.n));
  for (int i = 0; i < cfg_.n; ++i) {
    tables_.emplace_back(i, 0.0);
    policies_.emplace_back(cfg_.policy, cfg_.policy_params,
                           derive_seed(cfg_.seed, Stream::Policy,
                                       static_cast<std::uint64_t>(i)));
    LearningRates lr;
    lr.eta = cfg_.policy_params.eta;
    lr.k_tune = cfg_.policy_params.k_tune;
    rates_.push_back(lr);
  }
}

EdgeCostFn Engine::edge_cost_fn() const {
  const EnergyModel model = cfg_.energy;
  return [model](int, int, double d) { return hop_cost(model, d).total(); };
}

Packet Engine::route_packet(long packet_id, double t0, int src, int dst) {
  Packet p;
  p.id = packet_id;
  p.src = src;
  p.dst = dst;
  p.creation_time = t0;
  p.hops.push_back(src);

  double t = t0;
  int x = src;
  const int ttl = cfg_.effective_ttl();

  for (int hop = 0; hop < ttl; ++hop) {
    const ContactGraph g = snapshot(world_.nodes, t, cfg_.range);
    const std::vector<int>& candidates = g.neighbors_of(x);
    if (candidates.empty()) {
      p.status = PacketStatus::DroppedNoNeighbor;
      return p;
    }

    NodePolicy& policy = policies_[static_cast<std::size_t>(x)];
    const bool full_echo = policy.full_echo();
    const int y = policy.select(tables_[static_cast<std::size_t>(x)], dst,
                                candidates);
    if (policy.sa_family())
      trace_.push_back(DecisionTrace{t, x, policy.last_k(),
                                     policy.last_temperature(),
                                     policy.last_f()});

    const double d_xy = g.pair_distance(x, y);
    const HopCost hc = hop_cost(cfg_.energy, d_xy);

    // Receiver remaining-trip estimates are gathered at send time from the
    // same snapshot; the destination anchors the recursion at zero.
    std::map<int, HopFeedback> feedbacks;
    auto remaining_estimate = [&](int w) {
      if (w == dst) return 0.0;
      const QTable& wt = tables_[static_cast<std::size_t>(w)];
      const auto best = wt.best_estimate(dst, g.neighbors_of(w));
      return best ? best->q : wt.init_value();
    };
    if (full_echo) {
      for (int w : candidates)
        feedbacks.emplace(w, HopFeedback{cfg_.energy.q_cost,
                                         hop_cost(cfg_.energy,
                                                  g.pair_distance(x, w)).s,
                                         remaining_estimate(w)});
    } else {
      feedbacks.emplace(y, HopFeedback{hc.q, hc.s, remaining_estimate(y)});
    }

    p.accumulated_cost += hc.total();
    if (cfg_.charge_echo_energy && full_echo) {
      for (int w : candidates)
        if (w != y) p.accumulated_cost += feedbacks.at(w).link_cost;
    }

    const double t_arrive = t + cfg_.hop_latency;
    const double d_arrive =
        distance(world_.nodes[static_cast<std::size_t>(x)].position_at(t_arrive),
                 world_.nodes[static_cast<std::size_t>(y)].position_at(t_arrive));
    if (d_arrive > cfg_.range) {
      // Failed transmission: energy was spent but no feedback returns.
      p.status = PacketStatus::DroppedOutOfRange;
      return p;
    }

    QTable& qt = tables_[static_cast<std::size_t>(x)];
    if (full_echo)
      qt.update_full_echo(dst, y, candidates, feedbacks,
                          rates_[static_cast<std::size_t>(x)]);
    else
      qt.update_selected(dst, y, feedbacks.at(y),
                         rates_[static_cast<std::size_t>(x)].eta);

    p.hops.push_back(y);
    t = t_arrive;
    x = y;
    if (x == dst) {
      p.status = PacketStatus::Delivered;
      p.latency = t - t0;
      feed_delivery(p);
      return p;
    }
  }
  p.status = PacketStatus::DroppedTtl;
  return p;
}

void Engine::feed_delivery(const Packet& packet) {
  std::set<int> seen;
  for (int node : packet.hops) {
    if (node == packet.dst) continue;
    if (!seen.insert(node).second) continue;
    update_delivery_stats(rates_[static_cast<std::size_t>(node)],
                          packet.accumulated_cost);
    const auto q_best =
        tables_[static_cast<std::size_t>(node)].min_for_dest(packet.dst);
    policies_[static_cast<std::size_t>(node)].on_delivery(
        packet.accumulated_cost,
        q_best.value_or(packet.accumulated_cost));
  }
}

std::optional<OraclePath> Engine::greedy_walk(double t, int src,
                                              int dst) const {
  const ContactGraph g = snapshot(world_.nodes, t, cfg_.range);
  const EdgeCostFn cost = edge_cost_fn();
  OraclePath path;
  path.nodes.push_back(src);
  int x = src;
  std::set<int> visited{src};
  for (int step = 0; step < cfg_.n; ++step) {
    if (x == dst) return path;
    const std::vector<int>& candidates = g.neighbors_of(x);
    const auto best =
        tables_[static_cast<std::size_t>(x)].best_estimate(dst, candidates);
    if (!best) return std::nullopt;
    const int y = best->neighbor;
    if (!visited.insert(y).second) return std::nullopt;  // loop
    path.cost += cost(x, y, g.pair_distance(x, y));
    path.nodes.push_back(y);
    x = y;
  }
  return x == dst ? std::optional<OraclePath>(path) : std::nullopt;
}

ScenarioReport Engine::run() {
  ScenarioReport report;
  report.packet_count = cfg_.packet_count;
  report.trajectory_hash = trajectory_hash(world_);
  report.packets.reserve(static_cast<std::size_t>(cfg_.packet_count));
  trace_.clear();

  std::uniform_int_distribution<int> pick_node(0, cfg_.n - 1);
  for (long i = 0; i < cfg_.packet_count; ++i) {
    int src = cfg_.src;
    int dst = cfg_.dst;
    if (cfg_.random_pairs) {
      src = pick_node(traffic_rng_);
      do {
        dst = pick_node(traffic_rng_);
      } while (dst == src);
    }
    const double t0 = static_cast<double>(i) * cfg_.packet_interval;
    Packet p = route_packet(i, t0, src, dst);
    switch (p.status) {
      case PacketStatus::Delivered: report.delivered++; break;
      case PacketStatus::DroppedNoNeighbor: report.dropped_no_neighbor++; break;
      case PacketStatus::DroppedOutOfRange: report.dropped_out_of_range++; break;
      case PacketStatus::DroppedTtl: report.dropped_ttl++; break;
    }
    report.packets.push_back(std::move(p));

    if (!cfg_.random_pairs) {
      const QTable& st = tables_[static_cast<std::size_t>(cfg_.src)];
      for (int nb = 0; nb < cfg_.n; ++nb) {
        if (st.has_entry(cfg_.dst, nb))
          report.q_evolution.push_back(
              QSample{i, cfg_.src, cfg_.dst, nb, st.value(cfg_.dst, nb)});
      }
    }
  }

  report.delivery_ratio = static_cast<double>(report.delivered) /
                          static_cast<double>(report.packet_count);
  double energy_sum = 0.0;
  for (const Packet& p : report.packets)
    if (p.status == PacketStatus::Delivered) energy_sum += p.accumulated_cost;
  report.mean_delivered_energy =
      report.delivered > 0
          ? energy_sum / static_cast<double>(report.delivered)
          : std::numeric_limits<double>::quiet_NaN();

  report.temperature_trace = trace_;
  if (!trace_.empty()) {
    // Fixed-pair runs report the traffic source's annealing process (the
    // exemplary node of the figure outputs); random-pair runs average all.
    double t_sum = 0.0;
    long count = 0;
    for (const DecisionTrace& d : trace_) {
      if (!cfg_.random_pairs && d.node != cfg_.src) continue;
      t_sum += d.temperature;
      ++count;
    }
    if (count > 0)
      report.mean_temperature = t_sum / static_cast<double>(count);
  }
  return report;
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  return Engine(cfg).run();
}

}  // namespace fanetsim
