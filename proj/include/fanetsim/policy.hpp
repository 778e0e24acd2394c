#ifndef FANETSIM_POLICY_HPP_
#define FANETSIM_POLICY_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fanetsim/routing.hpp"

namespace fanetsim {

enum class PolicyKind {
  Greedy,      // always follow the current best estimate
  Ree,         // epsilon-greedy random exploration-exploitation
  Pe,          // Boltzmann (softmax) exploration with fixed temperature
  Qr,          // conventional Q-routing (greedy, single-neighbor update)
  Afeq,        // full-echo with adaptive eta2, epsilon-greedy selection
  Sahq,        // SA-controlled exploration, fixed cooling (f pinned at 1)
  AdaptiveSa,  // proposed: SA exploration with f-scaled cooling + reinit
  Gd,          // full-echo, exploration rate driven by gradient descent
  Ga,          // full-echo, exploration rate driven by a genetic algorithm
  Pso,         // full-echo, exploration rate driven by particle swarm
};

std::string to_string(PolicyKind kind);
PolicyKind policy_from_string(const std::string& name);

struct PolicyParams {
  double epsilon = 0.1;          // Ree / Afeq exploration rate
  double pe_temperature = 25.0;  // Boltzmann temperature for Pe
  long k_max = 50;               // exploration horizon of the SA schedule
  double eta = 0.5;              // basic learning rate
  double k_tune = 1.0;           // additional-rate multiplier
  double reinit_threshold = 9.5;  // f at/above this re-initiates; >10 disables
  bool exponential_cooling = false;  // ablation schedule (see base schedule)

  // Scaling-factor calibration: gamma = 1 / (f_delta_fraction * running cost
  // scale), so f reads the window mean |dE| as a fraction of the typical
  // delivered cost. The ceiling (and with it re-initiation) is reached only
  // when the recent variation is a large fraction of the cost itself.
  double f_delta_fraction = 0.04;

  // Heuristic exploration-rate controllers.
  double heuristic_eps_init = 0.5;
  int gd_window = 10;      // delivered packets per probe phase
  double gd_delta = 0.05;  // finite-difference half step
  double gd_step = 0.2;    // gradient step size
  int ga_population = 8;
  int ga_generation_packets = 20;
  double ga_mutation_sigma = 0.05;
  int pso_particles = 8;
  int pso_iteration_packets = 20;
  double pso_inertia = 0.7;
  double pso_cognitive = 1.5;
  double pso_social = 1.5;
};

inline constexpr double kFMin = 0.5;
inline constexpr double kFMax = 10.0;
inline constexpr int kCostHistoryLen = 10;  // H

// Cooling schedule T = k_max/k, held at 1 once k passes k_max.
double base_temperature(long k, long k_max);

// Ablation variant: geometric decay from k_max to 1 over k_max iterations.
double exponential_temperature(long k, long k_max);

double scale_temperature(double t, double f);

// Metropolis acceptance: 1 when the random action looks no worse, otherwise
// exp(-(a_r - a_p)/T).
double acceptance_probability(double a_p_cost, double a_r_cost, double t);

// gamma times the mean absolute successive difference over the cost
// window, clamped into [kFMin, kFMax]. Fewer than 2 entries floors at kFMin.
double update_f(std::span<const double> history, double gamma);

// Annealing state of one node. A fresh node starts at the top of the
// cooling schedule with a neutral scaling factor; only a detected segment
// change (reinit) pins f to the ceiling.
struct SAState {
  long k = 1;
  long k_max = 50;
  double f = 1.0;
  std::vector<double> history;      // recent cost-signal window
  double cost_scale = 0.0;          // slow EMA of the cost magnitude
  long scale_samples = 0;
  double delta_fraction = 0.04;     // see PolicyParams::f_delta_fraction
  bool adaptive_f = true;           // false pins f (SAHQ)
  bool exponential_cooling = false;

  static constexpr double kScaleSmoothing = 0.01;

  explicit SAState(long k_max_iters = 50, bool adaptive = true)
      : k_max(k_max_iters), adaptive_f(adaptive) {}

  // Scheduled temperature for the current iteration: the k_max/k descent
  // (floored at 1 past k_max) scaled by f.
  double current_temperature() const;

  double gamma() const;

  // Feeds one delivered end-to-end cost; recomputes f when adaptive.
  void observe_cost(double cost);

  void reinit();
};

struct SaDecision {
  int next_hop = -1;
  double temperature = 0.0;
  double probability = 0.0;  // acceptance probability of the random action
  bool explored = false;     // random action taken
};

// Algorithm step: compare the greedy action against a uniformly random one,
// accept the random one with the Metropolis probability at the current scaled
// temperature. Advances the iteration counter.
SaDecision sa_select(const QTable& qt, int dest, std::span<const int> candidates,
                     SAState& sa, std::mt19937_64& rng);

int ree_select(const QTable& qt, int dest, std::span<const int> candidates,
               double epsilon, std::mt19937_64& rng);

int pe_select(const QTable& qt, int dest, std::span<const int> candidates,
              double temperature, std::mt19937_64& rng);

// Scalar exploration-rate optimizers used by the Gd/Ga/Pso baselines. Each
// maintains epsilon in [0, 1] and consumes delivered-packet costs as the
// objective signal.
class GdController {
 public:
  GdController(const PolicyParams& p);
  double epsilon() const;
  void on_delivery(double cost);
  double base() const { return base_; }

 private:
  double base_;
  double delta_;
  double step_;
  int window_;
  bool probing_plus_ = true;
  double acc_ = 0.0;
  int count_ = 0;
  double j_plus_ = 0.0;
};

class GaController {
 public:
  GaController(const PolicyParams& p, std::uint64_t seed);
  double epsilon() const { return pop_[active_]; }
  void on_delivery(double cost);

 private:
  void evolve();

  std::mt19937_64 rng_;
  std::vector<double> pop_;
  std::vector<double> cost_sum_;
  std::vector<int> cost_count_;
  std::vector<double> fitness_;  // lower is better
  std::size_t active_ = 0;
  int generation_packets_;
  int seen_ = 0;
  double sigma_;
};

class PsoController {
 public:
  PsoController(const PolicyParams& p, std::uint64_t seed);
  double epsilon() const { return x_[active_]; }
  void on_delivery(double cost);

 private:
  void step();

  std::mt19937_64 rng_;
  std::vector<double> x_, v_, pbest_, pbest_val_;
  std::vector<double> cost_sum_;
  std::vector<int> cost_count_;
  double gbest_ = 0.0, gbest_val_ = 0.0;
  bool has_gbest_ = false;
  std::size_t active_ = 0;
  int iteration_packets_;
  int seen_ = 0;
  double inertia_, cognitive_, social_;
};

// Per-node forwarding policy: owns the node's selection state (annealing
// clock, exploration-rate controller) and its RNG stream.
class NodePolicy {
 public:
  NodePolicy(PolicyKind kind, const PolicyParams& params, std::uint64_t seed);

  // Picks the next hop among candidates (nonempty).
  int select(const QTable& qt, int dest, std::span<const int> candidates);

  // Called when a packet this node forwarded is delivered. cost is the
  // end-to-end delivered cost (the heuristic controllers' objective);
  // q_estimate is the node's current best estimate toward the destination
  // and feeds the dynamicity history. Q-value variation carries the same
  // information as the consumed energy with far lighter tails. Callers
  // without a table pass the cost for both.
  void on_delivery(double cost, double q_estimate);
  void on_delivery(double cost) { on_delivery(cost, cost); }

  void reinit_segment();

  PolicyKind kind() const { return kind_; }
  bool full_echo() const;
  bool sa_family() const;

  const SAState& sa_state() const { return sa_; }
  // Trace of the last select() call (SA family only).
  double last_temperature() const { return last_temperature_; }
  double last_f() const { return last_f_; }
  long last_k() const { return last_k_; }
  double current_epsilon() const;

  // Test hook: pin the heuristic/epsilon exploration rate.
  void force_epsilon(double eps) { forced_epsilon_ = eps; }

 private:
  PolicyKind kind_;
  PolicyParams params_;
  std::mt19937_64 rng_;
  SAState sa_;
  std::optional<GdController> gd_;
  std::optional<GaController> ga_;
  std::optional<PsoController> pso_;
  std::optional<double> forced_epsilon_;
  double last_temperature_ = 0.0;
  double last_f_ = 0.0;
  long last_k_ = 0;
};

}  // namespace fanetsim

#endif  // FANETSIM_POLICY_HPP_
