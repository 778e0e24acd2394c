#ifndef FANETSIM_ROUTING_HPP_
#define FANETSIM_ROUTING_HPP_

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>

namespace fanetsim {

// One hop's cost feedback: q = sender queuing cost, s = link transmission
// cost, t = receiver's estimate of the remaining trip cost.
struct HopFeedback {
  double queue_cost = 0.0;
  double link_cost = 0.0;
  double remaining_estimate = 0.0;

  double total() const { return queue_cost + link_cost + remaining_estimate; }
};

// Learning-rate state for the dual-rate full-echo update. T_est tracks the
// average delivered cost (EMA), T_max a slowly decaying maximum of it.
struct LearningRates {
  double eta = 0.5;     // basic rate, (0, 1]
  double k_tune = 1.0;  // tunable multiplier on the additional rate
  double t_est = 0.0;
  double t_max = 0.0;
  long deliveries = 0;
};

inline constexpr double kDeliveryEmaSmoothing = 0.1;
inline constexpr double kDeliveryMaxDecay = 0.999;

// Additional learning rate: (T_est/T_max) * eta * k_tune, clamped to [0, 1].
// No history yet (T_max == 0) gives 0.
double compute_eta2(const LearningRates& rates);

void update_delivery_stats(LearningRates& rates, double delivered_cost);

// Per-node estimated delivery costs keyed by (destination, neighbor).
// Unseen entries read as init_value and are only materialized once written.
class QTable {
 public:
  explicit QTable(int owner = 0, double init_value = 0.0)
      : owner_(owner), init_value_(init_value) {}

  int owner() const { return owner_; }
  double init_value() const { return init_value_; }
  std::size_t entry_count() const { return entries_.size(); }

  double value(int dest, int neighbor) const;
  void set(int dest, int neighbor, double q);
  bool has_entry(int dest, int neighbor) const;

  struct Best {
    int neighbor = -1;
    double q = 0.0;
  };

  // Minimal-Q candidate; ties go to the smallest node id. nullopt on an
  // empty candidate set (caller treats it as a drop).
  std::optional<Best> best_estimate(int dest,
                                    std::span<const int> candidates) const;

  // Minimum stored estimate toward dest over all materialized entries;
  // nullopt when the destination has never been seen.
  std::optional<double> min_for_dest(int dest) const;

  // Single Bellman step on the selected neighbor's entry toward
  // q + s + t; returns the new value.
  double update_selected(int dest, int neighbor, const HopFeedback& fb,
                         double eta);

  // Dual-rate update: the selected neighbor moves with eta, every other
  // neighbor present in feedbacks moves with eta2 derived from rates.
  // Neighbors lacking feedback are skipped; the skip count is returned.
  int update_full_echo(int dest, int selected,
                       std::span<const int> neighbors,
                       const std::map<int, HopFeedback>& feedbacks,
                       const LearningRates& rates);

  // (owner, destination, neighbor, q_value) rows, sorted.
  void dump(std::ostream& out) const;

 private:
  int owner_;
  double init_value_;
  std::map<std::pair<int, int>, double> entries_;
};

}  // namespace fanetsim

#endif  // FANETSIM_ROUTING_HPP_
