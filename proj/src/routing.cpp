#include "fanetsim/routing.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace fanetsim {

double compute_eta2(const LearningRates& rates) {
  if (rates.t_max <= 0.0) return 0.0;
  const double eta2 = (rates.t_est / rates.t_max) * rates.eta * rates.k_tune;
  return std::clamp(eta2, 0.0, 1.0);
}

void update_delivery_stats(LearningRates& rates, double delivered_cost) {
  if (delivered_cost < 0.0)
    throw std::invalid_argument("delivered cost must be >= 0");
  if (rates.deliveries == 0)
    rates.t_est = delivered_cost;
  else
    rates.t_est = (1.0 - kDeliveryEmaSmoothing) * rates.t_est +
                  kDeliveryEmaSmoothing * delivered_cost;
  rates.deliveries += 1;
  rates.t_max = std::max(rates.t_max * kDeliveryMaxDecay, rates.t_est);
}

double QTable::value(int dest, int neighbor) const {
  auto it = entries_.find({dest, neighbor});
  return it == entries_.end() ? init_value_ : it->second;
}

void QTable::set(int dest, int neighbor, double q) {
  entries_[{dest, neighbor}] = q;
}

bool QTable::has_entry(int dest, int neighbor) const {
  return entries_.count({dest, neighbor}) != 0;
}

std::optional<QTable::Best> QTable::best_estimate(
    int dest, std::span<const int> candidates) const {
  if (candidates.empty()) return std::nullopt;
  std::vector<int> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  Best best{sorted.front(), value(dest, sorted.front())};
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double q = value(dest, sorted[i]);
    if (q < best.q) best = Best{sorted[i], q};
  }
  return best;
}

std::optional<double> QTable::min_for_dest(int dest) const {
  auto it = entries_.lower_bound({dest, std::numeric_limits<int>::min()});
  std::optional<double> best;
  for (; it != entries_.end() && it->first.first == dest; ++it)
    if (!best || it->second < *best) best = it->second;
  return best;
}

double QTable::update_selected(int dest, int neighbor, const HopFeedback& fb,
                               double eta) {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::invalid_argument("eta must be in (0, 1]");
  const double q_old = value(dest, neighbor);
  const double q_new = q_old + eta * (fb.total() - q_old);
  set(dest, neighbor, q_new);
  return q_new;
}

int QTable::update_full_echo(int dest, int selected,
                             std::span<const int> neighbors,
                             const std::map<int, HopFeedback>& feedbacks,
                             const LearningRates& rates) {
  const double eta2 = compute_eta2(rates);
  int skipped = 0;
  for (int nb : neighbors) {
    auto it = feedbacks.find(nb);
    if (it == feedbacks.end()) {
      ++skipped;
      continue;
    }
    if (nb == selected) {
      update_selected(dest, nb, it->second, rates.eta);
    } else if (eta2 > 0.0) {
      // eta2 == 0 must leave the entry bitwise untouched, so skip the write.
      const double q_old = value(dest, nb);
      set(dest, nb, q_old + eta2 * (it->second.total() - q_old));
    }
  }
  return skipped;
}

void QTable::dump(std::ostream& out) const {
  for (const auto& [key, q] : entries_)
    out << owner_ << ' ' << key.first << ' ' << key.second << ' ' << q << '\n';
}

}  // namespace fanetsim
