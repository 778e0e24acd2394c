#include "fanetsim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fanetsim {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::Ree: return "ree";
    case PolicyKind::Pe: return "pe";
    case PolicyKind::Qr: return "qr";
    case PolicyKind::Afeq: return "afeq";
    case PolicyKind::Sahq: return "sahq";
    case PolicyKind::AdaptiveSa: return "adaptive-sa";
    case PolicyKind::Gd: return "gd";
    case PolicyKind::Ga: return "ga";
    case PolicyKind::Pso: return "pso";
  }
  return "unknown";
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "greedy") return PolicyKind::Greedy;
  if (name == "ree") return PolicyKind::Ree;
  if (name == "pe") return PolicyKind::Pe;
  if (name == "qr") return PolicyKind::Qr;
  if (name == "afeq") return PolicyKind::Afeq;
  if (name == "sahq") return PolicyKind::Sahq;
  if (name == "adaptive-sa" || name == "proposed") return PolicyKind::AdaptiveSa;
  if (name == "gd") return PolicyKind::Gd;
  if (name == "ga") return PolicyKind::Ga;
  if (name == "pso") return PolicyKind::Pso;
  throw std::invalid_argument("unknown policy: " + name);
}

double base_temperature(long k, long k_max) {
  if (k_max < 1 || k < 1) throw std::invalid_argument("k and k_max must be >= 1");
  if (k >= k_max) return 1.0;  // exploitation floor
  return static_cast<double>(k_max) / static_cast<double>(k);
}

double exponential_temperature(long k, long k_max) {
  if (k_max < 1 || k < 1) throw std::invalid_argument("k and k_max must be >= 1");
  if (k >= k_max || k_max == 1) return 1.0;
  const double frac =
      static_cast<double>(k - 1) / static_cast<double>(k_max - 1);
  return std::pow(static_cast<double>(k_max), 1.0 - frac);
}

double scale_temperature(double t, double f) { return t * f; }

double acceptance_probability(double a_p_cost, double a_r_cost, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("temperature must be > 0");
  if (a_r_cost < a_p_cost) return 1.0;
  return std::exp(-(a_r_cost - a_p_cost) / t);
}

double update_f(std::span<const double> history, double gamma) {
  if (history.size() < 2) return kFMin;
  double sum = 0.0;
  for (std::size_t i = 1; i < history.size(); ++i)
    sum += std::abs(history[i] - history[i - 1]);
  const double mean_abs = sum / static_cast<double>(history.size() - 1);
  return std::clamp(gamma * mean_abs, kFMin, kFMax);
}

double SAState::current_temperature() const {
  const double base = exponential_cooling ? exponential_temperature(k, k_max)
                                          : base_temperature(k, k_max);
  // f re-raises the temperature mid-schedule; the schedule's own starting
  // point k_max is "the highest value", so scaling never exceeds it.
  return std::min(static_cast<double>(k_max), scale_temperature(base, f));
}

double SAState::gamma() const {
  const double reference = delta_fraction * cost_scale;
  return reference > 0.0 ? 1.0 / reference : 0.0;
}

void SAState::observe_cost(double cost) {
  history.push_back(cost);
  if (history.size() > static_cast<std::size_t>(kCostHistoryLen))
    history.erase(history.begin());
  // Running mean until enough samples arrive, then a slow EMA; a lucky or
  // unlucky first delivery must not skew the reference for long.
  scale_samples += 1;
  const double alpha =
      std::max(kScaleSmoothing, 1.0 / static_cast<double>(scale_samples));
  cost_scale = (1.0 - alpha) * cost_scale + alpha * std::abs(cost);
  if (adaptive_f) f = update_f(history, gamma());
}

void SAState::reinit() {
  k = 1;
  history.clear();
  if (adaptive_f) f = kFMax;
}

SaDecision sa_select(const QTable& qt, int dest,
                     std::span<const int> candidates, SAState& sa,
                     std::mt19937_64& rng) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  SaDecision d;
  d.temperature = sa.current_temperature();
  if (candidates.size() == 1) {
    d.next_hop = candidates.front();
    d.probability = 1.0;
    sa.k += 1;
    return d;
  }
  const auto greedy = qt.best_estimate(dest, candidates);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  const int random_action = candidates[pick(rng)];
  const double a_p = greedy->q;
  const double a_r = qt.value(dest, random_action);
  d.probability = acceptance_probability(a_p, a_r, d.temperature);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < d.probability) {
    d.next_hop = random_action;
    d.explored = true;
  } else {
    d.next_hop = greedy->neighbor;
  }
  sa.k += 1;
  return d;
}

int ree_select(const QTable& qt, int dest, std::span<const int> candidates,
               double epsilon, std::mt19937_64& rng) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (epsilon > 0.0 && unit(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return candidates[pick(rng)];
  }
  return qt.best_estimate(dest, candidates)->neighbor;
}

int pe_select(const QTable& qt, int dest, std::span<const int> candidates,
              double temperature, std::mt19937_64& rng) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  if (!(temperature > 0.0))
    return qt.best_estimate(dest, candidates)->neighbor;
  std::vector<int> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  double q_min = qt.value(dest, sorted.front());
  for (int nb : sorted) q_min = std::min(q_min, qt.value(dest, nb));
  std::vector<double> weights;
  weights.reserve(sorted.size());
  double total = 0.0;
  for (int nb : sorted) {
    const double w = std::exp(-(qt.value(dest, nb) - q_min) / temperature);
    weights.push_back(w);
    total += w;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng) * total;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    u -= weights[i];
    if (u <= 0.0) return sorted[i];
  }
  return sorted.back();
}

GdController::GdController(const PolicyParams& p)
    : base_(p.heuristic_eps_init),
      delta_(p.gd_delta),
      step_(p.gd_step),
      window_(p.gd_window) {}

double GdController::epsilon() const {
  const double e = probing_plus_ ? base_ + delta_ : base_ - delta_;
  return std::clamp(e, 0.0, 1.0);
}

void GdController::on_delivery(double cost) {
  acc_ += cost;
  count_ += 1;
  if (count_ < window_) return;
  const double mean = acc_ / count_;
  acc_ = 0.0;
  count_ = 0;
  if (probing_plus_) {
    j_plus_ = mean;
    probing_plus_ = false;
  } else {
    const double grad = (j_plus_ - mean) / (2.0 * delta_);
    base_ = std::clamp(base_ - step_ * grad, 0.0, 1.0);
    probing_plus_ = true;
  }
}

GaController::GaController(const PolicyParams& p, std::uint64_t seed)
    : rng_(seed),
      generation_packets_(p.ga_generation_packets),
      sigma_(p.ga_mutation_sigma) {
  const int n = std::max(2, p.ga_population);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  pop_.resize(n);
  for (double& e : pop_) e = unit(rng_);
  cost_sum_.assign(n, 0.0);
  cost_count_.assign(n, 0);
  fitness_.assign(n, std::numeric_limits<double>::infinity());
}

void GaController::on_delivery(double cost) {
  cost_sum_[active_] += cost;
  cost_count_[active_] += 1;
  seen_ += 1;
  active_ = (active_ + 1) % pop_.size();
  if (seen_ < generation_packets_) return;
  seen_ = 0;
  evolve();
}

void GaController::evolve() {
  const std::size_t n = pop_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cost_count_[i] > 0) fitness_[i] = cost_sum_[i] / cost_count_[i];
    cost_sum_[i] = 0.0;
    cost_count_[i] = 0;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (fitness_[i] < fitness_[best]) best = i;

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::normal_distribution<double> mut(0.0, sigma_);
  std::vector<double> next(n);
  next[0] = pop_[best];  // elitism
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t a = pick(rng_);
    const std::size_t b = pick(rng_);
    const std::size_t parent = fitness_[a] <= fitness_[b] ? a : b;
    next[i] = std::clamp(pop_[parent] + mut(rng_), 0.0, 1.0);
  }
  pop_ = std::move(next);
  active_ = 0;
}

PsoController::PsoController(const PolicyParams& p, std::uint64_t seed)
    : rng_(seed),
      iteration_packets_(p.pso_iteration_packets),
      inertia_(p.pso_inertia),
      cognitive_(p.pso_cognitive),
      social_(p.pso_social) {
  const int n = std::max(2, p.pso_particles);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  x_.resize(n);
  for (double& x : x_) x = unit(rng_);
  v_.assign(n, 0.0);
  pbest_ = x_;
  pbest_val_.assign(n, std::numeric_limits<double>::infinity());
  cost_sum_.assign(n, 0.0);
  cost_count_.assign(n, 0);
}

void PsoController::on_delivery(double cost) {
  cost_sum_[active_] += cost;
  cost_count_[active_] += 1;
  seen_ += 1;
  active_ = (active_ + 1) % x_.size();
  if (seen_ < iteration_packets_) return;
  seen_ = 0;
  step();
}

void PsoController::step() {
  const std::size_t n = x_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cost_count_[i] == 0) continue;
    const double mean = cost_sum_[i] / cost_count_[i];
    cost_sum_[i] = 0.0;
    cost_count_[i] = 0;
    if (mean < pbest_val_[i]) {
      pbest_val_[i] = mean;
      pbest_[i] = x_[i];
    }
    if (!has_gbest_ || mean < gbest_val_) {
      gbest_val_ = mean;
      gbest_ = x_[i];
      has_gbest_ = true;
    }
  }
  if (!has_gbest_) return;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r1 = unit(rng_);
    const double r2 = unit(rng_);
    v_[i] = inertia_ * v_[i] + cognitive_ * r1 * (pbest_[i] - x_[i]) +
            social_ * r2 * (gbest_ - x_[i]);
    v_[i] = std::clamp(v_[i], -0.5, 0.5);
    x_[i] = std::clamp(x_[i] + v_[i], 0.0, 1.0);
  }
  active_ = 0;
}

NodePolicy::NodePolicy(PolicyKind kind, const PolicyParams& params,
                       std::uint64_t seed)
    : kind_(kind),
      params_(params),
      rng_(seed),
      sa_(params.k_max, kind != PolicyKind::Sahq) {
  sa_.exponential_cooling = params.exponential_cooling;
  sa_.delta_fraction = params.f_delta_fraction;
  switch (kind_) {
    case PolicyKind::Gd: gd_.emplace(params_); break;
    case PolicyKind::Ga: ga_.emplace(params_, seed ^ 0x6761ULL); break;
    case PolicyKind::Pso: pso_.emplace(params_, seed ^ 0x70736fULL); break;
    default: break;
  }
}

bool NodePolicy::full_echo() const {
  switch (kind_) {
    case PolicyKind::Afeq:
    case PolicyKind::AdaptiveSa:
    case PolicyKind::Gd:
    case PolicyKind::Ga:
    case PolicyKind::Pso:
      return true;
    default:
      // Sahq is the cited SA-on-conventional-Q-routing baseline; the echo
      // mechanism belongs to the adaptive lineage.
      return false;
  }
}

bool NodePolicy::sa_family() const {
  return kind_ == PolicyKind::Sahq || kind_ == PolicyKind::AdaptiveSa;
}

double NodePolicy::current_epsilon() const {
  if (forced_epsilon_) return *forced_epsilon_;
  switch (kind_) {
    case PolicyKind::Greedy:
    case PolicyKind::Qr:
      return 0.0;
    case PolicyKind::Ree:
    case PolicyKind::Afeq:
      return params_.epsilon;
    case PolicyKind::Gd: return gd_->epsilon();
    case PolicyKind::Ga: return ga_->epsilon();
    case PolicyKind::Pso: return pso_->epsilon();
    default:
      return 0.0;
  }
}

int NodePolicy::select(const QTable& qt, int dest,
                       std::span<const int> candidates) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  switch (kind_) {
    case PolicyKind::Sahq:
    case PolicyKind::AdaptiveSa: {
      const SaDecision d = sa_select(qt, dest, candidates, sa_, rng_);
      last_temperature_ = d.temperature;
      last_f_ = sa_.f;
      last_k_ = sa_.k - 1;  // iteration that produced the decision
      return d.next_hop;
    }
    case PolicyKind::Pe:
      return pe_select(qt, dest, candidates, params_.pe_temperature, rng_);
    default:
      return ree_select(qt, dest, candidates, current_epsilon(), rng_);
  }
}

void NodePolicy::on_delivery(double cost, double q_estimate) {
  switch (kind_) {
    case PolicyKind::AdaptiveSa:
      sa_.observe_cost(q_estimate);
      if (sa_.f >= params_.reinit_threshold) sa_.reinit();
      break;
    case PolicyKind::Sahq:
      break;  // non-adaptive temperature, cost history unused
    case PolicyKind::Gd: gd_->on_delivery(cost); break;
    case PolicyKind::Ga: ga_->on_delivery(cost); break;
    case PolicyKind::Pso: pso_->on_delivery(cost); break;
    default:
      break;
  }
}

void NodePolicy::reinit_segment() { sa_.reinit(); }

}  // namespace fanetsim
