#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fanetsim/routing.hpp"

using namespace fanetsim;

TEST_CASE("best_estimate: picks the minimum") {
  QTable qt(0);
  qt.set(9, 1, 5.0);
  qt.set(9, 2, 3.0);
  const std::vector<int> candidates{1, 2};
  const auto best = qt.best_estimate(9, candidates);
  REQUIRE(best.has_value());
  CHECK(best->neighbor == 2);
  CHECK(best->q == 3.0);
}

TEST_CASE("best_estimate: all-equal ties go to the smallest id") {
  QTable qt(0);
  for (int nb : {4, 2, 7}) qt.set(9, nb, 1.5);
  const std::vector<int> candidates{7, 4, 2};
  const auto best = qt.best_estimate(9, candidates);
  REQUIRE(best.has_value());
  CHECK(best->neighbor == 2);
}

TEST_CASE("best_estimate: unseen entries read as init_value") {
  QTable qt(0, 10.0);
  qt.set(9, 3, 12.0);
  const std::vector<int> candidates{3, 5};
  const auto best = qt.best_estimate(9, candidates);
  REQUIRE(best.has_value());
  CHECK(best->neighbor == 5);  // init 10 < stored 12
  CHECK(best->q == 10.0);
  CHECK_FALSE(qt.has_entry(9, 5));  // reading must not materialize
}

TEST_CASE("best_estimate: empty candidates means no neighbor") {
  QTable qt(0);
  CHECK_FALSE(qt.best_estimate(9, {}).has_value());
}

TEST_CASE("best_estimate: matches a linear-scan oracle on random tables") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> uq(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    QTable qt(0);
    std::vector<int> candidates;
    for (int nb = 0; nb < 6; ++nb) {
      candidates.push_back(nb);
      qt.set(9, nb, uq(rng));
    }
    const auto best = qt.best_estimate(9, candidates);
    int expect = 0;
    for (int nb = 1; nb < 6; ++nb)
      if (qt.value(9, nb) < qt.value(9, expect)) expect = nb;
    CHECK(best->neighbor == expect);
    CHECK(best->q == qt.value(9, expect));
  }
}

TEST_CASE("update_selected: direct evaluation examples") {
  QTable qt(0);
  qt.set(9, 1, 100.0);
  // eta=0.5, q+s+t=60 -> 100 + 0.5*(60-100) = 80
  CHECK(qt.update_selected(9, 1, HopFeedback{10.0, 20.0, 30.0}, 0.5) == 80.0);

  // eta=1 replaces with the target.
  qt.set(9, 2, 55.0);
  CHECK(qt.update_selected(9, 2, HopFeedback{1.0, 2.0, 3.0}, 1.0) == 6.0);

  // Fixed point: target == old leaves the value unchanged.
  qt.set(9, 3, 42.0);
  CHECK(qt.update_selected(9, 3, HopFeedback{42.0, 0.0, 0.0}, 0.7) == 42.0);
}

TEST_CASE("update_selected: contraction and non-negativity properties") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uval(0.0, 200.0);
  std::uniform_real_distribution<double> ueta(0.01, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    QTable qt(0);
    const double q_old = uval(rng);
    qt.set(5, 1, q_old);
    const HopFeedback fb{uval(rng) / 3.0, uval(rng) / 3.0, uval(rng) / 3.0};
    const double eta = ueta(rng);
    const double q_new = qt.update_selected(5, 1, fb, eta);
    const double target = fb.total();
    // |Q_new - target| = (1 - eta) * |Q_old - target| exactly (1-ulp scale).
    const double lhs = std::abs(q_new - target);
    const double rhs = (1.0 - eta) * std::abs(q_old - target);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(q_new >= 0.0);
  }
}

TEST_CASE("update_selected: rejects an out-of-range learning rate") {
  QTable qt(0);
  CHECK_THROWS_AS(qt.update_selected(1, 2, HopFeedback{}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(qt.update_selected(1, 2, HopFeedback{}, 1.5),
                  std::invalid_argument);
}

TEST_CASE("compute_eta2: direct evaluation examples") {
  LearningRates rates;
  rates.eta = 0.5;
  rates.k_tune = 2.0;
  rates.t_est = 80.0;
  rates.t_max = 80.0;
  CHECK(compute_eta2(rates) == 1.0);  // 1.0 * 0.5 * 2 = 1, clamped edge

  rates.t_est = 0.0;
  CHECK(compute_eta2(rates) == 0.0);

  rates.t_est = 50.0;
  rates.t_max = 100.0;
  rates.k_tune = 0.4;
  CHECK(compute_eta2(rates) == doctest::Approx(0.1).epsilon(1e-15));

  rates.t_max = 0.0;  // no history yet
  CHECK(compute_eta2(rates) == 0.0);
}

TEST_CASE("update_full_echo: eta2 == 0 leaves others bitwise unchanged") {
  QTable qt(0);
  qt.set(9, 1, 100.0);
  qt.set(9, 2, 0.1 + 0.2);  // deliberately non-round bits
  qt.set(9, 3, 77.7);
  const double before_2 = qt.value(9, 2);
  const double before_3 = qt.value(9, 3);

  LearningRates rates;  // t_max == 0 -> eta2 == 0
  rates.eta = 0.5;
  std::map<int, HopFeedback> fb{
      {1, HopFeedback{5, 5, 10}}, {2, HopFeedback{1, 1, 1}},
      {3, HopFeedback{2, 2, 2}}};
  const std::vector<int> nbs{1, 2, 3};
  const int skipped = qt.update_full_echo(9, 1, nbs, fb, rates);
  CHECK(skipped == 0);
  CHECK(qt.value(9, 1) == 60.0);
  CHECK(qt.value(9, 2) == before_2);
  CHECK(qt.value(9, 3) == before_3);
}

TEST_CASE("update_full_echo: symmetric feedbacks with eta == eta2") {
  QTable qt(0);
  qt.set(9, 1, 50.0);
  qt.set(9, 2, 50.0);
  LearningRates rates;
  rates.eta = 0.5;
  rates.k_tune = 1.0;
  rates.t_est = 10.0;
  rates.t_max = 10.0;  // eta2 = 0.5 == eta
  std::map<int, HopFeedback> fb{{1, HopFeedback{10, 10, 10}},
                                {2, HopFeedback{10, 10, 10}}};
  const std::vector<int> nbs{1, 2};
  qt.update_full_echo(9, 1, nbs, fb, rates);
  CHECK(qt.value(9, 1) == qt.value(9, 2));
  CHECK(qt.value(9, 1) == 40.0);
}

TEST_CASE("update_full_echo: matches scalar recomputation on random input") {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> uval(0.0, 100.0);
  for (int trial = 0; trial < 250; ++trial) {
    QTable qt(0);
    LearningRates rates;
    rates.eta = 0.7;
    rates.k_tune = 0.9;
    rates.t_est = uval(rng);
    rates.t_max = rates.t_est + uval(rng) + 1.0;
    const std::vector<int> nbs{1, 2, 3, 4};
    std::map<int, HopFeedback> fb;
    std::map<int, double> before;
    for (int nb : nbs) {
      const double q = uval(rng);
      qt.set(9, nb, q);
      before[nb] = q;
      fb[nb] = HopFeedback{uval(rng), uval(rng), uval(rng)};
    }
    const int selected = 2;
    qt.update_full_echo(9, selected, nbs, fb, rates);
    const double eta2 = compute_eta2(rates);
    for (int nb : nbs) {
      const double rate = nb == selected ? rates.eta : eta2;
      const double expect =
          before[nb] + rate * (fb[nb].total() - before[nb]);
      CHECK(qt.value(9, nb) == doctest::Approx(expect).epsilon(1e-15));
    }
  }
}

TEST_CASE("update_full_echo: missing feedback skips, never aborts") {
  QTable qt(0);
  qt.set(9, 1, 10.0);
  qt.set(9, 2, 20.0);
  LearningRates rates;
  rates.eta = 0.5;
  std::map<int, HopFeedback> fb{{1, HopFeedback{2, 2, 2}}};
  const std::vector<int> nbs{1, 2};
  const int skipped = qt.update_full_echo(9, 1, nbs, fb, rates);
  CHECK(skipped == 1);
  CHECK(qt.value(9, 1) == 8.0);
  CHECK(qt.value(9, 2) == 20.0);
}

TEST_CASE("update_full_echo: non-neighbor entries never move") {
  QTable qt(0);
  qt.set(9, 1, 10.0);
  qt.set(9, 8, 0.3 + 0.4);   // not a current neighbor
  qt.set(4, 1, 0.1 + 0.7);   // other destination
  const double nb8 = qt.value(9, 8);
  const double d4 = qt.value(4, 1);
  LearningRates rates;
  rates.eta = 0.5;
  rates.t_est = 1.0;
  rates.t_max = 1.0;
  std::map<int, HopFeedback> fb{{1, HopFeedback{1, 1, 1}}};
  const std::vector<int> nbs{1};
  qt.update_full_echo(9, 1, nbs, fb, rates);
  CHECK(qt.value(9, 8) == nb8);
  CHECK(qt.value(4, 1) == d4);
  CHECK(qt.entry_count() == 3);
}

TEST_CASE("update_delivery_stats: EMA and decaying max") {
  LearningRates rates;
  update_delivery_stats(rates, 100.0);
  CHECK(rates.t_est == 100.0);  // warm start on the first delivery
  CHECK(rates.t_max == 100.0);

  update_delivery_stats(rates, 0.0);
  CHECK(rates.t_est == doctest::Approx(90.0));
  CHECK(rates.t_max == doctest::Approx(100.0 * 0.999));

  // T_max >= T_est always.
  LearningRates r2;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ucost(0.0, 500.0);
  for (int i = 0; i < 1000; ++i) {
    update_delivery_stats(r2, ucost(rng));
    CHECK(r2.t_max >= r2.t_est);
    CHECK(r2.t_est >= 0.0);
  }
  CHECK_THROWS_AS(update_delivery_stats(r2, -1.0), std::invalid_argument);
}
