#include <cmath>

#include "doctest.h"
#include "liquidate/learner.hpp"

using namespace liq;

namespace {

World quiet_world(int n) {
  const Grid g = make_grid(1.0, n);
  return World{make_theta(1.0, Exponential{1.0, 1.0}, g), SignalModel{}, NoiseModel{0.1, 0.1}, CostParams{0.0, 1.0, 1.0}};
}

}  // namespace

TEST_CASE("cycle bookkeeping") {
  CHECK(initial_explorations(0.1, 1.0) == 7);
  const std::vector<int> idx = exploration_indices(5, 1.0 / 3.0, 13);
  CHECK(idx == std::vector<int>{1, 2, 3, 4, 5, 7, 9, 11, 13});
  CHECK(cycle_end(1, 5, 1.0 / 3.0) == 7);
  CHECK(cycle_end(4, 5, 1.0 / 3.0) == 13);
  CHECK(cycle_index(8, 5, 1.0 / 3.0) == 2);
  CHECK(cycle_index(5, 5, 1.0 / 3.0) == 0);
  CHECK(cycle_index(7, 5, 1.0 / 3.0) == 1);
  CHECK(exploitation_length(8, 1.0 / 3.0) == 2);
  CHECK(exploitation_length(7, 1.0 / 3.0) == 1);

  const std::vector<int> tiny = exploration_indices(3, 1e-6, 15);
  CHECK(tiny == std::vector<int>{1, 2, 3, 5, 7, 9, 11, 13, 15});
}

TEST_CASE("regret exponent fit") {
  std::vector<double> a, b;
  for (int N = 1; N <= 1000; ++N) {
    a.push_back(std::pow(N, 0.75));
    b.push_back(3.0 * N);
  }
  CHECK(std::abs(fit_regret_exponent(a) - 0.75) <= 1e-9);
  CHECK(fit_regret_exponent(b) == doctest::Approx(1.0));
  CHECK_THROWS(fit_regret_exponent(std::vector<double>(50, 1.0)));
}

TEST_CASE("degenerate run is pure exploration") {
  const World w = quiet_world(32);
  LearnerConfig cfg;
  cfg.N_max = 5;
  const LearningRun run = run_algorithm(cfg, w);
  REQUIRE(run.ledger.size() == 5);
  const double gap = run.ledger[0].gap;
  for (const auto& row : run.ledger) {
    CHECK(row.phase == Phase::Explore);
    CHECK(row.gap == doctest::Approx(gap).epsilon(1e-12));
  }
  CHECK(run.ledger.back().regret == doctest::Approx(5 * gap));
  CHECK(run.estimates.empty());
}

TEST_CASE("oracle parameter exploits at zero gap") {
  const World w = quiet_world(32);
  LearnerConfig cfg;
  cfg.N_max = 300;
  cfg.fixed_theta = w.theta_star;
  const LearningRun run = run_algorithm(cfg, w);
  const std::vector<int> idx = exploration_indices(run.m0, cfg.kappa, cfg.N_max);
  double explore_sum = 0.0;
  int explores = 0;
  for (const auto& row : run.ledger) {
    if (row.phase == Phase::Exploit) {
      CHECK(std::abs(row.gap) <= 1e-10);
    } else {
      explore_sum += row.gap;
      ++explores;
    }
  }
  CHECK(explores == static_cast<int>(idx.size()));
  CHECK(run.ledger.back().regret == doctest::Approx(explore_sum));
}

TEST_CASE("learning run") {
  const World w = quiet_world(32);
  LearnerConfig cfg;
  cfg.N_max = 400;
  cfg.seed = 17;
  const LearningRun a = run_algorithm(cfg, w);
  const LearningRun b = run_algorithm(cfg, w);

  int estimates = 0;
  for (std::size_t m = 0; m < a.ledger.size(); ++m) {
    const auto& r = a.ledger[m];
    CHECK(r.gap >= -1e-8);
    CHECK(r.gap == b.ledger[m].gap);
    if (r.phase == Phase::Exploit) {
      CHECK(r.snapshot >= 0);
      CHECK(r.snapshot <= r.cycle - 1);
    }
  }
  for (const auto& e : a.estimates) estimates += e.installed;
  CHECK(estimates >= 1);
  CHECK(a.estimates.front().N == a.m0);
  CHECK(a.regret_curve().back() == a.ledger.back().regret);
  CHECK(ledger_table(a).rows.size() == a.ledger.size());

  cfg.seed = 18;
  CHECK(run_algorithm(cfg, w).ledger.back().regret != a.ledger.back().regret);
}
