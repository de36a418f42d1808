#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "liquidate/control.hpp"
#include "liquidate/csv.hpp"
#include "liquidate/estimator.hpp"
#include "liquidate/market.hpp"

namespace liq {

struct World {
  Theta theta_star;
  SignalModel signal;
  NoiseModel noise;
  CostParams cost;

  const Grid& grid() const { return theta_star.G.grid; }
};

struct LearnerConfig {
  double eta = 0.1;
  double C = 1.0;  // m0 = ceil(C (ln(1/eta)^2 + 1))
  double kappa = 1.0 / 3.0;
  AdmissibleSet admissible;
  double ue_rate = 1.0;  // exploration strategy u^e = const
  EstimatorConfig estimator;
  int N_max = 1000;
  std::uint64_t seed = 1;
  /// Debug hook: exploit with this parameter throughout (estimates are still
  /// computed and recorded).
  std::optional<Theta> fixed_theta;
};

/// Conditional-expectation sources for the learner's greedy strategy and the
/// comparator greedy(theta_star). Null means the analytic OU oracle.
struct CondExpSources {
  std::shared_ptr<const CondExpProvider> learner;
  std::shared_ptr<const CondExpProvider> comparator;
};

int initial_explorations(double eta, double C);
/// n(k) = max(1, floor(k^kappa))
int exploitation_length(int k, double kappa);
/// L(k) = m0 + sum_{i<=k} n(i) + k, with L(0) = m0.
int cycle_end(int k, int m0, double kappa);
/// 0 during the initial phase, otherwise the k with L(k-1) < m <= L(k).
int cycle_index(int m, int m0, double kappa);
/// Exploration episode indices (1-based) up to and including m.
std::vector<int> exploration_indices(int m0, double kappa, int m);

enum class Phase { Explore, Exploit };
const char* phase_name(Phase p);

struct LedgerRow {
  int m = 0;
  Phase phase = Phase::Explore;
  int cycle = 0;
  int snapshot = -1;  // index of the estimate driving the episode, -1 if none
  double gap = 0.0;
  double regret = 0.0;
  double lambda_est = 0.0;  // NaN before the first estimate
  double g_err_l2 = 0.0;
};

struct EstimateRecord {
  int k = 0;
  int N = 0;
  double lambda = 0.0;
  double g_err_l2 = 0.0;
  double tau = 0.0;
  int cells = 0;
  bool admissible = false;
  bool installed = false;
};

struct LearningRun {
  LearnerConfig config;
  int m0 = 0;
  std::vector<LedgerRow> ledger;
  std::vector<EstimateRecord> estimates;
  int admissibility_violations = 0;

  std::vector<double> regret_curve() const;
};

using EpisodeHook = std::function<void(int m, const EpisodeData& ep)>;

LearningRun run_algorithm(const LearnerConfig& cfg, const World& world, const CondExpSources& sources = {},
                          const EpisodeHook& on_episode = {});

/// Slope of log R(N) against log N over the last tail_fraction of episodes.
double fit_regret_exponent(const std::vector<double>& regret, double tail_fraction = 0.5);
double fit_regret_exponent(const LearningRun& run, double tail_fraction = 0.5);

CsvTable ledger_table(const LearningRun& run);

}  // namespace liq
