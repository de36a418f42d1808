#include "liquidate/learner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "liquidate/stats.hpp"

namespace liq {

int initial_explorations(double eta, double C) {
  const double l = std::log(1.0 / eta);
  return std::max(1, static_cast<int>(std::ceil(C * (l * l + 1.0))));
}

int exploitation_length(int k, double kappa) {
  // the small offset keeps exact powers (8^{1/3} = 2) from flooring down
  return std::max(1, static_cast<int>(std::floor(std::pow(static_cast<double>(k), kappa) + 1e-9)));
}

int cycle_end(int k, int m0, double kappa) {
  int L = m0;
  for (int i = 1; i <= k; ++i) L += exploitation_length(i, kappa) + 1;
  return L;
}

int cycle_index(int m, int m0, double kappa) {
  if (m <= m0) return 0;
  int k = 0, L = m0;
  while (L < m) L += exploitation_length(++k, kappa) + 1;
  return k;
}

std::vector<int> exploration_indices(int m0, double kappa, int m) {
  if (m0 < 1) throw std::invalid_argument("exploration_indices: m0 must be positive");
  std::vector<int> out;
  for (int i = 1; i <= std::min(m0, m); ++i) out.push_back(i);
  int L = m0;
  for (int k = 1;; ++k) {
    L += exploitation_length(k, kappa) + 1;
    if (L > m) break;
    out.push_back(L);
  }
  return out;
}

const char* phase_name(Phase p) { return p == Phase::Explore ? "explore" : "exploit"; }

std::vector<double> LearningRun::regret_curve() const {
  std::vector<double> r;
  r.reserve(ledger.size());
  for (const auto& row : ledger) r.push_back(row.regret);
  return r;
}

LearningRun run_algorithm(const LearnerConfig& cfg, const World& world, const CondExpSources& sources,
                          const EpisodeHook& on_episode) {
  if (!(cfg.kappa > 0.0 && cfg.kappa < 1.0)) throw std::invalid_argument("run_algorithm: kappa must lie in (0,1)");
  const Grid& g = world.grid();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  LearningRun run;
  run.config = cfg;
  run.m0 = initial_explorations(cfg.eta, cfg.C);

  auto ou = std::make_shared<OuCondExp>(world.signal.beta);
  const std::shared_ptr<const CondExpProvider> ce_learner = sources.learner ? sources.learner : ou;
  const std::shared_ptr<const CondExpProvider> ce_star = sources.comparator ? sources.comparator : ou;

  const Policy star = greedy_control(std::make_shared<ControlAssembly>(world.theta_star, world.cost), ce_star);
  const Policy explore = constant_policy(cfg.ue_rate);
  ObservationSet obs(DiscreteFn::constant(g, cfg.ue_rate));

  Policy exploit = explore;
  int snapshot = -1;
  double lambda_in_force = nan, gerr_in_force = nan;
  if (cfg.fixed_theta) {
    exploit = greedy_control(std::make_shared<ControlAssembly>(*cfg.fixed_theta, world.cost), ce_learner);
    snapshot = 0;
    lambda_in_force = cfg.fixed_theta->lambda;
    gerr_in_force = l2_norm(cfg.fixed_theta->G.values - world.theta_star.G.values, g.h);
  }

  auto estimate = [&](int k) {
    const LseResult est = lse(obs, cfg.estimator, cfg.admissible);
    EstimateRecord rec;
    rec.k = k;
    rec.N = obs.size();
    rec.lambda = est.estimate.lambda;
    rec.g_err_l2 = l2_norm(est.estimate.G.values - world.theta_star.G.values, g.h);
    rec.tau = est.sched.tau;
    rec.cells = est.sched.cells;
    rec.admissible = est.admissible;
    if (!est.admissible) ++run.admissibility_violations;
    const bool first = snapshot < 0;
    if (!cfg.fixed_theta && (est.admissible || first)) {
      try {
        exploit = greedy_control(std::make_shared<ControlAssembly>(est.estimate.theta(), world.cost), ce_learner);
        snapshot = k;
        lambda_in_force = rec.lambda;
        gerr_in_force = rec.g_err_l2;
        rec.installed = true;
      } catch (const NumericalError&) {
        // keep the previous strategy
      }
    }
    run.estimates.push_back(rec);
  };

  double regret = 0.0;
  int cycle = 0, L = run.m0;
  for (int m = 1; m <= cfg.N_max; ++m) {
    if (m > L) L += exploitation_length(++cycle, cfg.kappa) + 1;
    const bool is_explore = m <= run.m0 || m == L;

    Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(m));
    const SignalPath sig = simulate_signal(world.signal, g, rng);
    const NoisePath noise = simulate_noise(world.noise, g, rng);
    const Vec u_star = rollout_control(star, sig, g);

    LedgerRow row;
    row.m = m;
    row.cycle = cycle;
    row.snapshot = snapshot;
    row.lambda_est = lambda_in_force;
    row.g_err_l2 = gerr_in_force;
    Vec u;
    if (is_explore) {
      row.phase = Phase::Explore;
      const EpisodeData ep = simulate_episode(world.theta_star, explore, sig, noise, g, world.cost.q);
      obs.add(ep.S, ep.A);
      u = ep.u;
      if (on_episode) on_episode(m, ep);
    } else {
      row.phase = Phase::Exploit;
      if (snapshot > cycle - 1) throw std::logic_error("run_algorithm: exploitation read a future estimate");
      const EpisodeData ep = simulate_episode(world.theta_star, exploit, sig, noise, g, world.cost.q);
      u = ep.u;
      if (on_episode) on_episode(m, ep);
    }
    row.gap = exact_gap(u, u_star, world.theta_star, world.cost);
    if (row.gap < -1e-8) throw NumericalError("run_algorithm: negative performance gap at episode " + std::to_string(m));
    regret += row.gap;
    row.regret = regret;
    run.ledger.push_back(row);

    if (is_explore && m >= run.m0) estimate(cycle);
  }
  return run;
}

double fit_regret_exponent(const std::vector<double>& regret, double tail_fraction) {
  const int N = static_cast<int>(regret.size());
  if (N < 200) throw std::invalid_argument("fit_regret_exponent: need at least 200 episodes");
  const int start = std::max(1, static_cast<int>(std::ceil((1.0 - tail_fraction) * N)));
  std::vector<double> x, y;
  for (int m = start; m <= N; ++m) {
    if (regret[m - 1] <= 0.0) continue;
    x.push_back(m);
    y.push_back(regret[m - 1]);
  }
  if (x.size() < 10) throw std::invalid_argument("fit_regret_exponent: fewer than 10 tail points");
  return loglog_slope(x, y);
}

double fit_regret_exponent(const LearningRun& run, double tail_fraction) {
  return fit_regret_exponent(run.regret_curve(), tail_fraction);
}

CsvTable ledger_table(const LearningRun& run) {
  CsvTable t;
  t.header = {"m", "phase", "cycle", "gap", "regret", "lambda_est", "g_err_l2", "seed"};
  const std::string seed = std::to_string(run.config.seed);
  for (const auto& r : run.ledger)
    t.add_row({std::to_string(r.m), phase_name(r.phase), std::to_string(r.cycle), format_number(r.gap),
               format_number(r.regret), format_number(r.lambda_est), format_number(r.g_err_l2), seed});
  return t;
}

}  // namespace liq
