#include "liquidate/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "liquidate/signal_lsmc.hpp"
#include "liquidate/stats.hpp"

namespace liq {

namespace {

template <class F>
void parallel_for(int count, int workers, F&& f) {
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto body = [&] {
    for (;;) {
      const int i = next++;
      if (i >= count) return;
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(workers, count); ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void add_check(ExperimentResult& res, const ExperimentConfig& cfg, const std::string& name, double value,
               Band band) {
  for (const auto& [n, b] : cfg.bands)
    if (n == name) band = b;
  res.checks.push_back(Check{name, value, band, value >= band.lo && value <= band.hi});
}

std::string table_text(const CsvTable& t) {
  std::ostringstream os;
  t.write(os);
  return os.str();
}

std::string episode_text(const EpisodeData& ep) {
  std::ostringstream os;
  write_episode_csv(os, ep);
  return os.str();
}

std::string episode_file(int m) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "episodes/episode_%05d.csv", m);
  return buf;
}

bool is_singular(const ExperimentConfig& cfg) { return cfg.estimator.type == KernelType::Singular; }

std::vector<double> logspace(double lo, double hi, int points) {
  std::vector<double> out;
  if (points == 1) return {lo};
  for (int i = 0; i < points; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
  return out;
}

}  // namespace

bool ExperimentResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check& ExperimentResult::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no check named " + name);
}

World make_world(const WorldConfig& w) {
  const Grid g = make_grid(w.T, w.n);
  return World{make_theta(w.lambda, w.kernel, g), w.signal, w.noise, w.cost};
}

std::uint64_t replication_seed(std::uint64_t master, int r) {
  Rng rng = substream(master, static_cast<std::uint64_t>(r), 0x4e50u);
  return rng();
}

ExperimentResult run_estimate_rate(const ExperimentConfig& cfg) {
  const World world = make_world(cfg.world);
  const Grid& g = world.grid();
  const auto& Ns = cfg.estimate_rate.N_list;
  const int N_max = Ns.back();
  const DiscreteFn ue = DiscreteFn::constant(g, cfg.estimate_rate.ue);
  const Policy explore = constant_policy(cfg.estimate_rate.ue);

  struct Row {
    int N;
    double tau;
    int cells;
    double lambda_err, g_err;
  };
  std::vector<std::vector<Row>> rows(cfg.replications);
  std::vector<std::pair<std::string, std::string>> dumps;

  parallel_for(cfg.replications, cfg.workers, [&](int r) {
    const std::uint64_t rs = replication_seed(cfg.seed, r);
    ObservationSet obs(ue);
    std::size_t next = 0;
    for (int m = 1; m <= N_max; ++m) {
      Rng rng = substream(rs, static_cast<std::uint64_t>(m));
      const SignalPath sig = simulate_signal(world.signal, g, rng);
      const NoisePath noise = simulate_noise(world.noise, g, rng);
      const EpisodeData ep = simulate_episode(world.theta_star, explore, sig, noise, g, world.cost.q);
      obs.add(ep.S, ep.A);
      if (r == 0 && cfg.dump_episodes && m <= cfg.dump_limit) dumps.push_back({episode_file(m), episode_text(ep)});
      if (next < Ns.size() && m == Ns[next]) {
        const double lam = estimate_lambda(obs);
        const Schedule s = schedule(m, cfg.estimator, g);
        const KernelEstimate est = estimate_kernel(obs, lam, s.tau, s.cells);
        rows[r].push_back(Row{m, s.tau, s.cells, std::abs(lam - world.theta_star.lambda),
                              l2_norm(est.G.values - world.theta_star.G.values, g.h)});
        ++next;
      }
    }
  });

  ExperimentResult res;
  CsvTable t;
  t.header = {"N", "tau", "cells", "lambda_err", "g_err_l2", "seed"};
  for (int r = 0; r < cfg.replications; ++r)
    for (const Row& row : rows[r])
      t.add_row({std::to_string(row.N), format_number(row.tau), std::to_string(row.cells),
                 format_number(row.lambda_err), format_number(row.g_err), std::to_string(replication_seed(cfg.seed, r))});
  res.files.push_back({"estimate_rate.csv", table_text(t)});
  for (auto& d : dumps) res.files.push_back(std::move(d));

  std::vector<double> xs, med_lam, med_g;
  nlohmann::json per_N = nlohmann::json::array();
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    std::vector<double> l, e;
    for (int r = 0; r < cfg.replications; ++r) {
      l.push_back(rows[r][i].lambda_err);
      e.push_back(rows[r][i].g_err);
    }
    xs.push_back(Ns[i]);
    med_lam.push_back(median(l));
    med_g.push_back(median(e));
    per_N.push_back({{"N", Ns[i]},
                     {"tau", rows[0][i].tau},
                     {"cells", rows[0][i].cells},
                     {"median_lambda_err", med_lam.back()},
                     {"median_g_err_l2", med_g.back()}});
  }
  res.results["per_N"] = per_N;
  const bool lam_exact = std::all_of(med_lam.begin(), med_lam.end(), [](double x) { return x == 0.0; });
  if (!lam_exact && std::all_of(med_lam.begin(), med_lam.end(), [](double x) { return x > 0.0; })) {
    const double s = loglog_slope(xs, med_lam);
    res.results["lambda_slope"] = s;
    add_check(res, cfg, "lambda_slope", s, Band{-0.6, -0.4});
  }
  const double gs = loglog_slope(xs, med_g);
  res.results["g_slope"] = gs;
  if (is_singular(cfg)) {
    const double a = cfg.estimator.alpha;
    res.results["g_slope_target"] = -(1.0 - 2.0 * a) / (2.0 * (3.0 - 2.0 * a));
    add_check(res, cfg, "g_slope", gs, Band{-0.18, -0.02});
  } else {
    res.results["g_slope_target"] = -1.0 / 3.0;
    add_check(res, cfg, "g_slope", gs, Band{-0.45, -0.21});
  }
  return res;
}

ExperimentResult run_regret(const ExperimentConfig& cfg) {
  const World world = make_world(cfg.world);
  const Grid& g = world.grid();
  const auto& rc = cfg.regret;

  LearnerConfig lc;
  lc.eta = rc.eta;
  lc.C = rc.C;
  lc.kappa = rc.kappa;
  lc.admissible = AdmissibleSet{rc.L, rc.eps};
  lc.ue_rate = rc.ue;
  lc.estimator = cfg.estimator;
  lc.N_max = rc.N_max;

  CondExpSources sources;
  if (rc.lsmc_learner || rc.lsmc_comparator) {
    const LsmcConfig hp =
        lsmc_hyperparams(cfg.lsmc.M, cfg.lsmc.vartheta, LsmcConstants{cfg.lsmc.cN, cfg.lsmc.cK, cfg.lsmc.cR});
    const Mat paths = lsmc_simulate_paths(world.signal, g.T, hp.N, hp.M, replication_seed(cfg.seed, -1));
    auto provider = std::make_shared<LsmcCondExp>(lsmc_fit(paths, g.T, hp));
    if (rc.lsmc_learner) sources.learner = provider;
    if (rc.lsmc_comparator) sources.comparator = provider;
  }

  std::vector<LearningRun> runs(cfg.replications);
  std::vector<std::pair<std::string, std::string>> dumps;
  parallel_for(cfg.replications, cfg.workers, [&](int r) {
    LearnerConfig mine = lc;
    mine.seed = replication_seed(cfg.seed, r);
    EpisodeHook hook;
    if (r == 0 && cfg.dump_episodes)
      hook = [&](int m, const EpisodeData& ep) {
        if (m <= cfg.dump_limit) dumps.push_back({episode_file(m), episode_text(ep)});
      };
    runs[r] = run_algorithm(mine, world, sources, hook);
  });

  ExperimentResult res;
  CsvTable ledger;
  CsvTable est;
  est.header = {"seed", "k", "N", "lambda", "g_err_l2", "tau", "cells", "admissible", "installed"};
  std::vector<double> exps, finals;
  int violations = 0;
  for (const auto& run : runs) {
    const CsvTable t = ledger_table(run);
    if (ledger.header.empty()) ledger.header = t.header;
    for (const auto& row : t.rows) ledger.rows.push_back(row);
    for (const auto& e : run.estimates)
      est.add_row({std::to_string(run.config.seed), std::to_string(e.k), std::to_string(e.N), format_number(e.lambda),
                   format_number(e.g_err_l2), format_number(e.tau), std::to_string(e.cells),
                   e.admissible ? "1" : "0", e.installed ? "1" : "0"});
    exps.push_back(fit_regret_exponent(run, rc.tail_fraction));
    finals.push_back(run.ledger.back().regret);
    violations += run.admissibility_violations;
  }
  res.files.push_back({"ledger.csv", table_text(ledger)});
  res.files.push_back({"estimates.csv", table_text(est)});
  for (auto& d : dumps) res.files.push_back(std::move(d));

  const double med = median(exps);
  res.results["m0"] = runs.front().m0;
  res.results["kappa"] = rc.kappa;
  res.results["exponents"] = exps;
  res.results["final_regret"] = finals;
  res.results["median_exponent"] = med;
  res.results["admissibility_violations"] = violations;
  const double a = cfg.estimator.alpha;
  const double target = is_singular(cfg) ? (3.0 - 2.0 * a) / (4.0 - 4.0 * a) : 0.75;
  res.results["exponent_target"] = target;
  add_check(res, cfg, "regret_exponent", med, Band{0.0, is_singular(cfg) ? 0.93 : 0.85});
  return res;
}

ExperimentResult run_signal_rate(const ExperimentConfig& cfg) {
  const SignalModel& model = cfg.world.signal;
  const double T = cfg.world.T;
  const auto& lc = cfg.lsmc;
  const LsmcConstants consts{lc.cN, lc.cK, lc.cR};
  const int nM = static_cast<int>(lc.M_list.size());
  std::vector<LsmcConfig> hps;
  for (int M : lc.M_list) hps.push_back(lsmc_hyperparams(M, lc.vartheta, consts));

  std::vector<double> err(static_cast<std::size_t>(nM) * cfg.replications);
  parallel_for(nM * cfg.replications, cfg.workers, [&](int idx) {
    const int i = idx / cfg.replications, r = idx % cfg.replications;
    const std::uint64_t rs = replication_seed(cfg.seed, r);
    const Mat paths = lsmc_simulate_paths(model, T, hps[i].N, hps[i].M, rs);
    const CondExpTable table = lsmc_fit(paths, T, hps[i]);
    err[idx] = lsmc_error(table, model, lc.test_paths, rs ^ 0x9e3779b97f4a7c15ull, lc.t_points, lc.s_points);
  });

  ExperimentResult res;
  CsvTable t;
  t.header = {"M", "N", "K", "R", "error", "seed"};
  std::vector<double> xs, meds;
  nlohmann::json per_M = nlohmann::json::array();
  for (int i = 0; i < nM; ++i) {
    std::vector<double> e;
    for (int r = 0; r < cfg.replications; ++r) {
      const double v = err[static_cast<std::size_t>(i) * cfg.replications + r];
      e.push_back(v);
      t.add_row({std::to_string(hps[i].M), std::to_string(hps[i].N), std::to_string(hps[i].K),
                 format_number(hps[i].R), format_number(v), std::to_string(replication_seed(cfg.seed, r))});
    }
    xs.push_back(hps[i].M);
    meds.push_back(median(e));
    per_M.push_back({{"M", hps[i].M}, {"N", hps[i].N}, {"K", hps[i].K}, {"R", hps[i].R}, {"median_error", meds.back()}});
  }
  res.files.push_back({"signal_rate.csv", table_text(t)});
  res.results["per_M"] = per_M;

  // Constant signal on populated bins must be reproduced exactly.
  {
    const LsmcConfig hp = hps.front();
    const double c = 0.3 * hp.R;
    const Mat paths = Mat::Constant(50, hp.N + 1, c);
    const CondExpTable table = lsmc_fit(paths, T, hp);
    const int b = table.bin(c);
    double worst = 0.0;
    for (int i = 0; i < hp.N; ++i)
      for (int j = i; j < hp.N; ++j) worst = std::max(worst, std::abs(table.at(i, j, b) - c));
    res.results["constant_signal_error"] = worst;
    add_check(res, cfg, "constant_signal_error", worst, Band{0.0, 1e-12});
  }

  bool decreasing = true;
  for (int i = 1; i < nM; ++i) decreasing = decreasing && meds[i] < meds[i - 1];
  res.results["strictly_decreasing"] = decreasing;
  add_check(res, cfg, "strictly_decreasing", decreasing ? 1.0 : 0.0, Band{1.0, 1.0});
  if (nM >= 2) {
    const double s = loglog_slope(xs, meds);
    res.results["error_slope"] = s;
    res.results["error_slope_target"] = -(lc.vartheta - 2.0) / (3.0 * lc.vartheta);
    add_check(res, cfg, "error_slope", s, Band{-1e300, -0.15});
  }
  return res;
}

ExperimentResult run_control_check(const ExperimentConfig& cfg) {
  const World world = make_world(cfg.world);
  const Grid& g = world.grid();
  const auto& cc = cfg.control;
  const int n = g.n;
  ExperimentResult res;

  // Operator identities over random admissible parameters.
  {
    Rng rng = substream(cfg.seed, 0, 0xC0u);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const AdmissibleSet set{cc.L, cc.eps};
    CsvTable t;
    t.header = {"theta", "lambda", "beta", "scale", "phi", "k", "roundtrip_rel_err", "d_min_rayleigh"};
    double worst_rt = 0.0, worst_margin = 1e300;
    for (int j = 0; j < cc.thetas; ++j) {
      const double lam = 0.5 + 1.5 * U(rng), beta = 0.5 + 1.5 * U(rng), scale = 0.5 + U(rng);
      const Theta th = make_theta(lam, Exponential{beta, scale}, g);
      if (!is_admissible(th, set)) throw NumericalError("control-check: sampled parameter is not admissible");
      for (double phi : cc.phi_list) {
        const CostParams cost{phi, world.cost.rho, world.cost.q};
        const ControlAssembly ca(th, cost);
        for (int k : {0, n / 2}) {
          const Vec f1 = standard_normals(rng, n), f2 = standard_normals(rng, n);
          auto [x1, x2] = ca.gamma_inverse_apply(k, f1, f2);
          auto [y1, y2] = ca.gamma_apply(k, x1, x2);
          const double rel = std::sqrt((y1 - f1).squaredNorm() + (y2 - f2).squaredNorm()) /
                             std::sqrt(f1.squaredNorm() + f2.squaredNorm());
          Eigen::SelfAdjointEigenSolver<Mat> es(build_D(th, cost, k).dense(), Eigen::EigenvaluesOnly);
          const double margin = es.eigenvalues()[0];
          worst_rt = std::max(worst_rt, rel);
          worst_margin = std::min(worst_margin, margin);
          t.add_row({std::to_string(j), format_number(lam), format_number(beta), format_number(scale),
                     format_number(phi), std::to_string(k), format_number(rel), format_number(margin)});
        }
      }
    }
    res.files.push_back({"operators.csv", table_text(t)});
    res.results["gamma_roundtrip_max_rel_err"] = worst_rt;
    res.results["d_min_rayleigh"] = worst_margin;
    add_check(res, cfg, "gamma_roundtrip", worst_rt, Band{0.0, 1e-8});
    add_check(res, cfg, "d_margin", worst_margin, Band{1.0 / cc.L - 2.0 * cc.eps, 1e300});
  }

  const auto ou = std::make_shared<OuCondExp>(world.signal.beta);
  const auto star_ca = std::make_shared<ControlAssembly>(world.theta_star, world.cost);
  const Policy star = greedy_control(star_ca, ou);

  // First-order optimality with antithetic common random numbers.
  {
    std::vector<SignalPath> sigs;
    std::vector<NoisePath> noises;
    for (int p = 0; p < cc.gateaux_paths / 2; ++p) {
      Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(p), 0x6a7eu);
      const Vec xs = standard_normals(rng, n + 1), xm = standard_normals(rng, n + 1);
      sigs.push_back(signal_from_normals(world.signal, g, xs));
      noises.push_back(noise_from_normals(world.noise, g, xm));
      sigs.push_back(signal_from_normals(world.signal, g, -xs));
      noises.push_back(noise_from_normals(world.noise, g, -xm));
    }
    Rng drng = substream(cfg.seed, 1, 0xD1u);
    std::vector<Vec> deltas;
    std::vector<DirectionFn> fixed, adapted;
    for (int d = 0; d < cc.directions; ++d) {
      deltas.push_back(standard_normals(drng, n));
      const Vec delta = deltas.back();
      fixed.push_back([delta](const SignalPath&) { return delta; });
      adapted.push_back([delta, n](const SignalPath& s) { return Vec(delta.array() * s.I.head(n).array()); });
    }
    const GateauxResult gr = gateaux_check(star, world.theta_star, world.cost, sigs, noises, fixed);
    const std::vector<double> fd =
        finite_difference_check(star, world.theta_star, world.cost, sigs, noises, fixed, cc.fd_step);
    const GateauxResult ga = gateaux_check(star, world.theta_star, world.cost, sigs, noises, adapted);
    const Vec shift = 0.1 * deltas.front();
    const Policy perturbed = [&star, shift](const PolicyInput& in) { return star(in) + shift[in.i]; };
    const GateauxResult gp = gateaux_check(perturbed, world.theta_star, world.cost, sigs, noises, fixed);

    CsvTable t;
    t.header = {"direction", "kind", "normalized_derivative", "std_error", "finite_difference"};
    double fd_gap = 0.0, max_z = 0.0;
    for (int d = 0; d < cc.directions; ++d) {
      fd_gap = std::max(fd_gap, std::abs(fd[d] - gr.normalized[d]));
      if (ga.std_error[d] > 0.0) max_z = std::max(max_z, std::abs(ga.normalized[d]) / ga.std_error[d]);
      t.add_row({std::to_string(d), "deterministic", format_number(gr.normalized[d]), format_number(gr.std_error[d]),
                 format_number(fd[d])});
    }
    for (int d = 0; d < cc.directions; ++d)
      t.add_row({std::to_string(d), "adapted", format_number(ga.normalized[d]), format_number(ga.std_error[d]), ""});
    res.files.push_back({"gateaux.csv", table_text(t)});
    res.results["gateaux_statistic"] = gr.statistic;
    res.results["finite_difference_max_abs_diff"] = fd_gap;
    res.results["adapted_max_z"] = max_z;
    res.results["perturbed_statistic"] = gp.statistic;
    add_check(res, cfg, "gateaux_statistic", gr.statistic, Band{0.0, 1e-3});
    add_check(res, cfg, "finite_difference_agreement", fd_gap, Band{0.0, 1e-6});
    add_check(res, cfg, "adapted_max_z", max_z, Band{0.0, 4.0});
    add_check(res, cfg, "perturbed_statistic", gp.statistic, Band{1e-2, 1e300});
  }

  // Quadratic suboptimality along random admissible rays.
  {
    std::vector<SignalPath> sigs;
    std::vector<Vec> u_star;
    for (int p = 0; p < cc.gap_paths; ++p) {
      Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(p), 0x9a9u);
      sigs.push_back(simulate_signal(world.signal, g, rng));
      u_star.push_back(rollout_control(star, sigs.back(), g));
    }
    Rng rng = substream(cfg.seed, 2, 0x4a75u);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const AdmissibleSet set{cc.L, cc.eps};
    const double eps_max = *std::max_element(cc.eps_list.begin(), cc.eps_list.end());
    CsvTable t;
    t.header = {"ray", "eps", "gap"};
    std::vector<double> slopes;
    for (int ray = 0; ray < cc.rays; ++ray) {
      double dl = 0.0;
      Vec dG;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 100) throw NumericalError("control-check: could not sample an admissible ray");
        dl = U(rng) - 0.5;
        const double a = U(rng) - 0.5, b = 0.5 + 2.5 * U(rng);
        dG = (a < 0 ? -1.0 : 1.0) * cell_averaged_values(Exponential{b, std::abs(a)}, g).values;
        const Theta end{world.theta_star.lambda + eps_max * dl, DiscreteFn(g, world.theta_star.G.values + eps_max * dG)};
        if (is_admissible(end, set)) break;
      }
      std::vector<double> es, gaps;
      for (double e : cc.eps_list) {
        const Theta th{world.theta_star.lambda + e * dl, DiscreteFn(g, world.theta_star.G.values + e * dG)};
        const Policy pol = greedy_control(std::make_shared<ControlAssembly>(th, world.cost), ou);
        double acc = 0.0;
        for (std::size_t p = 0; p < sigs.size(); ++p)
          acc += exact_gap(rollout_control(pol, sigs[p], g), u_star[p], world.theta_star, world.cost);
        es.push_back(e);
        gaps.push_back(acc / sigs.size());
        t.add_row({std::to_string(ray), format_number(e), format_number(gaps.back())});
      }
      slopes.push_back(loglog_slope(es, gaps));
    }
    res.files.push_back({"gap_quadraticity.csv", table_text(t)});
    res.results["gap_slopes"] = slopes;
    add_check(res, cfg, "gap_slope_min", *std::min_element(slopes.begin(), slopes.end()), Band{1.85, 2.15});
    add_check(res, cfg, "gap_slope_max", *std::max_element(slopes.begin(), slopes.end()), Band{1.85, 2.15});
  }
  return res;
}

ExperimentResult run_dist_fn(const ExperimentConfig& cfg) {
  const World world = make_world(cfg.world);
  const Grid& g = world.grid();
  const auto& dc = cfg.dist_fn;
  const DistanceFunction D(world.theta_star.G, DiscreteFn::constant(g, dc.ue));
  const double sat = D.saturation_radius();
  const double fit_hi = std::min(dc.fit_hi, dc.plateau_fraction * sat);

  ExperimentResult res;
  CsvTable t;
  t.header = {"R", "D", "in_fit"};
  std::vector<double> xs, ys;
  for (double R : logspace(dc.R_min, dc.R_max, dc.points)) {
    const double v = D(R);
    const bool fit = R >= dc.fit_lo * (1 - 1e-12) && R <= fit_hi * (1 + 1e-12) && v > D.floor() && v > 0.0;
    if (fit) {
      xs.push_back(R);
      ys.push_back(v);
    }
    t.add_row({format_number(R), format_number(v), fit ? "1" : "0"});
  }
  res.files.push_back({"dist_fn.csv", table_text(t)});
  res.results["saturation_radius"] = sat;
  res.results["floor"] = D.floor();
  res.results["fit_range"] = {dc.fit_lo, fit_hi};
  res.results["fit_points"] = xs.size();

  double target, tol;
  if (const auto* p = std::get_if<PowerLaw>(&cfg.world.kernel)) {
    target = -(1.0 - 2.0 * p->alpha) / (1.0 + 2.0 * p->alpha);
    tol = 0.10;
  } else {
    target = -1.0;
    tol = 0.15;
  }
  res.results["slope_target"] = target;
  const double s = xs.size() >= 2 ? loglog_slope(xs, ys) : std::nan("");
  res.results["slope"] = s;
  add_check(res, cfg, "dist_fn_slope", s, Band{target - tol, target + tol});
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "estimate-rate") return run_estimate_rate(cfg);
  if (cfg.experiment == "regret") return run_regret(cfg);
  if (cfg.experiment == "signal-rate") return run_signal_rate(cfg);
  if (cfg.experiment == "control-check") return run_control_check(cfg);
  if (cfg.experiment == "dist-fn") return run_dist_fn(cfg);
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

nlohmann::json summary_json(const ExperimentConfig& cfg, const ExperimentResult& res) {
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& c : res.checks) checks[c.name] = {{"value", c.value}, {"lo", c.band.lo}, {"hi", c.band.hi}, {"pass", c.pass}};
  return {{"config", to_json(cfg)},
          {"results", res.results},
          {"checks", checks},
          {"version", {{"schema", kSummarySchema}, {"library", kLibraryVersion}}}};
}

void emit(const ExperimentConfig& cfg, const ExperimentResult& res, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const std::string& rel, const std::string& text) {
    const fs::path p = fs::path(dir) / rel;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + p.string());
  };
  for (const auto& [rel, text] : res.files) write(rel, text);
  write("summary.json", summary_json(cfg, res).dump(2) + "\n");
}

}  // namespace liq
