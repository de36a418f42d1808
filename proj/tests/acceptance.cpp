// Acceptance gate. One line per criterion; exit status 1 if any selected
// criterion fails. Usage: acceptance [--list] [id ...]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "liquidate/experiments.hpp"
#include "liquidate/stats.hpp"

using namespace liq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

ExperimentConfig config(const std::string& experiment, const std::string& text = "") {
  ExperimentConfig cfg = parse_config(text, experiment);
  resolve(cfg);
  return cfg;
}

bool in(double x, double lo, double hi) { return x >= lo && x <= hi; }

Outcome lambda_exact() {
  double worst = 0.0;
  for (double lam : {0.5, 1.0, 1.37, 2.0}) {
    const Grid g = make_grid(1.0, 512);
    const Theta th = make_theta(lam, Exponential{1.0, 1.0}, g);
    const SignalModel sm{1.0, 0.3, 0.2, 0.1};
    const NoiseModel quiet{0.0, 0.0};
    ObservationSet obs(DiscreteFn::constant(g, 1.0));
    for (int m = 1; m <= 64; ++m) {
      Rng rng = substream(7, m);
      const SignalPath sig = simulate_signal(sm, g, rng);
      const NoisePath noise = simulate_noise(quiet, g, rng);
      const EpisodeData ep = simulate_episode(th, constant_policy(1.0), sig, noise, g, 1.0);
      obs.add(ep.S, ep.A);
      worst = std::max(worst, std::abs(estimate_lambda(obs) - lam));
    }
  }
  return {worst <= 1e-12, fmt("max |lambda^N - lambda*| = %.3g (tol 1e-12), N = 1..64, 4 values of lambda*", worst)};
}

Outcome lambda_rate() {
  const ExperimentResult r = run_estimate_rate(config("estimate-rate", "[world]\nnoise_sigma_0 = 0.5\n"));
  const double s = r.results["lambda_slope"];
  return {in(s, -0.6, -0.4), fmt("slope = %.4f, band [-0.6, -0.4]", s)};
}

Outcome kernel_rate(bool singular) {
  const ExperimentConfig cfg =
      singular ? config("estimate-rate", "[world]\nkernel = power_law\nkernel_alpha = 0.25\n") : config("estimate-rate");
  const ExperimentResult r = run_estimate_rate(cfg);
  const double s = r.results["g_slope"];
  const double lo = singular ? -0.18 : -0.45, hi = singular ? -0.02 : -0.21;
  return {in(s, lo, hi), fmt("slope = %.4f, band [%.2f, %.2f], %g seeds", s, lo, hi, cfg.replications)};
}

Outcome singular_values() {
  const Grid g = make_grid(1.0, 512);
  const SingularSystem s = svd_kernel(galerkin_conv_operator(DiscreteFn::constant(g, 1.0)));
  double worst = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double expect = 1.0 / (M_PI * (k - 0.5));
    worst = std::max(worst, std::abs(s.sigma[k - 1] - expect) / expect);
  }
  return {worst <= 0.01, fmt("max relative deviation of sigma_1..10 = %.3g (tol 0.01)", worst)};
}

Outcome dist_fn() {
  const double reg = run_dist_fn(config("dist-fn")).results["slope"];
  const double sing =
      run_dist_fn(config("dist-fn", "[world]\nkernel = power_law\nkernel_alpha = 0.25\n")).results["slope"];
  const bool ok = in(reg, -1.15, -0.85) && in(sing, -1.0 / 3.0 - 0.1, -1.0 / 3.0 + 0.1);
  return {ok, fmt("regular slope = %.4f [-1.15, -0.85]; power-law slope = %.4f [-0.4333, -0.2333]", reg, sing)};
}

ExperimentResult& control_result() {
  static ExperimentResult r = run_control_check(config("control-check"));
  return r;
}

Outcome operators() {
  const auto& r = control_result();
  const double rt = r.results["gamma_roundtrip_max_rel_err"], margin = r.results["d_min_rayleigh"];
  const double need = 1.0 / 10.0 - 2.0 * 0.01;
  return {rt <= 1e-8 && margin >= need,
          fmt("round trip = %.3g (tol 1e-8); min Rayleigh quotient of D = %.4f (need >= %.2f)", rt, margin, need)};
}

Outcome first_order() {
  const auto& r = control_result();
  const double stat = r.results["gateaux_statistic"], fd = r.results["finite_difference_max_abs_diff"];
  const double z = r.results["adapted_max_z"], pert = r.results["perturbed_statistic"];
  const bool ok = stat <= 1e-3 && fd <= 1e-6 && z <= 4.0 && pert >= 1e-2;
  return {ok, fmt("statistic = %.3g (tol 1e-3); FD diff = %.3g (tol 1e-6); adapted max|z| = %.2f (tol 4); "
                  "perturbed = %.3g (need >= 1e-2)",
                  stat, fd, z, pert)};
}

Outcome lq_oracle() {
  const Grid g = make_grid(1.0, 512);
  const Theta th{1.0, DiscreteFn::constant(g, 0.0)};
  const SignalPath none{Vec::Zero(g.n + 1), Vec::Zero(g.n + 1)};
  double worst = 0.0;
  for (double rho : {1.0, 10.0}) {
    const auto ca = std::make_shared<ControlAssembly>(th, CostParams{0.0, rho, 1.0});
    const Vec u = rollout_control(greedy_control(ca, std::make_shared<ZeroCondExp>()), none, g);
    const double target = rho / (1.0 + rho);
    worst = std::max(worst, (u.array() - target).abs().maxCoeff() / target);
  }
  return {worst <= 2.0 * g.h, fmt("max relative deviation = %.3g (tol 2h = %.3g)", worst, 2.0 * g.h)};
}

Outcome gap_quadratic() {
  const auto& r = control_result();
  std::vector<double> s = r.results["gap_slopes"];
  const double lo = *std::min_element(s.begin(), s.end()), hi = *std::max_element(s.begin(), s.end());
  return {lo >= 1.85 && hi <= 2.15, fmt("slopes over %g rays in [%.4f, %.4f], band [1.85, 2.15]", s.size(), lo, hi)};
}

Outcome regret() {
  const ExperimentResult a = run_regret(config("regret"));
  const ExperimentResult b = run_regret(config("regret", "[world]\nkernel = power_law\nkernel_alpha = 0.25\n"));
  const double ra = a.results["median_exponent"], rb = b.results["median_exponent"];
  return {ra <= 0.85 && rb <= 0.93, fmt("regular exponent = %.4f (<= 0.85); singular exponent = %.4f (<= 0.93)", ra, rb)};
}

Outcome lsmc() {
  const ExperimentResult r = run_signal_rate(config("signal-rate"));
  const double c = r.results["constant_signal_error"], s = r.results["error_slope"];
  const bool dec = r.results["strictly_decreasing"];
  return {c <= 1e-12 && dec && s <= -0.15,
          fmt("constant error = %.3g (tol 1e-12); strictly decreasing = %g; slope = %.4f (<= -0.15)", c, dec, s)};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "liq_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"estimate-rate", "[world]\nn = 64\n[estimate_rate]\nN_list = 8, 32, 128\n[run]\nreplications = 6\n"},
      {"regret", "[world]\nn = 32\n[learner]\nN_max = 300\n[run]\nreplications = 4\n[output]\ndump_episodes = true\n"},
      {"signal-rate", "[lsmc]\nM_list = 250, 500\ntest_paths = 300\n[run]\nreplications = 4\n"},
      {"control-check", "[world]\nn = 32\n[control]\ngateaux_paths = 200\ngap_paths = 20\n"},
      {"dist-fn", ""}};
  int files = 0;
  for (const auto& [exp, text] : cases) {
    std::vector<fs::path> dirs;
    for (int variant = 0; variant < 3; ++variant) {
      ExperimentConfig cfg = config(exp, text);
      cfg.workers = variant == 2 ? 3 : 1;
      const fs::path dir = root / (exp + std::to_string(variant));
      emit(cfg, run_experiment(cfg), dir.string());
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      const fs::path rel = fs::relative(entry.path(), dirs[0]);
      auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
      };
      const std::string ref = slurp(entry.path());
      for (int v = 1; v < 3; ++v)
        if (!fs::exists(dirs[v] / rel) || slurp(dirs[v] / rel) != ref) {
          fs::remove_all(root);
          return {false, exp + ": " + rel.string() + " differs"};
        }
      ++files;
    }
  }
  fs::remove_all(root);
  return {files > 0, fmt("%g CSV files byte-identical across reruns and 1 vs 3 workers", files)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "lambda estimator exactness", 1, lambda_exact},
      {2, "lambda rate", 30, lambda_rate},
      {3, "kernel rate, regular", 600, [] { return kernel_rate(false); }},
      {4, "kernel rate, singular", 600, [] { return kernel_rate(true); }},
      {5, "singular-system oracle", 5, singular_values},
      {6, "distance-function decay", 60, dist_fn},
      {7, "operator identities", 30, operators},
      {8, "first-order optimality", 120, first_order},
      {9, "deterministic LQ oracle", 5, lq_oracle},
      {10, "gap quadraticity", 120, gap_quadratic},
      {11, "regret sublinearity", 2400, regret},
      {12, "LSMC convergence", 300, lsmc},
      {13, "determinism", 600, determinism},
  };

  std::vector<int> chosen;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--list") {
      for (const auto& c : all) std::cout << c.id << "  " << c.name << "\n";
      return 0;
    }
    chosen.push_back(std::stoi(a));
  }

  int failed = 0;
  for (const auto& c : all) {
    if (!chosen.empty() && std::find(chosen.begin(), chosen.end(), c.id) == chosen.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("[%s] %2d %-28s %s | %.2fs (limit %gs)%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.budget_s, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
