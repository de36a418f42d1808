#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "liquidate/estimator.hpp"
#include "liquidate/market.hpp"
#include "liquidate/propagator.hpp"

namespace liq {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct WorldConfig {
  double T = 1.0;
  int n = 512;
  double lambda = 1.0;
  KernelSpec kernel = Exponential{1.0, 1.0};
  SignalModel signal;
  NoiseModel noise;
  CostParams cost;
};

struct EstimateRateConfig {
  std::vector<int> N_list = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
  double ue = 1.0;
};

struct RegretConfig {
  double eta = 0.1;
  double C = 1.0;
  double kappa = 0.0;  // 0 selects the kernel-type default
  double L = 10.0;
  double eps = 0.01;
  double ue = 1.0;
  int N_max = 3000;
  double tail_fraction = 0.5;
  bool lsmc_learner = false;
  bool lsmc_comparator = false;
};

struct LsmcExperimentConfig {
  std::vector<int> M_list = {250, 1000, 4000};
  double vartheta = 20.0;
  double cN = 1.0, cK = 1.0, cR = 1.0;
  int test_paths = 2000;
  int t_points = 8;
  int s_points = 128;
  int M = 2000;  // table size used by the regret experiment when LSMC is enabled
};

struct ControlCheckConfig {
  std::vector<double> phi_list = {0.1, 1.0};
  int thetas = 5;
  double L = 10.0;
  double eps = 0.01;
  int gateaux_paths = 5000;
  int directions = 20;
  double fd_step = 1e-3;
  std::vector<double> eps_list = {0.02, 0.0317, 0.05, 0.08, 0.126, 0.2};
  int rays = 5;
  int gap_paths = 200;
};

struct DistFnConfig {
  double ue = 1.0;
  double R_min = 1.0;
  double R_max = 1000.0;
  int points = 31;
  double fit_lo = 10.0;
  double fit_hi = 1000.0;
  double plateau_fraction = 0.5;  // fit only R <= fraction * saturation radius
};

/// Inclusive acceptance band for one reported number.
struct Band {
  double lo = -1e300;
  double hi = 1e300;
};

struct ExperimentConfig {
  std::string experiment;
  WorldConfig world;
  EstimatorConfig estimator;
  bool estimator_type_set = false;
  EstimateRateConfig estimate_rate;
  RegretConfig regret;
  LsmcExperimentConfig lsmc;
  ControlCheckConfig control;
  DistFnConfig dist_fn;
  std::uint64_t seed = 1;
  int replications = 20;
  int workers = 1;
  std::string out_dir = "out";
  bool dump_episodes = false;
  int dump_limit = 10;
  /// Overrides of check bands, by check name.
  std::vector<std::pair<std::string, Band>> bands;
};

const std::vector<std::string>& experiment_names();

/// Parses "key = value" text with [sections]. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& text, const std::string& experiment);
ExperimentConfig load_config(const std::string& path, const std::string& experiment);
ExperimentConfig default_config(const std::string& experiment);

/// Fills defaults that depend on other settings (estimator type from the kernel).
void resolve(ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json kernel_to_json(const KernelSpec& k);

}  // namespace liq
