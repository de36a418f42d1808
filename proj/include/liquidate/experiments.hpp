#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "liquidate/config.hpp"
#include "liquidate/learner.hpp"

namespace liq {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kSummarySchema = 1;

struct Check {
  std::string name;
  double value = 0.0;
  Band band;
  bool pass = false;
};

struct ExperimentResult {
  /// Relative path inside the output directory, and file contents.
  std::vector<std::pair<std::string, std::string>> files;
  nlohmann::json results = nlohmann::json::object();
  std::vector<Check> checks;

  bool passed() const;
  const Check& check(const std::string& name) const;
};

World make_world(const WorldConfig& w);

/// Seed of replication r, derived from the master seed.
std::uint64_t replication_seed(std::uint64_t master, int r);

ExperimentResult run_estimate_rate(const ExperimentConfig& cfg);
ExperimentResult run_regret(const ExperimentConfig& cfg);
ExperimentResult run_signal_rate(const ExperimentConfig& cfg);
ExperimentResult run_control_check(const ExperimentConfig& cfg);
ExperimentResult run_dist_fn(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Top-level keys: config, results, checks, version.
nlohmann::json summary_json(const ExperimentConfig& cfg, const ExperimentResult& res);

/// Writes every file plus summary.json under dir.
void emit(const ExperimentConfig& cfg, const ExperimentResult& res, const std::string& dir);

}  // namespace liq
