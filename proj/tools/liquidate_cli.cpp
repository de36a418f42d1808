// Batch runner: one subcommand per experiment.
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "liquidate/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool check = false;
  std::string out;
  bool dump = false;
  int workers = 0;
  int replications = 0;
};

int run(const std::string& experiment, const Options& opt) {
  liq::ExperimentConfig cfg;
  try {
    cfg = opt.config.empty() ? liq::default_config(experiment) : liq::load_config(opt.config, experiment);
    if (opt.seed_set) cfg.seed = opt.seed;
    if (!opt.out.empty()) cfg.out_dir = opt.out;
    if (opt.dump) cfg.dump_episodes = true;
    if (opt.workers > 0) cfg.workers = opt.workers;
    if (opt.replications > 0) cfg.replications = opt.replications;
    liq::resolve(cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  liq::ExperimentResult res;
  try {
    res = liq::run_experiment(cfg);
  } catch (const liq::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const liq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    liq::emit(cfg, res, cfg.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 4;
  }

  for (const auto& c : res.checks)
    std::cout << (c.pass ? "ok   " : "FAIL ") << c.name << " = " << c.value << "  [" << c.band.lo << ", "
              << c.band.hi << "]\n";
  std::cout << "wrote " << cfg.out_dir << "/summary.json\n";
  if (opt.check && !res.passed()) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Propagator-model liquidation experiments"};
  app.set_version_flag("--version", std::string(liq::kLibraryVersion));
  app.require_subcommand(1);

  Options opt;
  std::string chosen;
  for (const std::string& name : liq::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", opt.config, "experiment config file (key = value with [sections])")
        ->check(CLI::ExistingFile);
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { opt.seed = s, opt.seed_set = true; }, "master seed");
    sub->add_flag("--check", opt.check, "exit 1 if any acceptance band fails");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_flag("--dump-episodes", opt.dump, "write per-episode CSV files");
    sub->add_option("--workers", opt.workers, "worker threads for replications")->check(CLI::PositiveNumber);
    sub->add_option("--replications", opt.replications, "replication count")->check(CLI::PositiveNumber);
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run(chosen, opt);
}
