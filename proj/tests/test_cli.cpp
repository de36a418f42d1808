#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "liquidate/experiments.hpp"

using namespace liq;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int count_lines(const std::string& text) {
  return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

const std::string& file(const ExperimentResult& r, const std::string& name) {
  for (const auto& [n, t] : r.files)
    if (n == name) return t;
  throw std::out_of_range(name);
}

ExperimentConfig small_rate() {
  ExperimentConfig cfg = parse_config(
      "[world]\nn = 32\n[estimate_rate]\nN_list = 4, 8, 16\n[run]\nreplications = 2\n", "estimate-rate");
  resolve(cfg);
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  ExperimentConfig cfg = parse_config(
      "[world]\nn = 64\nkernel = power_law\nkernel_alpha = 0.3\nphi = 0.2\n[run]\nseed = 99\n", "regret");
  resolve(cfg);
  CHECK(cfg.world.n == 64);
  CHECK(std::get<PowerLaw>(cfg.world.kernel).alpha == 0.3);
  CHECK(cfg.estimator.type == KernelType::Singular);
  CHECK(cfg.regret.kappa == doctest::Approx(0.4 / 2.4));
  CHECK(cfg.seed == 99);

  CHECK_THROWS_AS(parse_config("[world]\nbogus = 1\n", "regret"), ConfigError);
  CHECK_THROWS_AS(parse_config("[world]\nn = abc\n", "regret"), ConfigError);
  CHECK_THROWS_AS(parse_config("[world\n", "regret"), ConfigError);
  CHECK_THROWS_AS(default_config("no-such-experiment"), ConfigError);

  CHECK_THROWS_AS(parse_config("[world]\nn = 48\n", "dist-fn"), ConfigError);
  ExperimentConfig odd = default_config("dist-fn");
  odd.world.n = 48;
  CHECK_THROWS_AS(resolve(odd), ConfigError);
}

TEST_CASE("summary echoes the resolved config") {
  ExperimentConfig cfg = default_config("dist-fn");
  resolve(cfg);
  const ExperimentResult res = run_experiment(cfg);
  const nlohmann::json j = summary_json(cfg, res);
  for (const char* key : {"config", "results", "checks", "version"}) CHECK(j.contains(key));
  CHECK(j["config"]["world"]["n"] == 512);
  CHECK(j["config"]["estimator"]["type"] == "regular");
  CHECK(j["checks"]["dist_fn_slope"].contains("pass"));
}

TEST_CASE("csv emission") {
  CsvTable t;
  t.header = {"a", "b"};
  std::ostringstream os;
  t.write(os);
  CHECK(os.str() == "a,b\n");

  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(-3.0) == "-3");
  CHECK(format_number(1e-300) == "1e-300");
}

TEST_CASE("replications scale the row count") {
  ExperimentConfig cfg = small_rate();
  const int two = count_lines(file(run_experiment(cfg), "estimate_rate.csv")) - 1;
  cfg.replications = 4;
  const int four = count_lines(file(run_experiment(cfg), "estimate_rate.csv")) - 1;
  CHECK(two == 6);
  CHECK(four == 2 * two);
}

TEST_CASE("output is independent of the worker count") {
  ExperimentConfig cfg = small_rate();
  cfg.replications = 5;
  const ExperimentResult serial = run_experiment(cfg);
  cfg.workers = 3;
  const ExperimentResult parallel = run_experiment(cfg);
  CHECK(file(serial, "estimate_rate.csv") == file(parallel, "estimate_rate.csv"));

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "liq_test_cli_emit";
  fs::remove_all(dir);
  emit(cfg, parallel, dir.string());
  CHECK(slurp(dir / "estimate_rate.csv") == file(serial, "estimate_rate.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  fs::remove_all(dir);
}

#ifdef LIQ_CLI_PATH
TEST_CASE("exit codes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "liq_test_cli_exit";
  fs::create_directories(dir);
  auto run = [&](const std::string& args) {
    const std::string cmd = std::string(LIQ_CLI_PATH) + " " + args + " > " + (dir / "log").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  std::ofstream(dir / "bad.ini") << "[world]\nunknown_key = 3\n";
  std::ofstream(dir / "tight.ini") << "[world]\nn = 64\n[checks]\ndist_fn_slope_lo = 5\n";
  std::ofstream(dir / "singular.ini") << "[world]\nn = 64\nlambda = -1\n";
  CHECK(run("dist-fn --config " + (dir / "bad.ini").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(run("dist-fn --config " + (dir / "singular.ini").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(run("dist-fn --config " + (dir / "tight.ini").string() + " --out " + (dir / "o").string()) == 0);
  CHECK(run("dist-fn --check --config " + (dir / "tight.ini").string() + " --out " + (dir / "o").string()) == 1);
  CHECK(run("no-such-command") == 2);
  fs::remove_all(dir);
}
#endif
