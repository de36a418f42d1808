#include "liquidate/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace liq {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

template <class T, class F>
std::vector<T> to_list(const std::string& key, const std::string& v, F conv) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(static_cast<T>(conv(key, item)));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

struct KernelParams {
  std::string name = "exponential";
  double beta = 1.0, scale = 1.0, c0 = 1.0, alpha = 0.25, c = 0.0;
  double tpl_beta = 0.5;
};

KernelSpec build_kernel(const KernelParams& p) {
  KernelSpec k;
  if (p.name == "exponential") k = Exponential{p.beta, p.scale};
  else if (p.name == "truncated_power_law") k = TruncatedPowerLaw{p.c0, p.tpl_beta};
  else if (p.name == "power_law") k = PowerLaw{p.alpha};
  else if (p.name == "constant") k = Constant{p.c};
  else throw ConfigError("world.kernel: unknown kernel '" + p.name + "'");
  try {
    validate(k);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("world.kernel: ") + e.what());
  }
  return k;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"estimate-rate", "regret", "signal-rate", "control-check", "dist-fn"};
  return names;
}

ExperimentConfig default_config(const std::string& experiment) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end())
    throw ConfigError("unknown experiment '" + experiment + "'");
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  if (experiment == "estimate-rate") {
    cfg.world.noise.sigma_M = 0.1;
  } else if (experiment == "regret") {
    cfg.world.n = 64;
    cfg.world.noise.sigma_M = 0.1;
    cfg.world.signal = SignalModel{1.0, 0.3, 0.5, 0.0};
    cfg.replications = 10;
  } else if (experiment == "control-check") {
    cfg.world.n = 128;
    cfg.world.cost = CostParams{0.5, 1.0, 1.0};
    cfg.world.signal = SignalModel{1.0, 0.3, 0.5, 0.0};
    cfg.replications = 1;
  } else if (experiment == "signal-rate") {
    cfg.world.signal = SignalModel{1.0, 0.2, 0.0, 0.1};
  } else if (experiment == "dist-fn") {
    cfg.replications = 1;
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& text, const std::string& experiment) {
  ExperimentConfig cfg = default_config(experiment);
  boost::property_tree::ptree pt;
  try {
    std::istringstream is(text);
    boost::property_tree::ini_parser::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  KernelParams kp;
  bool kernel_set = false;
  auto& w = cfg.world;
  auto& est = cfg.estimator;
  auto& er = cfg.estimate_rate;
  auto& rg = cfg.regret;
  auto& ls = cfg.lsmc;
  auto& cc = cfg.control;
  auto& df = cfg.dist_fn;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto num = [](double& x) -> Setter { return [&x](const std::string& k, const std::string& v) { x = to_double(k, v); }; };
  auto integer = [](int& x) -> Setter {
    return [&x](const std::string& k, const std::string& v) { x = static_cast<int>(to_int(k, v)); };
  };
  auto flag = [](bool& x) -> Setter { return [&x](const std::string& k, const std::string& v) { x = to_bool(k, v); }; };
  auto kset = [&](double& x) -> Setter {
    return [&x, &kernel_set](const std::string& k, const std::string& v) {
      x = to_double(k, v);
      kernel_set = true;
    };
  };

  std::map<std::string, Setter> table = {
      {"world.T", num(w.T)},
      {"world.n", integer(w.n)},
      {"world.lambda", num(w.lambda)},
      {"world.kernel",
       [&](const std::string&, const std::string& v) {
         kp.name = v;
         kernel_set = true;
       }},
      {"world.kernel_beta", kset(kp.beta)},
      {"world.kernel_scale", kset(kp.scale)},
      {"world.kernel_c0", kset(kp.c0)},
      {"world.kernel_power", kset(kp.tpl_beta)},
      {"world.kernel_alpha", kset(kp.alpha)},
      {"world.kernel_c", kset(kp.c)},
      {"world.signal_beta", num(w.signal.beta)},
      {"world.signal_sigma", num(w.signal.sigma_I)},
      {"world.signal_I0_mean", num(w.signal.I0_mean)},
      {"world.signal_I0_std", num(w.signal.I0_std)},
      {"world.noise_sigma_M", num(w.noise.sigma_M)},
      {"world.noise_sigma_0", num(w.noise.sigma_0)},
      {"world.phi", num(w.cost.phi)},
      {"world.rho", num(w.cost.rho)},
      {"world.q", num(w.cost.q)},
      {"estimator.type",
       [&](const std::string& k, const std::string& v) {
         if (v == "regular") est.type = KernelType::Regular;
         else if (v == "singular") est.type = KernelType::Singular;
         else throw ConfigError(k + ": expected regular or singular");
         cfg.estimator_type_set = true;
       }},
      {"estimator.alpha", num(est.alpha)},
      {"estimator.eta", num(est.eta)},
      {"estimator.C", num(est.C)},
      {"estimator.C_pi", num(est.C_pi)},
      {"estimate_rate.N_list",
       [&](const std::string& k, const std::string& v) { er.N_list = to_list<int>(k, v, to_int); }},
      {"estimate_rate.ue", num(er.ue)},
      {"learner.eta", num(rg.eta)},
      {"learner.C", num(rg.C)},
      {"learner.kappa", num(rg.kappa)},
      {"learner.L", num(rg.L)},
      {"learner.eps", num(rg.eps)},
      {"learner.ue", num(rg.ue)},
      {"learner.N_max", integer(rg.N_max)},
      {"learner.tail_fraction", num(rg.tail_fraction)},
      {"learner.lsmc_learner", flag(rg.lsmc_learner)},
      {"learner.lsmc_comparator", flag(rg.lsmc_comparator)},
      {"lsmc.M_list", [&](const std::string& k, const std::string& v) { ls.M_list = to_list<int>(k, v, to_int); }},
      {"lsmc.vartheta", num(ls.vartheta)},
      {"lsmc.cN", num(ls.cN)},
      {"lsmc.cK", num(ls.cK)},
      {"lsmc.cR", num(ls.cR)},
      {"lsmc.test_paths", integer(ls.test_paths)},
      {"lsmc.t_points", integer(ls.t_points)},
      {"lsmc.s_points", integer(ls.s_points)},
      {"lsmc.M", integer(ls.M)},
      {"control.phi_list",
       [&](const std::string& k, const std::string& v) { cc.phi_list = to_list<double>(k, v, to_double); }},
      {"control.thetas", integer(cc.thetas)},
      {"control.L", num(cc.L)},
      {"control.eps", num(cc.eps)},
      {"control.gateaux_paths", integer(cc.gateaux_paths)},
      {"control.directions", integer(cc.directions)},
      {"control.fd_step", num(cc.fd_step)},
      {"control.eps_list",
       [&](const std::string& k, const std::string& v) { cc.eps_list = to_list<double>(k, v, to_double); }},
      {"control.rays", integer(cc.rays)},
      {"control.gap_paths", integer(cc.gap_paths)},
      {"dist_fn.ue", num(df.ue)},
      {"dist_fn.R_min", num(df.R_min)},
      {"dist_fn.R_max", num(df.R_max)},
      {"dist_fn.points", integer(df.points)},
      {"dist_fn.fit_lo", num(df.fit_lo)},
      {"dist_fn.fit_hi", num(df.fit_hi)},
      {"dist_fn.plateau_fraction", num(df.plateau_fraction)},
      {"run.seed",
       [&](const std::string& k, const std::string& v) {
         try {
           std::size_t pos = 0;
           cfg.seed = std::stoull(v, &pos);
           if (!trim(v.substr(pos)).empty()) throw ConfigError(k);
         } catch (const std::exception&) {
           throw ConfigError(k + ": expected an unsigned integer");
         }
       }},
      {"run.replications", integer(cfg.replications)},
      {"run.workers", integer(cfg.workers)},
      {"output.dir", [&](const std::string&, const std::string& v) { cfg.out_dir = v; }},
      {"output.dump_episodes", flag(cfg.dump_episodes)},
      {"output.dump_limit", integer(cfg.dump_limit)},
  };

  for (const auto& [section, body] : pt) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside of a section");
    for (const auto& [key, node] : body) {
      const std::string value = trim(node.get_value<std::string>());
      const std::string full = section + "." + key;
      if (section == "checks") {
        const bool lo = key.size() > 3 && key.compare(key.size() - 3, 3, "_lo") == 0;
        const bool hi = key.size() > 3 && key.compare(key.size() - 3, 3, "_hi") == 0;
        if (!lo && !hi) throw ConfigError(full + ": check bands are written name_lo / name_hi");
        const std::string name = key.substr(0, key.size() - 3);
        auto it = std::find_if(cfg.bands.begin(), cfg.bands.end(), [&](const auto& b) { return b.first == name; });
        if (it == cfg.bands.end()) {
          cfg.bands.push_back({name, Band{}});
          it = cfg.bands.end() - 1;
        }
        (lo ? it->second.lo : it->second.hi) = to_double(full, value);
        continue;
      }
      auto it = table.find(full);
      if (it == table.end()) throw ConfigError("unknown key '" + full + "'");
      it->second(full, value);
    }
  }
  if (kernel_set) w.kernel = build_kernel(kp);
  resolve(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::string& experiment) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), experiment);
}

void resolve(ExperimentConfig& cfg) {
  auto& w = cfg.world;
  if (!(w.T > 0.0)) throw ConfigError("world.T must be positive");
  if (w.n < 2 || (w.n & (w.n - 1)) != 0) throw ConfigError("world.n must be a power of two");
  if (!(w.lambda > 0.0)) throw ConfigError("world.lambda must be positive");
  if (w.cost.phi < 0.0 || w.cost.rho < 0.0) throw ConfigError("world.phi and world.rho must be non-negative");
  if (w.noise.sigma_M < 0.0 || w.noise.sigma_0 < 0.0) throw ConfigError("noise scales must be non-negative");
  if (w.signal.sigma_I < 0.0 || w.signal.I0_std < 0.0 || w.signal.beta < 0.0)
    throw ConfigError("signal parameters must be non-negative");
  if (!cfg.estimator_type_set) {
    if (const auto* p = std::get_if<PowerLaw>(&w.kernel)) {
      cfg.estimator.type = KernelType::Singular;
      cfg.estimator.alpha = p->alpha;
    } else {
      cfg.estimator.type = KernelType::Regular;
    }
  }
  if (!(cfg.estimator.eta > 0.0 && cfg.estimator.eta < 1.0)) throw ConfigError("estimator.eta must lie in (0,1)");
  if (cfg.estimator.C < 1.0) throw ConfigError("estimator.C must be at least 1");
  if (cfg.regret.kappa == 0.0) {
    const double a = cfg.estimator.alpha;
    cfg.regret.kappa = cfg.estimator.type == KernelType::Regular ? 1.0 / 3.0 : (1.0 - 2.0 * a) / (3.0 - 2.0 * a);
  }
  if (!(cfg.regret.kappa > 0.0 && cfg.regret.kappa < 1.0)) throw ConfigError("learner.kappa must lie in (0,1)");
  if (!(cfg.regret.eps > 0.0 && cfg.regret.eps < 0.5 / cfg.regret.L))
    throw ConfigError("learner.eps must lie in (0, 1/(2L))");
  if (cfg.replications < 1) throw ConfigError("run.replications must be positive");
  if (cfg.workers < 1) throw ConfigError("run.workers must be positive");
  if (cfg.estimate_rate.N_list.empty() || *std::min_element(cfg.estimate_rate.N_list.begin(),
                                                            cfg.estimate_rate.N_list.end()) < 2)
    throw ConfigError("estimate_rate.N_list entries must be at least 2");
  std::sort(cfg.estimate_rate.N_list.begin(), cfg.estimate_rate.N_list.end());
  std::sort(cfg.lsmc.M_list.begin(), cfg.lsmc.M_list.end());
}

nlohmann::json kernel_to_json(const KernelSpec& k) {
  nlohmann::json j;
  if (const auto* e = std::get_if<Exponential>(&k)) j = {{"type", "exponential"}, {"beta", e->beta}, {"scale", e->scale}};
  else if (const auto* t = std::get_if<TruncatedPowerLaw>(&k))
    j = {{"type", "truncated_power_law"}, {"c0", t->c0}, {"power", t->beta}};
  else if (const auto* p = std::get_if<PowerLaw>(&k)) j = {{"type", "power_law"}, {"alpha", p->alpha}};
  else if (const auto* c = std::get_if<Constant>(&k)) j = {{"type", "constant"}, {"c", c->c}};
  else j = {{"type", "tabulated"}};
  return j;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  const auto& w = cfg.world;
  nlohmann::json j;
  j["experiment"] = cfg.experiment;
  j["world"] = {{"T", w.T},
                {"n", w.n},
                {"lambda", w.lambda},
                {"kernel", kernel_to_json(w.kernel)},
                {"signal",
                 {{"beta", w.signal.beta},
                  {"sigma", w.signal.sigma_I},
                  {"I0_mean", w.signal.I0_mean},
                  {"I0_std", w.signal.I0_std}}},
                {"noise", {{"sigma_M", w.noise.sigma_M}, {"sigma_0", w.noise.sigma_0}}},
                {"cost", {{"phi", w.cost.phi}, {"rho", w.cost.rho}, {"q", w.cost.q}}}};
  j["estimator"] = {{"type", cfg.estimator.type == KernelType::Regular ? "regular" : "singular"},
                    {"alpha", cfg.estimator.alpha},
                    {"eta", cfg.estimator.eta},
                    {"C", cfg.estimator.C},
                    {"C_pi", cfg.estimator.C_pi}};
  j["estimate_rate"] = {{"N_list", cfg.estimate_rate.N_list}, {"ue", cfg.estimate_rate.ue}};
  const auto& r = cfg.regret;
  j["learner"] = {{"eta", r.eta},         {"C", r.C},
                  {"kappa", r.kappa},     {"L", r.L},
                  {"eps", r.eps},         {"ue", r.ue},
                  {"N_max", r.N_max},     {"tail_fraction", r.tail_fraction},
                  {"lsmc_learner", r.lsmc_learner}, {"lsmc_comparator", r.lsmc_comparator}};
  const auto& l = cfg.lsmc;
  j["lsmc"] = {{"M_list", l.M_list},           {"vartheta", l.vartheta}, {"cN", l.cN},
               {"cK", l.cK},                   {"cR", l.cR},             {"test_paths", l.test_paths},
               {"t_points", l.t_points},       {"s_points", l.s_points}, {"M", l.M}};
  const auto& c = cfg.control;
  j["control"] = {{"phi_list", c.phi_list},           {"thetas", c.thetas},       {"L", c.L},
                  {"eps", c.eps},                     {"gateaux_paths", c.gateaux_paths},
                  {"directions", c.directions},       {"fd_step", c.fd_step},     {"eps_list", c.eps_list},
                  {"rays", c.rays},                   {"gap_paths", c.gap_paths}};
  const auto& d = cfg.dist_fn;
  j["dist_fn"] = {{"ue", d.ue},         {"R_min", d.R_min},   {"R_max", d.R_max},
                  {"points", d.points}, {"fit_lo", d.fit_lo}, {"fit_hi", d.fit_hi},
                  {"plateau_fraction", d.plateau_fraction}};
  j["run"] = {{"seed", cfg.seed}, {"replications", cfg.replications}, {"workers", cfg.workers}};
  j["output"] = {{"dir", cfg.out_dir}, {"dump_episodes", cfg.dump_episodes}, {"dump_limit", cfg.dump_limit}};
  nlohmann::json bands = nlohmann::json::object();
  for (const auto& [name, b] : cfg.bands) bands[name] = {{"lo", b.lo}, {"hi", b.hi}};
  j["checks"] = bands;
  return j;
}

}  // namespace liq
