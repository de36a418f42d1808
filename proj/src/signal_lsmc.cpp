#include "liquidate/signal_lsmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "liquidate/csv.hpp"

namespace liq {

LsmcConfig lsmc_hyperparams(int M, double vartheta, const LsmcConstants& c) {
  if (M < 2) throw std::invalid_argument("lsmc_hyperparams: M must be at least 2");
  if (!(vartheta > 2.0)) throw std::invalid_argument("lsmc_hyperparams: vartheta must exceed 2");
  const double base = M / (std::log(static_cast<double>(M)) + 1.0);
  LsmcConfig cfg;
  cfg.M = M;
  cfg.vartheta = vartheta;
  cfg.N = std::max(1, static_cast<int>(std::ceil(c.cN * std::pow(base, 2.0 / 3.0))));
  cfg.K = std::max(1, static_cast<int>(std::ceil(c.cK * std::pow(base, 1.0 / 3.0))));
  cfg.R = std::max(1.0, c.cR * std::pow(base, 2.0 / (3.0 * vartheta)));
  return cfg;
}

CondExpTable::CondExpTable(int N, int K, double R, double T)
    : N_(N), K_(K), R_(R), T_(T), psi_(static_cast<std::size_t>(N) * N * K, 0.0) {
  if (N < 1 || K < 1 || !(R > 0.0) || !(T > 0.0)) throw std::invalid_argument("CondExpTable: bad shape");
}

std::size_t CondExpTable::index(int i, int j, int b) const {
  return (static_cast<std::size_t>(i) * N_ + j) * K_ + b;
}

int CondExpTable::bin(double x) const {
  const double half = 0.5 * R_;
  if (!(x >= -half && x <= half)) return -1;
  return std::min(K_ - 1, static_cast<int>(std::floor((x + half) / (R_ / K_))));
}

double CondExpTable::psi(int i, int j, double x) const {
  const int b = bin(x);
  return b < 0 ? 0.0 : at(i, j, b);
}

int CondExpTable::node_below(double t) const {
  return std::clamp(static_cast<int>(std::floor(t / dt() + 1e-12)), 0, N_ - 1);
}

void CondExpTable::write_csv(std::ostream& os) const {
  os << "# N=" << N_ << ",K=" << K_ << ",R=" << format_number(R_) << ",T=" << format_number(T_) << '\n';
  CsvTable t;
  t.header = {"i", "j", "bin", "value"};
  for (int i = 0; i < N_; ++i)
    for (int j = i; j < N_; ++j)
      for (int b = 0; b < K_; ++b)
        t.add_row({std::to_string(i), std::to_string(j), std::to_string(b), format_number(at(i, j, b))});
  t.write(os);
}

CondExpTable CondExpTable::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("CondExpTable: missing shape line");
  int N = 0, K = 0;
  double R = 0.0, T = 0.0;
  if (std::sscanf(line.c_str(), "# N=%d,K=%d,R=%lf,T=%lf", &N, &K, &R, &T) != 4)
    throw std::runtime_error("CondExpTable: malformed shape line");
  CondExpTable table(N, K, R, T);
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c, v;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    std::getline(ls, c, ',');
    std::getline(ls, v, ',');
    const int i = std::stoi(a), j = std::stoi(b), k = std::stoi(c);
    if (i < 0 || j < i || j >= N || k < 0 || k >= K) throw std::runtime_error("CondExpTable: index out of range");
    table.at(i, j, k) = std::stod(v);
  }
  return table;
}

Mat lsmc_simulate_paths(const SignalModel& model, double T, int N, int M, std::uint64_t seed) {
  const double dt = T / N;
  const double decay = std::exp(-model.beta * dt);
  const double vol = model.beta > 0.0
                         ? model.sigma_I * std::sqrt(-std::expm1(-2.0 * model.beta * dt) / (2.0 * model.beta))
                         : model.sigma_I * std::sqrt(dt);
  Mat paths(M, N + 1);
  for (int m = 0; m < M; ++m) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(m), 0x15u);
    const Vec xi = standard_normals(rng, N + 1);
    paths(m, 0) = model.I0_mean + model.I0_std * xi[0];
    for (int j = 0; j < N; ++j) paths(m, j + 1) = paths(m, j) * decay + vol * xi[j + 1];
  }
  return paths;
}

CondExpTable lsmc_fit(const Mat& paths, double T, const LsmcConfig& cfg) {
  const int N = cfg.N, K = cfg.K;
  if (paths.cols() < N) throw std::invalid_argument("lsmc_fit: paths must cover the N-grid");
  CondExpTable table(N, K, cfg.R, T);
  const double R = cfg.R;
  std::vector<double> count(static_cast<std::size_t>(K));
  for (int i = 0; i < N; ++i) {
    std::fill(count.begin(), count.end(), 0.0);
    for (Eigen::Index m = 0; m < paths.rows(); ++m) {
      const int b = table.bin(paths(m, i));
      if (b < 0) continue;
      count[b] += 1.0;
      for (int j = i; j < N; ++j) table.at(i, j, b) += std::clamp(paths(m, j), -R, R);
    }
    for (int b = 0; b < K; ++b) {
      if (count[b] == 0.0) continue;
      for (int j = i; j < N; ++j) table.at(i, j, b) = std::clamp(table.at(i, j, b) / count[b], -R, R);
    }
  }
  return table;
}

namespace {

// sum_j psi_{i,j}(x) |[t,s] cap [t_j, t_{j+1})|
double rectangle_sum(const CondExpTable& table, int i, int b, double t, double s) {
  if (b < 0 || s <= t) return 0.0;
  const double dt = table.dt();
  double acc = 0.0;
  for (int j = i; j < table.N(); ++j) {
    const double lo = std::max(t, j * dt), hi = std::min(s, (j + 1) * dt);
    if (hi > lo) acc += table.at(i, j, b) * (hi - lo);
  }
  return acc;
}

}  // namespace

double lsmc_eval(const CondExpTable& table, double A_t, double I_node, double t, double s) {
  if (t > s) throw std::invalid_argument("lsmc_eval: t must not exceed s");
  const int i = table.node_below(t);
  return A_t + rectangle_sum(table, i, table.bin(I_node), t, s);
}

double lsmc_error(const CondExpTable& table, const SignalModel& model, int test_paths, std::uint64_t seed,
                  int t_points, int s_points) {
  const double T = table.T();
  const double b = model.beta;
  auto marginal_sd = [&](double t) {
    const double stat = b > 0.0 ? -std::expm1(-2.0 * b * t) / (2.0 * b) : t;
    return std::sqrt(model.I0_std * model.I0_std * std::exp(-2.0 * b * t) + model.sigma_I * model.sigma_I * stat);
  };
  auto growth = [&](double x) { return b > 0.0 ? -std::expm1(-b * x) / b : x; };  // int_0^x e^{-b r} dr
  double worst = 0.0;
  for (int q = 0; q < t_points; ++q) {
    const double t = T * q / t_points;
    const int i = table.node_below(t);
    const double ti = i * table.dt();
    std::vector<double> s_grid;
    for (int l = 0; l <= s_points; ++l) s_grid.push_back(t + (T - t) * l / s_points);
    for (int j = i + 1; j <= table.N(); ++j) s_grid.push_back(j * table.dt());
    double mse = 0.0;
    for (int p = 0; p < test_paths; ++p) {
      Rng rng = substream(seed, static_cast<std::uint64_t>(p), 0x7e57u + static_cast<std::uint64_t>(q));
      const Vec xi = standard_normals(rng, 2);
      const double I_node = model.I0_mean * std::exp(-b * ti) + marginal_sd(ti) * xi[0];
      const double gap = t - ti;
      const double vol = b > 0.0 ? model.sigma_I * std::sqrt(-std::expm1(-2.0 * b * gap) / (2.0 * b))
                                 : model.sigma_I * std::sqrt(gap);
      const double I_t = I_node * std::exp(-b * gap) + vol * xi[1];
      const int bin = table.bin(I_node);
      double sup = 0.0;
      for (double s : s_grid) {
        if (s < t) continue;
        const double truth = I_t * growth(s - t);
        sup = std::max(sup, std::abs(truth - rectangle_sum(table, i, bin, t, s)));
      }
      mse += sup * sup;
    }
    worst = std::max(worst, std::sqrt(mse / test_paths));
  }
  return worst;
}

void LsmcCondExp::cond_exp(const PolicyInput& info, Vec& e) const {
  const Grid& g = *info.grid;
  const int n = g.n, k = info.i;
  e = Vec::Zero(n);
  const double t = g.node(k);
  const int i = table_.node_below(t);
  const int sim_node = std::min(k, static_cast<int>(std::floor(i * table_.dt() / g.h + 1e-9)));
  const int b = table_.bin(info.I[sim_node]);
  for (int r = k; r < n; ++r) e[r] = -rectangle_sum(table_, i, b, g.node(r), g.T);
}

}  // namespace liq
