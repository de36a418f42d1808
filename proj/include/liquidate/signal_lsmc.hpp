#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "liquidate/control.hpp"
#include "liquidate/market.hpp"

namespace liq {

struct LsmcConfig {
  int M = 1000;     // training paths
  int N = 26;       // time cells
  int K = 6;        // spatial bins
  double R = 2.0;   // truncation level
  double vartheta = 4.0;
};

/// Proportionality constants of the hyperparameter scalings.
struct LsmcConstants {
  double cN = 1.0;
  double cK = 1.0;
  double cR = 1.0;
};

/// N ~ b^{2/3}, K ~ b^{1/3}, R ~ b^{2/(3 vartheta)} with b = M / (ln M + 1).
LsmcConfig lsmc_hyperparams(int M, double vartheta, const LsmcConstants& c = {});

/// psi_{i,j} for 0 <= i <= j < N, piecewise constant on K uniform bins of
/// [-R/2, R/2] and zero outside.
class CondExpTable {
 public:
  CondExpTable() = default;
  CondExpTable(int N, int K, double R, double T);

  int N() const { return N_; }
  int K() const { return K_; }
  double R() const { return R_; }
  double T() const { return T_; }
  double dt() const { return T_ / N_; }

  /// Bin of x, or -1 outside [-R/2, R/2].
  int bin(double x) const;
  double& at(int i, int j, int b) { return psi_[index(i, j, b)]; }
  double at(int i, int j, int b) const { return psi_[index(i, j, b)]; }
  /// psi_{i,j}(x)
  double psi(int i, int j, double x) const;
  /// LSMC node at or below t.
  int node_below(double t) const;

  void write_csv(std::ostream& os) const;
  static CondExpTable read_csv(std::istream& is);

 private:
  std::size_t index(int i, int j, int b) const;
  int N_ = 0, K_ = 0;
  double R_ = 0.0, T_ = 1.0;
  std::vector<double> psi_;
};

/// Training trajectories: row m holds I^m at t_j = j T / N, j = 0..N.
Mat lsmc_simulate_paths(const SignalModel& model, double T, int N, int M, std::uint64_t seed);

CondExpTable lsmc_fit(const Mat& paths, double T, const LsmcConfig& cfg);

/// E_t[A_s] ~ A_t + sum_j psi_{i(t),j}(I_node) |[t,s] cap [t_j, t_{j+1})|, where
/// I_node is the signal at the LSMC node below t.
double lsmc_eval(const CondExpTable& table, double A_t, double I_node, double t, double s);

/// sup over a t-subgrid of the root-mean-square over test samples of
/// sup_s |E_t[A_s] - approximation|, against the OU oracle.
double lsmc_error(const CondExpTable& table, const SignalModel& model, int test_paths, std::uint64_t seed,
                  int t_points = 8, int s_points = 128);

/// Plugs a fitted table into the greedy strategy on a simulation grid. The
/// signal at the LSMC node below t_k is taken from the latest simulation node
/// not after it.
class LsmcCondExp final : public CondExpProvider {
 public:
  explicit LsmcCondExp(CondExpTable table) : table_(std::move(table)) {}
  void cond_exp(const PolicyInput& info, Vec& e) const override;

 private:
  CondExpTable table_;
};

}  // namespace liq
