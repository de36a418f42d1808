#pragma once

#include <memory>
#include <utility>

#include "liquidate/grid_ops.hpp"
#include "liquidate/market.hpp"
#include "liquidate/propagator.hpp"

namespace liq {

/// Supplies e_r = E[A_r - A_T | F_{t_k}] for r >= k (zero for r < k).
class CondExpProvider {
 public:
  virtual ~CondExpProvider() = default;
  virtual void cond_exp(const PolicyInput& info, Vec& e) const = 0;
};

/// A identically zero.
class ZeroCondExp final : public CondExpProvider {
 public:
  void cond_exp(const PolicyInput& info, Vec& e) const override;
};

/// Exact conditional mean for the OU signal on the grid:
/// E_k[A_r - A_T] = -h sum_{j=r}^{n-1} I_k e^{-beta (j-k) h}.
class OuCondExp final : public CondExpProvider {
 public:
  explicit OuCondExp(double beta) : beta_(beta) {}
  void cond_exp(const PolicyInput& info, Vec& e) const override;

 private:
  double beta_;
};

/// Kernel of G~(t,s) = (2 rho + G(t-s)) 1_{s<t} on the grid, with rho on the diagonal.
Mat gtilde_kernel(const Theta& theta, const CostParams& cost);

/// D_k = 2 lambda id + G~_k + G~_k^* + 2 phi 1_k^* 1_k as an explicit operator.
DiscreteOperator build_D(const Theta& theta, const CostParams& cost, int k);

/// Everything the greedy strategy needs for one (theta, cost, grid).
///
/// D_k is the trailing principal block of D_0, so a single Cholesky
/// factorization of the index-reversed D_0 serves every node.
class ControlAssembly {
 public:
  ControlAssembly(const Theta& theta, const CostParams& cost);

  const Grid& grid() const { return grid_; }
  const Theta& theta() const { return theta_; }
  const CostParams& cost() const { return cost_; }

  /// Strictly lower-triangular feedback kernel B(t_k, t_s).
  const Mat& B() const { return B_; }
  /// Signal-free part of the drift a_k.
  const Vec& drift_deterministic() const { return a_det_; }

  Vec solve_D(int k, const Vec& rhs) const;
  Vec apply_D(int k, const Vec& f) const;
  Vec ones_apply(int k, const Vec& f) const;
  Vec ones_adjoint_apply(int k, const Vec& g) const;

  std::pair<Vec, Vec> gamma_inverse_apply(int k, const Vec& f1, const Vec& f2) const;
  /// Forward Gamma_k; requires phi > 0.
  std::pair<Vec, Vec> gamma_apply(int k, const Vec& f1, const Vec& f2) const;

  /// K_k = ((G~ + G~^*)(., t_k) on r >= k, -1_{r > k}).
  std::pair<Vec, Vec> K(int k) const;

  /// Theta_k = -Gamma_k^{-1} (e 1_{r >= k}, 0).
  std::pair<Vec, Vec> theta_process(int k, const Vec& e) const;

  /// a_k given the conditional-expectation vector e at node k.
  double drift(int k, const Vec& e) const;

 private:
  Grid grid_;
  Theta theta_;
  CostParams cost_;
  Mat Gt_;
  Eigen::LLT<Mat> chol_rev_;
  Mat W1_;  // row k: first component of Gamma_k^{-1} K_k
  Mat B_;
  Vec a_det_;
};

std::pair<Vec, Vec> gamma_inverse_apply(const ControlAssembly& ca, int k, const Vec& f1, const Vec& f2);
std::pair<Vec, Vec> theta_process(const ControlAssembly& ca, int k, const CondExpProvider& ce, const PolicyInput& in);
Mat feedback_kernel_B(const Theta& theta, const CostParams& cost);
double drift_a(const ControlAssembly& ca, int k, const CondExpProvider& ce, const PolicyInput& in);

/// u_i = a_i + h sum_{j<i} B_ij u_j with a_i from the realized signal at t_i.
Policy greedy_control(std::shared_ptr<const ControlAssembly> ca, std::shared_ptr<const CondExpProvider> ce);

}  // namespace liq
