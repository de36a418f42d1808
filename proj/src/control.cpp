#include "liquidate/control.hpp"

#include <cmath>

namespace liq {

void ZeroCondExp::cond_exp(const PolicyInput& info, Vec& e) const { e = Vec::Zero(info.grid->n); }

void OuCondExp::cond_exp(const PolicyInput& info, Vec& e) const {
  const Grid& g = *info.grid;
  const int n = g.n, k = info.i;
  e = Vec::Zero(n);
  const double Ik = info.I[k];
  const double decay = std::exp(-beta_ * g.h);
  // weights e^{-beta (j-k) h} for j = k..n-1, accumulated from the right
  Vec w(n - k);
  double x = 1.0;
  for (int j = 0; j < n - k; ++j, x *= decay) w[j] = x;
  double tail = 0.0;
  for (int r = n - 1; r >= k; --r) {
    tail += w[r - k];
    e[r] = -g.h * Ik * tail;
  }
}

Mat gtilde_kernel(const Theta& theta, const CostParams& cost) {
  const int n = theta.G.grid.n;
  const Vec& g = theta.G.values;
  Mat Gt = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Gt(i, i) = cost.rho;
    for (int j = 0; j < i; ++j) Gt(i, j) = 2.0 * cost.rho + g[i - 1 - j];
  }
  return Gt;
}

DiscreteOperator build_D(const Theta& theta, const CostParams& cost, int k) {
  const Grid& grid = theta.G.grid;
  const int n = grid.n;
  if (k < 0 || k >= n) throw std::out_of_range("build_D: node index");
  Mat Gk = gtilde_kernel(theta, cost);
  Gk.leftCols(k).setZero();
  Mat K = Gk + Gk.transpose();
  if (cost.phi != 0.0) {
    for (int a = k; a < n; ++a)
      for (int b = k; b < n; ++b) K(a, b) += 2.0 * cost.phi * grid.h * (n - 1 - std::max(a, b));
  }
  return DiscreteOperator(grid, 2.0 * theta.lambda, std::move(K));
}

ControlAssembly::ControlAssembly(const Theta& theta, const CostParams& cost)
    : grid_(theta.G.grid), theta_(theta), cost_(cost) {
  if (!(theta.lambda > 0.0)) throw std::invalid_argument("ControlAssembly: lambda must be positive");
  const int n = grid_.n;
  const double h = grid_.h;
  const double lam2 = 2.0 * theta.lambda;
  Gt_ = gtilde_kernel(theta, cost);

  const Mat D0 = build_D(theta, cost, 0).dense();
  chol_rev_.compute(D0.reverse());
  if (chol_rev_.info() != Eigen::Success) throw NumericalError("ControlAssembly: D_0 is not positive definite");

  W1_ = Mat::Zero(n, n);
  B_ = Mat::Zero(n, n);
  a_det_ = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    auto [K1, K2] = K(k);
    auto [W1, W2] = gamma_inverse_apply(k, K1, K2);
    W1_.row(k) = W1.transpose();
    const int m = n - k;
    const double sW2 = W2.tail(m).sum();
    if (k > 0) {
      // (1/2lambda) (h sum_{r>=k} (W1_r G~(r,s) - W2_r) - G~(k,s)), s < k
      const Vec v = Gt_.block(k, 0, m, k).transpose() * W1.tail(m);
      B_.row(k).head(k) = ((h * (v.array() - sW2)).matrix() - Gt_.row(k).head(k).transpose()).transpose() / lam2;
    }
    const double q = cost.q, rho = cost.rho;
    a_det_[k] = (2.0 * rho * q + h * (-2.0 * rho * q * W1.tail(m).sum() + q * sW2)) / lam2;
  }
}

Vec ControlAssembly::solve_D(int k, const Vec& rhs) const {
  const int n = grid_.n, m = n - k;
  Vec x(n);
  x.head(k) = rhs.head(k) / (2.0 * theta_.lambda);
  Vec z = rhs.tail(m).reverse();
  const Mat& Lm = chol_rev_.matrixLLT();
  Lm.topLeftCorner(m, m).triangularView<Eigen::Lower>().solveInPlace(z);
  Lm.topLeftCorner(m, m).triangularView<Eigen::Lower>().transpose().solveInPlace(z);
  x.tail(m) = z.reverse();
  return x;
}

Vec ControlAssembly::apply_D(int k, const Vec& f) const { return build_D(theta_, cost_, k).apply(f); }

Vec ControlAssembly::ones_apply(int k, const Vec& f) const {
  const int n = grid_.n;
  Vec out = Vec::Zero(n);
  double acc = 0.0;
  for (int i = k; i < n; ++i) {
    out[i] = grid_.h * acc;
    acc += f[i];
  }
  return out;
}

Vec ControlAssembly::ones_adjoint_apply(int k, const Vec& g) const {
  const int n = grid_.n;
  Vec out = Vec::Zero(n);
  double acc = 0.0;
  for (int j = n - 1; j >= k; --j) {
    out[j] = grid_.h * acc;
    acc += g[j];
  }
  return out;
}

std::pair<Vec, Vec> ControlAssembly::gamma_inverse_apply(int k, const Vec& f1, const Vec& f2) const {
  const double phi = cost_.phi;
  if (phi == 0.0) return {solve_D(k, f1), Vec::Zero(grid_.n)};
  Vec x1 = solve_D(k, f1 - 2.0 * phi * ones_adjoint_apply(k, f2));
  Vec x2 = -2.0 * phi * (ones_apply(k, x1) + f2);
  return {std::move(x1), std::move(x2)};
}

std::pair<Vec, Vec> ControlAssembly::gamma_apply(int k, const Vec& f1, const Vec& f2) const {
  const double phi = cost_.phi;
  if (!(phi > 0.0)) throw std::invalid_argument("gamma_apply: requires phi > 0");
  const Vec one_f1 = ones_apply(k, f1);
  Vec y1 = apply_D(k, f1) - 2.0 * phi * ones_adjoint_apply(k, one_f1) - ones_adjoint_apply(k, f2);
  Vec y2 = -one_f1 - f2 / (2.0 * phi);
  return {std::move(y1), std::move(y2)};
}

std::pair<Vec, Vec> ControlAssembly::K(int k) const {
  const int n = grid_.n;
  Vec K1 = Vec::Zero(n), K2 = Vec::Zero(n);
  for (int r = k; r < n; ++r) {
    K1[r] = Gt_(r, k) + Gt_(k, r);
    if (r > k) K2[r] = -1.0;
  }
  return {std::move(K1), std::move(K2)};
}

std::pair<Vec, Vec> ControlAssembly::theta_process(int k, const Vec& e) const {
  Vec f1 = e;
  f1.head(k).setZero();
  auto [x1, x2] = gamma_inverse_apply(k, f1, Vec::Zero(grid_.n));
  return {-x1, -x2};
}

double ControlAssembly::drift(int k, const Vec& e) const {
  const int m = grid_.n - k;
  // <Theta_k, K_k> = -<(e, 0), Gamma_k^{-1} K_k> by self-adjointness
  const double theta_K = -grid_.h * W1_.row(k).tail(m).dot(e.tail(m));
  return a_det_[k] + (e[k] + theta_K) / (2.0 * theta_.lambda);
}

std::pair<Vec, Vec> gamma_inverse_apply(const ControlAssembly& ca, int k, const Vec& f1, const Vec& f2) {
  return ca.gamma_inverse_apply(k, f1, f2);
}

std::pair<Vec, Vec> theta_process(const ControlAssembly& ca, int k, const CondExpProvider& ce, const PolicyInput& in) {
  Vec e;
  ce.cond_exp(in, e);
  return ca.theta_process(k, e);
}

Mat feedback_kernel_B(const Theta& theta, const CostParams& cost) { return ControlAssembly(theta, cost).B(); }

double drift_a(const ControlAssembly& ca, int k, const CondExpProvider& ce, const PolicyInput& in) {
  Vec e;
  ce.cond_exp(in, e);
  return ca.drift(k, e);
}

Policy greedy_control(std::shared_ptr<const ControlAssembly> ca, std::shared_ptr<const CondExpProvider> ce) {
  return [ca = std::move(ca), ce = std::move(ce)](const PolicyInput& in) {
    Vec e;
    ce->cond_exp(in, e);
    const int i = in.i;
    double fb = 0.0;
    const Mat& B = ca->B();
    for (int j = 0; j < i; ++j) fb += B(i, j) * in.u_past[j];
    const double a = ca->drift(i, e);
    if (!std::isfinite(a)) throw NumericalError("greedy_control: non-finite drift");
    return a + ca->grid().h * fb;
  };
}

}  // namespace liq
