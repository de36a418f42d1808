#include "liquidate/estimator.hpp"

#include <cmath>

#include <boost/math/tools/roots.hpp>

namespace liq {

ObservationSet::ObservationSet(DiscreteFn ue) : ue_(std::move(ue)), sum_(Vec::Zero(ue_.grid.n)) {
  if (ue_.values[0] == 0.0) throw std::invalid_argument("ObservationSet: exploration strategy needs u^e(0) != 0");
}

void ObservationSet::add(const Vec& S, const Vec& A) {
  const int n = ue_.grid.n;
  if (S.size() != n || A.size() < n) throw std::invalid_argument("ObservationSet::add: path length mismatch");
  sum_ += S - A.head(n);
  ++count_;
}

Vec ObservationSet::mean_price_residual() const {
  if (count_ == 0) throw std::logic_error("ObservationSet: no episodes");
  return sum_ / count_;
}

Schedule schedule(int N, const EstimatorConfig& cfg, const Grid& g) {
  if (N < 2) throw std::invalid_argument("schedule: N must be at least 2");
  const double base = (std::log(1.0 / cfg.eta) + std::log(static_cast<double>(N))) / std::sqrt(static_cast<double>(N));
  const double expo = cfg.type == KernelType::Regular ? 4.0 / 3.0 : 4.0 / (3.0 - 2.0 * cfg.alpha);
  Schedule s;
  s.tau = cfg.C * std::pow(base, expo);
  s.mesh = std::min(cfg.C_pi * std::sqrt(s.tau), g.T / 2.0);
  int cells = static_cast<int>(std::ceil(g.T / s.mesh * (1.0 - 1e-12)));
  cells = std::clamp(cells, 1, g.n);
  while (g.n % cells) ++cells;
  s.cells = cells;
  return s;
}

double estimate_lambda(const ObservationSet& obs) {
  return -obs.mean_price_residual()[0] / obs.strategy().values[0];
}

Mat design_matrix(const DiscreteFn& ue, int cells) {
  const Grid& g = ue.grid;
  const int n = g.n;
  if (cells < 1 || n % cells) throw std::invalid_argument("design_matrix: cells must divide n");
  const int w = n / cells;
  Vec P(n + 1);  // prefix sums of u^e
  P[0] = 0.0;
  for (int l = 0; l < n; ++l) P[l + 1] = P[l] + ue.values[l];
  Mat Phi = Mat::Zero(n, cells);
  for (int c = 0; c < cells; ++c) {
    const int a = c * w, b = a + w;
    for (int i = a + 1; i < n; ++i) {
      // h sum_{m=a}^{min(b,i)-1} u^e_{i-1-m}
      const int top = std::min(b, i);
      Phi(i, c) = g.h * (P[i - a] - P[i - top]);
    }
  }
  return Phi;
}

KernelEstimate estimate_kernel(const ObservationSet& obs, double lambda, double tau, int cells) {
  if (!(tau > 0.0)) throw std::invalid_argument("estimate_kernel: tau must be positive");
  const Grid& g = obs.grid();
  const Vec y = obs.mean_price_residual() + lambda * obs.strategy().values;
  const Mat Phi = design_matrix(obs.strategy(), cells);
  const double width = g.T / cells;
  Mat N = g.h * (Phi.transpose() * Phi);
  N.diagonal().array() += tau * width;
  const Vec rhs = -g.h * (Phi.transpose() * y);
  Eigen::LLT<Mat> llt(N);
  if (llt.info() != Eigen::Success) throw std::logic_error("estimate_kernel: normal matrix not positive definite");
  KernelEstimate est;
  est.lambda = lambda;
  est.g_cells = llt.solve(rhs);
  est.N = obs.size();
  est.tau = tau;
  est.cells = cells;
  Vec G(g.n);
  const int w = g.n / cells;
  for (int i = 0; i < g.n; ++i) G[i] = est.g_cells[i / w];
  est.G = DiscreteFn(g, G);
  return est;
}

LseResult lse(const ObservationSet& obs, const EstimatorConfig& cfg, const AdmissibleSet& set) {
  LseResult r;
  r.sched = schedule(std::max(obs.size(), 2), cfg, obs.grid());
  r.estimate = estimate_kernel(obs, estimate_lambda(obs), r.sched.tau, r.sched.cells);
  r.admissible = is_admissible(r.estimate.theta(), set);
  return r;
}

DistanceFunction::DistanceFunction(const DiscreteFn& G_star, const DiscreteFn& ue) : h_(G_star.grid.h) {
  if (G_star.grid != ue.grid) throw std::invalid_argument("DistanceFunction: grid mismatch");
  // (u^e)^* in matrix form is (h K)^T under the h-weighted inner product
  const Mat A = h_ * galerkin_conv_operator(ue).K.transpose();
  Eigen::BDCSVD<Mat> svd(A, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > s[0] * 1e-14) ++r;
  sigma_ = s.head(r);
  coef_ = svd.matrixU().leftCols(r).transpose() * G_star.values;
  floor_ = std::sqrt(h_ * std::max(0.0, G_star.values.squaredNorm() - coef_.squaredNorm()));
}

double DistanceFunction::norm_v(double mu) const {
  return (sigma_.array() * coef_.array() / (sigma_.array().square() + mu)).matrix().norm();
}

double DistanceFunction::saturation_radius() const { return std::sqrt(h_) * norm_v(0.0); }

double DistanceFunction::operator()(double R) const {
  if (!(R > 0.0)) throw std::invalid_argument("distance_function: R must be positive");
  const double target = R / std::sqrt(h_);
  if (norm_v(0.0) <= target) return floor_;
  auto f = [&](double log_mu) { return norm_v(std::exp(log_mu)) - target; };
  double lo = -700.0, hi = 700.0;
  if (!(f(lo) > 0.0 && f(hi) < 0.0)) throw std::logic_error("distance_function: Lagrange bracket failed");
  const auto root = boost::math::tools::bisect(f, lo, hi, boost::math::tools::eps_tolerance<double>(50));
  const double mu = std::exp(0.5 * (root.first + root.second));
  const double res2 = (mu / (sigma_.array().square() + mu) * coef_.array()).matrix().squaredNorm();
  return std::sqrt(h_ * res2 + floor_ * floor_);
}

double distance_function(const DiscreteFn& G_star, const DiscreteFn& ue, double R) {
  return DistanceFunction(G_star, ue)(R);
}

}  // namespace liq
