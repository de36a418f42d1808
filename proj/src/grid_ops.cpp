#include "liquidate/grid_ops.hpp"

#include <cmath>

namespace liq {

Vec Grid::nodes() const {
  Vec t(n);
  for (int i = 0; i < n; ++i) t[i] = node(i);
  return t;
}

Grid make_grid(double T, int n) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("make_grid: T must be positive");
  if (n < 2) throw std::invalid_argument("make_grid: n must be at least 2");
  return Grid{T, n, T / n};
}

DiscreteFn::DiscreteFn(const Grid& g, Vec v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.n) throw std::invalid_argument("DiscreteFn: length does not match grid");
}

DiscreteFn DiscreteFn::constant(const Grid& g, double c) { return DiscreteFn(g, Vec::Constant(g.n, c)); }

DiscreteFn DiscreteFn::sample(const Grid& g, const std::function<double(double)>& f) {
  Vec v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = f(g.node(i));
  return DiscreteFn(g, std::move(v));
}

double DiscreteFn::norm() const { return l2_norm(values, grid.h); }

double inner(const Vec& f, const Vec& g, double h) { return h * f.dot(g); }

double inner(const DiscreteFn& f, const DiscreteFn& g) {
  if (f.grid != g.grid) throw std::invalid_argument("inner: grid mismatch");
  return inner(f.values, g.values, f.grid.h);
}

double l2_norm(const Vec& f, double h) { return std::sqrt(h * f.squaredNorm()); }

DiscreteOperator::DiscreteOperator(const Grid& g, double scalar, Mat kernel)
    : grid(g), c(scalar), K(std::move(kernel)) {
  if (K.rows() != g.n || K.cols() != g.n) throw std::invalid_argument("DiscreteOperator: kernel shape");
}

DiscreteOperator DiscreteOperator::identity(const Grid& g, double scale) {
  return DiscreteOperator(g, scale, Mat::Zero(g.n, g.n));
}

DiscreteOperator DiscreteOperator::zero(const Grid& g) { return identity(g, 0.0); }

Vec DiscreteOperator::apply(const Vec& f) const {
  if (f.size() != grid.n) throw std::invalid_argument("apply: length mismatch");
  Vec out = grid.h * (K * f);
  if (c != 0.0) out += c * f;
  return out;
}

DiscreteFn DiscreteOperator::apply(const DiscreteFn& f) const {
  if (f.grid != grid) throw std::invalid_argument("apply: grid mismatch");
  return DiscreteFn(grid, apply(f.values));
}

Mat DiscreteOperator::dense() const {
  Mat m = grid.h * K;
  m.diagonal().array() += c;
  return m;
}

std::pair<Vec, Vec> BlockOperator2::apply(const Vec& f1, const Vec& f2) const {
  return {a11.apply(f1) + a12.apply(f2), a21.apply(f1) + a22.apply(f2)};
}

DiscreteOperator conv_operator(const std::function<double(double)>& u, const Grid& g) {
  Vec w(g.n);
  for (int d = 0; d < g.n; ++d) w[d] = u(g.node(d));
  return conv_operator(DiscreteFn(g, w));
}

DiscreteOperator conv_operator(const DiscreteFn& u) {
  const int n = u.grid.n;
  Mat K = Mat::Zero(n, n);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) K(i, j) = u.values[i - j];
  return DiscreteOperator(u.grid, 0.0, std::move(K));
}

DiscreteOperator cell_conv_operator(const DiscreteFn& u) {
  const int n = u.grid.n;
  Mat K = Mat::Zero(n, n);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) K(i, j) = u.values[i - 1 - j];
  return DiscreteOperator(u.grid, 0.0, std::move(K));
}

DiscreteOperator galerkin_conv_operator(const DiscreteFn& u) {
  const int n = u.grid.n;
  const Vec& w = u.values;
  Mat K = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = 0.5 * w[0];
    for (int j = 0; j < i; ++j) K(i, j) = 0.5 * (w[i - j - 1] + w[i - j]);
  }
  return DiscreteOperator(u.grid, 0.0, std::move(K));
}

DiscreteOperator adjoint(const DiscreteOperator& op) { return DiscreteOperator(op.grid, op.c, op.K.transpose()); }

DiscreteOperator compose(const DiscreteOperator& a, const DiscreteOperator& b) {
  if (a.grid != b.grid) throw std::invalid_argument("compose: grid mismatch");
  Mat K = a.grid.h * (a.K * b.K);
  if (a.c != 0.0) K += a.c * b.K;
  if (b.c != 0.0) K += b.c * a.K;
  return DiscreteOperator(a.grid, a.c * b.c, std::move(K));
}

DiscreteOperator operator+(const DiscreteOperator& a, const DiscreteOperator& b) {
  if (a.grid != b.grid) throw std::invalid_argument("operator+: grid mismatch");
  return DiscreteOperator(a.grid, a.c + b.c, a.K + b.K);
}

DiscreteOperator operator*(double s, const DiscreteOperator& a) { return DiscreteOperator(a.grid, s * a.c, s * a.K); }

namespace {

bool is_lower_triangular(const Mat& K) {
  for (Eigen::Index j = 1; j < K.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i)
      if (K(i, j) != 0.0) return false;
  return true;
}

}  // namespace

Vec solve(const DiscreteOperator& op, const Vec& rhs) {
  if (rhs.size() != op.grid.n) throw std::invalid_argument("solve: length mismatch");
  const Mat A = op.dense();
  Vec x;
  if (is_lower_triangular(op.K)) {
    if ((A.diagonal().array() == 0.0).any()) throw NumericalError("solve: zero pivot in triangular system");
    x = A.triangularView<Eigen::Lower>().solve(rhs);
  } else {
    Eigen::PartialPivLU<Mat> lu(A);
    if (!(lu.rcond() > 1e-14)) throw NumericalError("solve: operator is numerically singular");
    x = lu.solve(rhs);
  }
  const double scale = std::max(rhs.norm(), 1e-300);
  if (!x.allFinite() || (A * x - rhs).norm() > 1e-10 * scale)
    throw NumericalError("solve: residual check failed");
  return x;
}

DiscreteFn solve(const DiscreteOperator& op, const DiscreteFn& rhs) {
  if (rhs.grid != op.grid) throw std::invalid_argument("solve: grid mismatch");
  return DiscreteFn(op.grid, solve(op, rhs.values));
}

SingularSystem svd_kernel(const DiscreteOperator& op) {
  if (op.c != 0.0) throw std::invalid_argument("svd_kernel: operator must be a pure integral operator");
  const double h = op.grid.h;
  SingularSystem out;
  if (op.K.isZero(0.0)) {
    out.sigma = Vec(0);
    out.left = Mat(op.grid.n, 0);
    out.right = Mat(op.grid.n, 0);
    return out;
  }
  Eigen::BDCSVD<Mat> svd(h * op.K, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const double cut = s[0] * 1e-300;
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > cut) ++r;
  const double inv_sqrt_h = 1.0 / std::sqrt(h);
  out.sigma = s.head(r);
  out.left = svd.matrixU().leftCols(r) * inv_sqrt_h;
  out.right = svd.matrixV().leftCols(r) * inv_sqrt_h;
  return out;
}

}  // namespace liq
