#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace liq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when a factorization or solve fails its numerical checks.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Uniform mesh on [0,T] with n cells; node i is the left endpoint i*h.
struct Grid {
  double T = 1.0;
  int n = 2;
  double h = 0.5;

  double node(int i) const { return i * h; }
  Vec nodes() const;
  bool operator==(const Grid& o) const { return n == o.n && T == o.T; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

Grid make_grid(double T, int n);

/// Piecewise-constant function: values[i] lives on [t_i, t_{i+1}).
struct DiscreteFn {
  Grid grid;
  Vec values;

  DiscreteFn() = default;
  DiscreteFn(const Grid& g, Vec v);
  static DiscreteFn constant(const Grid& g, double c);
  static DiscreteFn sample(const Grid& g, const std::function<double(double)>& f);

  double norm() const;
};

/// h-weighted inner product.
double inner(const Vec& f, const Vec& g, double h);
double inner(const DiscreteFn& f, const DiscreteFn& g);
double l2_norm(const Vec& f, double h);

/// (O f)_i = c f_i + h sum_j K_ij f_j
struct DiscreteOperator {
  Grid grid;
  double c = 0.0;
  Mat K;

  DiscreteOperator() = default;
  DiscreteOperator(const Grid& g, double scalar, Mat kernel);
  static DiscreteOperator identity(const Grid& g, double scale = 1.0);
  static DiscreteOperator zero(const Grid& g);

  Vec apply(const Vec& f) const;
  DiscreteFn apply(const DiscreteFn& f) const;
  /// Dense matrix c*I + h*K.
  Mat dense() const;
};

/// 2x2 block of operators acting on pairs (f1, f2).
struct BlockOperator2 {
  DiscreteOperator a11, a12, a21, a22;

  std::pair<Vec, Vec> apply(const Vec& f1, const Vec& f2) const;
};

struct SingularSystem {
  Vec sigma;  // nonincreasing
  Mat left;   // columns orthonormal under the h-weighted inner product
  Mat right;
};

/// Causal convolution with pointwise samples: K_ij = u(t_i - t_j) for j < i.
DiscreteOperator conv_operator(const std::function<double(double)>& u, const Grid& g);
DiscreteOperator conv_operator(const DiscreteFn& u);

/// Causal convolution that is exact on piecewise-constant inputs when u is
/// given by its cell averages: K_ij = u_{i-1-j} for j < i.
DiscreteOperator cell_conv_operator(const DiscreteFn& u);

/// Cell-averaged (Galerkin) projection of the convolution with a
/// piecewise-constant u: K_ij = (u_{d-1} + u_d)/2 for d = i-j >= 1, u_0/2 on
/// the diagonal.
DiscreteOperator galerkin_conv_operator(const DiscreteFn& u);

DiscreteOperator adjoint(const DiscreteOperator& op);
DiscreteOperator compose(const DiscreteOperator& a, const DiscreteOperator& b);
DiscreteOperator operator+(const DiscreteOperator& a, const DiscreteOperator& b);
DiscreteOperator operator*(double s, const DiscreteOperator& a);

/// Solve op x = rhs. Throws NumericalError if the residual exceeds 1e-10
/// relative or LU detects rank deficiency.
Vec solve(const DiscreteOperator& op, const Vec& rhs);
DiscreteFn solve(const DiscreteOperator& op, const DiscreteFn& rhs);

SingularSystem svd_kernel(const DiscreteOperator& op);

}  // namespace liq
