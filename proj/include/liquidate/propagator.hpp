#pragma once

#include <string>
#include <variant>

#include "liquidate/grid_ops.hpp"

namespace liq {

struct Exponential {
  double beta = 1.0;
  double scale = 1.0;
};
struct TruncatedPowerLaw {
  double c0 = 1.0;
  double beta = 0.5;
};
struct PowerLaw {
  double alpha = 0.25;
};
struct Constant {
  double c = 0.0;
};
/// Piecewise constant on a uniform partition of [0, T] into values.size() cells.
struct Tabulated {
  double T = 1.0;
  Vec values;
};

using KernelSpec = std::variant<Exponential, TruncatedPowerLaw, PowerLaw, Constant, Tabulated>;

void validate(const KernelSpec& spec);
std::string kernel_name(const KernelSpec& spec);

/// Parameter pair (lambda, G) with G held as cell averages on a grid.
struct Theta {
  double lambda = 1.0;
  DiscreteFn G;
};

Theta make_theta(double lambda, const KernelSpec& spec, const Grid& g);

struct AdmissibleSet {
  double L = 10.0;
  double eps = 0.01;
};

/// Pointwise value. PowerLaw at t = 0 throws NumericalError.
double eval_kernel(const KernelSpec& spec, double t);

/// Exact cell averages (1/h) * int_{t_i}^{t_{i+1}} G(s) ds.
DiscreteFn cell_averaged_values(const KernelSpec& spec, const Grid& g);

/// Closed-form ||G||_{L^2[0,T]}; NaN where no closed form is implemented.
double analytic_l2_norm(const KernelSpec& spec, double T);

/// Minimum Rayleigh quotient of f -> int int G(|t-s|) f(s) f(t) ds dt over
/// piecewise-constant f, with C_ij = G_{|i-j|} taken from cell averages.
double min_convolution_eig(const DiscreteFn& G);

bool is_admissible(const Theta& theta, const AdmissibleSet& set);

}  // namespace liq
