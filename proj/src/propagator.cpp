#include "liquidate/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace liq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Antiderivative of G, used for exact cell averages.
double primitive(const KernelSpec& spec, double t) {
  return std::visit(overloaded{
                        [&](const Exponential& k) { return -k.scale * std::exp(-k.beta * t) / k.beta; },
                        [&](const TruncatedPowerLaw& k) {
                          if (k.beta == 1.0) return std::log(k.c0 + t);
                          return std::pow(k.c0 + t, 1.0 - k.beta) / (1.0 - k.beta);
                        },
                        [&](const PowerLaw& k) { return std::pow(t, 1.0 - k.alpha) / (1.0 - k.alpha); },
                        [&](const Constant& k) { return k.c * t; },
                        [&](const Tabulated& k) {
                          const int m = static_cast<int>(k.values.size());
                          const double w = k.T / m;
                          double acc = 0.0;
                          for (int i = 0; i < m; ++i) {
                            const double lo = i * w;
                            if (t <= lo) break;
                            acc += k.values[i] * (std::min(t, lo + w) - lo);
                          }
                          if (t > k.T) acc += k.values[m - 1] * (t - k.T);
                          return acc;
                        },
                    },
                    spec);
}

}  // namespace

void validate(const KernelSpec& spec) {
  std::visit(overloaded{
                 [](const Exponential& k) {
                   if (!(k.beta > 0.0) || !(k.scale > 0.0)) throw std::invalid_argument("Exponential: beta, scale > 0");
                 },
                 [](const TruncatedPowerLaw& k) {
                   if (!(k.c0 > 0.0) || !(k.beta > 0.0)) throw std::invalid_argument("TruncatedPowerLaw: c0, beta > 0");
                 },
                 [](const PowerLaw& k) {
                   if (!(k.alpha > 0.0 && k.alpha < 0.5)) throw std::invalid_argument("PowerLaw: alpha in (0, 1/2)");
                 },
                 [](const Constant& k) {
                   if (!(k.c >= 0.0)) throw std::invalid_argument("Constant: c >= 0");
                 },
                 [](const Tabulated& k) {
                   if (k.values.size() == 0 || !(k.T > 0.0)) throw std::invalid_argument("Tabulated: empty table");
                 },
             },
             spec);
}

std::string kernel_name(const KernelSpec& spec) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Exponential& k) { os << "exponential(beta=" << k.beta << ",c=" << k.scale << ")"; },
                 [&](const TruncatedPowerLaw& k) { os << "truncated_power_law(c0=" << k.c0 << ",beta=" << k.beta << ")"; },
                 [&](const PowerLaw& k) { os << "power_law(alpha=" << k.alpha << ")"; },
                 [&](const Constant& k) { os << "constant(c=" << k.c << ")"; },
                 [&](const Tabulated& k) { os << "tabulated(cells=" << k.values.size() << ")"; },
             },
             spec);
  return os.str();
}

Theta make_theta(double lambda, const KernelSpec& spec, const Grid& g) {
  return Theta{lambda, cell_averaged_values(spec, g)};
}

double eval_kernel(const KernelSpec& spec, double t) {
  if (t < 0.0) throw std::invalid_argument("eval_kernel: negative lag");
  return std::visit(overloaded{
                        [&](const Exponential& k) { return k.scale * std::exp(-k.beta * t); },
                        [&](const TruncatedPowerLaw& k) { return std::pow(k.c0 + t, -k.beta); },
                        [&](const PowerLaw& k) {
                          if (t == 0.0) throw NumericalError("eval_kernel: power law is singular at 0");
                          return std::pow(t, -k.alpha);
                        },
                        [&](const Constant& k) { return k.c; },
                        [&](const Tabulated& k) {
                          const int m = static_cast<int>(k.values.size());
                          const int i = std::min(m - 1, static_cast<int>(std::floor(t / (k.T / m))));
                          return k.values[i];
                        },
                    },
                    spec);
}

DiscreteFn cell_averaged_values(const KernelSpec& spec, const Grid& g) {
  validate(spec);
  Vec v(g.n);
  if (const auto* c = std::get_if<Constant>(&spec)) {
    v.setConstant(c->c);
    return DiscreteFn(g, v);
  }
  double lo = primitive(spec, 0.0);
  for (int i = 0; i < g.n; ++i) {
    const double hi = primitive(spec, (i + 1) * g.h);
    v[i] = (hi - lo) / g.h;
    lo = hi;
  }
  return DiscreteFn(g, v);
}

double analytic_l2_norm(const KernelSpec& spec, double T) {
  return std::visit(overloaded{
                        [&](const Exponential& k) {
                          return std::sqrt(k.scale * k.scale * (1.0 - std::exp(-2.0 * k.beta * T)) / (2.0 * k.beta));
                        },
                        [&](const TruncatedPowerLaw& k) {
                          const double e = 1.0 - 2.0 * k.beta;
                          if (e == 0.0) return std::sqrt(std::log((k.c0 + T) / k.c0));
                          return std::sqrt((std::pow(k.c0 + T, e) - std::pow(k.c0, e)) / e);
                        },
                        [&](const PowerLaw& k) {
                          return std::sqrt(std::pow(T, 1.0 - 2.0 * k.alpha) / (1.0 - 2.0 * k.alpha));
                        },
                        [&](const Constant& k) { return k.c * std::sqrt(T); },
                        [&](const Tabulated&) { return std::numeric_limits<double>::quiet_NaN(); },
                    },
                    spec);
}

double min_convolution_eig(const DiscreteFn& G) {
  const int n = G.grid.n;
  Mat C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) C(i, j) = G.values[std::abs(i - j)];
  Eigen::SelfAdjointEigenSolver<Mat> es(C, Eigen::EigenvaluesOnly);
  return G.grid.h * es.eigenvalues()[0];
}

bool is_admissible(const Theta& theta, const AdmissibleSet& set) {
  if (!(theta.lambda >= 1.0 / set.L && theta.lambda <= set.L)) return false;
  if (!(theta.G.norm() <= set.L)) return false;
  return min_convolution_eig(theta.G) >= -set.eps;
}

}  // namespace liq
