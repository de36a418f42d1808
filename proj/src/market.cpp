#include "liquidate/market.hpp"

#include <cmath>
#include <ostream>

#include "liquidate/csv.hpp"

namespace liq {

Rng substream(std::uint64_t master_seed, std::uint64_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index),       static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream),      static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

double SignalModel::cond_mean(double x, double t, double r) const { return x * std::exp(-beta * (r - t)); }

Vec standard_normals(Rng& rng, int count) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec xi(count);
  for (int i = 0; i < count; ++i) xi[i] = nd(rng);
  return xi;
}

SignalPath signal_from_normals(const SignalModel& model, const Grid& g, const Vec& xi) {
  if (xi.size() != g.n + 1) throw std::invalid_argument("signal_from_normals: need n + 1 normals");
  const double decay = std::exp(-model.beta * g.h);
  // sqrt((1 - e^{-2 beta h}) / (2 beta)), with the Brownian limit at beta = 0
  const double vol =
      model.beta > 0.0 ? model.sigma_I * std::sqrt(-std::expm1(-2.0 * model.beta * g.h) / (2.0 * model.beta))
                       : model.sigma_I * std::sqrt(g.h);
  SignalPath p{Vec(g.n + 1), Vec(g.n + 1)};
  p.I[0] = model.I0_mean + model.I0_std * xi[0];
  p.A[0] = 0.0;
  for (int i = 0; i < g.n; ++i) {
    p.I[i + 1] = p.I[i] * decay + vol * xi[i + 1];
    p.A[i + 1] = p.A[i] + g.h * p.I[i];
  }
  return p;
}

SignalPath simulate_signal(const SignalModel& model, const Grid& g, Rng& rng) {
  return signal_from_normals(model, g, standard_normals(rng, g.n + 1));
}

NoisePath noise_from_normals(const NoiseModel& model, const Grid& g, const Vec& xi) {
  if (xi.size() != g.n + 1) throw std::invalid_argument("noise_from_normals: need n + 1 normals");
  NoisePath p{Vec(g.n + 1)};
  const double step = model.sigma_M * std::sqrt(g.h);
  p.M[0] = model.sigma_0 * xi[0];
  for (int i = 0; i < g.n; ++i) p.M[i + 1] = p.M[i] + step * xi[i + 1];
  return p;
}

NoisePath simulate_noise(const NoiseModel& model, const Grid& g, Rng& rng) {
  return noise_from_normals(model, g, standard_normals(rng, g.n + 1));
}

Policy constant_policy(double rate) {
  return [rate](const PolicyInput&) { return rate; };
}

Policy open_loop_policy(const Vec& u) {
  return [u](const PolicyInput& in) { return u[in.i]; };
}

Vec transient_impact(const Vec& g, const Vec& u, double h) {
  const Eigen::Index n = u.size();
  Vec Z = Vec::Zero(n);
  for (Eigen::Index i = 1; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) acc += g[i - 1 - j] * u[j];
    Z[i] = h * acc;
  }
  return Z;
}

namespace {

// h sum_{i>k} g_{i-1-k} u_i
Vec transient_impact_adjoint(const Vec& g, const Vec& u, double h) {
  const Eigen::Index n = u.size();
  Vec Z = Vec::Zero(n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    double acc = 0.0;
    for (Eigen::Index i = k + 1; i < n; ++i) acc += g[i - 1 - k] * u[i];
    Z[k] = h * acc;
  }
  return Z;
}

PolicyInput view(const Grid& g, int i, const SignalPath& s, const Vec& u) {
  return PolicyInput{&g, i, std::span<const double>(s.I.data(), i + 1), std::span<const double>(s.A.data(), i + 1),
                     std::span<const double>(u.data(), i)};
}

}  // namespace

Vec inventory_path(const Vec& u, double q, double h) {
  Vec Q(u.size() + 1);
  Q[0] = q;
  for (Eigen::Index i = 0; i < u.size(); ++i) Q[i + 1] = Q[i] - h * u[i];
  return Q;
}

Vec rollout_control(const Policy& policy, const SignalPath& signal, const Grid& g) {
  Vec u = Vec::Zero(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double ui = policy(view(g, i, signal, u));
    if (!std::isfinite(ui)) throw NumericalError("policy returned a non-finite control at node " + std::to_string(i));
    u[i] = ui;
  }
  return u;
}

EpisodeData simulate_episode(const Theta& theta_star, const Policy& policy, const SignalPath& signal,
                             const NoisePath& noise, const Grid& g, double q) {
  if (theta_star.G.grid != g) throw std::invalid_argument("simulate_episode: kernel grid mismatch");
  if (signal.I.size() != g.n + 1 || noise.M.size() != g.n + 1)
    throw std::invalid_argument("simulate_episode: path length mismatch");
  EpisodeData ep;
  ep.grid = g;
  ep.q = q;
  ep.I = signal.I;
  ep.A = signal.A;
  ep.M = noise.M;
  ep.u = rollout_control(policy, signal, g);
  ep.Q = inventory_path(ep.u, q, g.h);
  const Vec Z = transient_impact(theta_star.G.values, ep.u, g.h);
  ep.S = ep.A.head(g.n) + ep.M.head(g.n) - theta_star.lambda * ep.u - Z;
  return ep;
}

double pathwise_revenue(const EpisodeData& ep, const CostParams& cost) {
  const Grid& g = ep.grid;
  const double PT = ep.A[g.n] + ep.M[g.n];
  const double QT = ep.Q[g.n];
  return g.h * ep.S.dot(ep.u) + QT * PT - cost.phi * g.h * ep.Q.head(g.n).squaredNorm() - cost.rho * QT * QT;
}

double revenue_of_control(const Theta& theta_star, const CostParams& cost, const SignalPath& signal,
                          const NoisePath& noise, const Vec& u) {
  const Grid& g = theta_star.G.grid;
  return pathwise_revenue(simulate_episode(theta_star, open_loop_policy(u), signal, noise, g, cost.q), cost);
}

double exact_gap(const Vec& u, const Vec& u_ref, const Theta& theta_star, const CostParams& cost) {
  const double h = theta_star.G.grid.h;
  const Vec d = u - u_ref;
  const Vec Zd = transient_impact(theta_star.G.values, d, h);
  const Vec dQ = inventory_path(d, 0.0, h);
  const Eigen::Index n = d.size();
  return h * Zd.dot(d) + theta_star.lambda * h * d.squaredNorm() + cost.phi * h * dQ.head(n).squaredNorm() +
         cost.rho * dQ[n] * dQ[n];
}

Vec revenue_gradient(const Theta& theta_star, const CostParams& cost, const SignalPath& signal,
                     const NoisePath& noise, const Vec& u) {
  const Grid& g = theta_star.G.grid;
  const int n = g.n;
  const double h = g.h;
  const Vec& G = theta_star.G.values;
  const Vec Z = transient_impact(G, u, h);
  const Vec Zs = transient_impact_adjoint(G, u, h);
  const Vec Q = inventory_path(u, cost.q, h);
  const double PT = signal.A[n] + noise.M[n];
  Vec grad(n);
  double tailQ = 0.0;  // h sum_{k<i<n} Q_i
  for (int k = n - 1; k >= 0; --k) {
    const double P = signal.A[k] + noise.M[k];
    grad[k] = (P - PT) - 2.0 * theta_star.lambda * u[k] - Z[k] - Zs[k] + 2.0 * cost.phi * tailQ +
              2.0 * cost.rho * Q[n];
    tailQ += h * Q[k];
  }
  return grad;
}

GateauxResult gateaux_check(const Policy& policy, const Theta& theta_star, const CostParams& cost,
                            const std::vector<SignalPath>& signals, const std::vector<NoisePath>& noises,
                            const std::vector<DirectionFn>& directions) {
  if (signals.size() != noises.size() || signals.size() < 2)
    throw std::invalid_argument("gateaux_check: need matching ensembles of at least two paths");
  const Grid& g = theta_star.G.grid;
  const std::size_t K = directions.size();
  std::vector<double> sum(K, 0.0), sumsq(K, 0.0), norm2(K, 0.0);
  for (std::size_t p = 0; p < signals.size(); ++p) {
    const Vec u = rollout_control(policy, signals[p], g);
    const Vec grad = revenue_gradient(theta_star, cost, signals[p], noises[p], u);
    for (std::size_t k = 0; k < K; ++k) {
      const Vec a = directions[k](signals[p]);
      const double x = g.h * grad.dot(a);
      sum[k] += x;
      sumsq[k] += x * x;
      norm2[k] += g.h * a.squaredNorm();
    }
  }
  const double P = static_cast<double>(signals.size());
  GateauxResult r;
  for (std::size_t k = 0; k < K; ++k) {
    const double mean = sum[k] / P;
    const double var = std::max(0.0, (sumsq[k] - P * mean * mean) / (P - 1.0));
    const double scale = std::sqrt(norm2[k] / P);
    r.normalized.push_back(mean / scale);
    r.std_error.push_back(std::sqrt(var / P) / scale);
    r.statistic = std::max(r.statistic, std::abs(mean) / scale);
  }
  return r;
}

std::vector<double> finite_difference_check(const Policy& policy, const Theta& theta_star, const CostParams& cost,
                                            const std::vector<SignalPath>& signals,
                                            const std::vector<NoisePath>& noises,
                                            const std::vector<DirectionFn>& directions, double eps) {
  const Grid& g = theta_star.G.grid;
  const std::size_t K = directions.size();
  std::vector<double> sum(K, 0.0), norm2(K, 0.0);
  for (std::size_t p = 0; p < signals.size(); ++p) {
    const Vec u = rollout_control(policy, signals[p], g);
    for (std::size_t k = 0; k < K; ++k) {
      const Vec a = directions[k](signals[p]);
      const double up = revenue_of_control(theta_star, cost, signals[p], noises[p], u + eps * a);
      const double dn = revenue_of_control(theta_star, cost, signals[p], noises[p], u - eps * a);
      sum[k] += (up - dn) / (2.0 * eps);
      norm2[k] += g.h * a.squaredNorm();
    }
  }
  const double P = static_cast<double>(signals.size());
  std::vector<double> out(K);
  for (std::size_t k = 0; k < K; ++k) out[k] = (sum[k] / P) / std::sqrt(norm2[k] / P);
  return out;
}

void write_episode_csv(std::ostream& os, const EpisodeData& ep) {
  CsvTable t;
  t.header = {"t", "I", "A", "M", "u", "Q", "S"};
  const Grid& g = ep.grid;
  for (int i = 0; i <= g.n; ++i) {
    const bool last = i == g.n;
    t.add_row({format_number(last ? g.T : g.node(i)), format_number(ep.I[i]), format_number(ep.A[i]),
               format_number(ep.M[i]), last ? "" : format_number(ep.u[i]), format_number(ep.Q[i]),
               last ? "" : format_number(ep.S[i])});
  }
  t.write(os);
}

}  // namespace liq
