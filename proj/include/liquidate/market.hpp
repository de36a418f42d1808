#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "liquidate/grid_ops.hpp"
#include "liquidate/propagator.hpp"

namespace liq {

using Rng = std::mt19937_64;

/// Dedicated generator for one (master seed, stream, index) triple. Streams
/// separate unrelated uses of the same index (training vs. test paths, etc).
Rng substream(std::uint64_t master_seed, std::uint64_t index, std::uint64_t stream = 0);

/// Ornstein-Uhlenbeck signal dI = -beta I dt + sigma_I dW, I_0 ~ N(I0_mean, I0_std^2).
struct SignalModel {
  double beta = 1.0;
  double sigma_I = 0.0;
  double I0_mean = 0.0;
  double I0_std = 0.0;

  /// E[I_r | I_t = x] for r >= t.
  double cond_mean(double x, double t, double r) const;
  bool is_zero() const { return sigma_I == 0.0 && I0_mean == 0.0 && I0_std == 0.0; }
};

/// M_t = M_0 + sigma_M W_t, M_0 ~ N(0, sigma_0^2).
struct NoiseModel {
  double sigma_M = 0.0;
  double sigma_0 = 0.1;
};

struct CostParams {
  double phi = 0.0;  // running inventory penalty
  double rho = 0.0;  // terminal inventory penalty
  double q = 1.0;    // initial inventory
};

/// I and A sampled at nodes 0..n (index n is the horizon), so A_T = A[n].
struct SignalPath {
  Vec I;
  Vec A;
};

/// M at nodes 0..n.
struct NoisePath {
  Vec M;
};

/// Standard normals consumed by one signal path (n + 1) or one noise path (n + 1).
Vec standard_normals(Rng& rng, int count);

SignalPath simulate_signal(const SignalModel& model, const Grid& g, Rng& rng);
SignalPath signal_from_normals(const SignalModel& model, const Grid& g, const Vec& xi);
NoisePath simulate_noise(const NoiseModel& model, const Grid& g, Rng& rng);
NoisePath noise_from_normals(const NoiseModel& model, const Grid& g, const Vec& xi);

/// What a policy may see at node i: signal up to and including t_i and its own
/// past controls. Nothing later is reachable through this view.
struct PolicyInput {
  const Grid* grid;
  int i;
  std::span<const double> I;       // I_0..I_i
  std::span<const double> A;       // A_0..A_i
  std::span<const double> u_past;  // u_0..u_{i-1}
};

using Policy = std::function<double(const PolicyInput&)>;

Policy constant_policy(double rate);
Policy open_loop_policy(const Vec& u);

struct EpisodeData {
  Grid grid;
  double q = 0.0;
  Vec I, A, M;  // length n + 1
  Vec u;        // length n
  Vec Q;        // length n + 1
  Vec S;        // length n
};

/// Runs the policy node by node and records the observed price
/// S_i = A_i + M_i - lambda u_i - h sum_{j<i} g_{i-1-j} u_j.
EpisodeData simulate_episode(const Theta& theta_star, const Policy& policy, const SignalPath& signal,
                             const NoisePath& noise, const Grid& g, double q);

/// Executed-control rollout without prices (the policy only sees the signal).
Vec rollout_control(const Policy& policy, const SignalPath& signal, const Grid& g);

/// Z_i = h sum_{j<i} g_{i-1-j} u_j for a cell-averaged kernel g.
Vec transient_impact(const Vec& g, const Vec& u, double h);

Vec inventory_path(const Vec& u, double q, double h);

double pathwise_revenue(const EpisodeData& ep, const CostParams& cost);

/// Revenue of a fixed control vector on one realized path.
double revenue_of_control(const Theta& theta_star, const CostParams& cost, const SignalPath& signal,
                          const NoisePath& noise, const Vec& u);

/// <Z^d, d> + lambda ||d||^2 + phi ||Q^u - Q^ref||^2 + rho (Q^u_T - Q^ref_T)^2, d = u - u_ref.
double exact_gap(const Vec& u, const Vec& u_ref, const Theta& theta_star, const CostParams& cost);

/// Pathwise derivative of the revenue along the cell basis, divided by h,
/// so that the directional derivative along alpha is h * grad.dot(alpha).
Vec revenue_gradient(const Theta& theta_star, const CostParams& cost, const SignalPath& signal,
                     const NoisePath& noise, const Vec& u);

using DirectionFn = std::function<Vec(const SignalPath&)>;

struct GateauxResult {
  double statistic = 0.0;          // max_k |mean_k| / ||alpha_k||
  std::vector<double> normalized;  // per direction, mean / ||alpha||
  std::vector<double> std_error;   // per direction, standard error / ||alpha||
};

/// Monte-Carlo estimate of <J'(u), alpha> for each direction, where u is the
/// control produced by the policy on each path of the ensemble.
GateauxResult gateaux_check(const Policy& policy, const Theta& theta_star, const CostParams& cost,
                            const std::vector<SignalPath>& signals, const std::vector<NoisePath>& noises,
                            const std::vector<DirectionFn>& directions);

/// Central finite difference (J(u + eps alpha) - J(u - eps alpha)) / (2 eps)
/// on the same ensemble, normalized like gateaux_check.
std::vector<double> finite_difference_check(const Policy& policy, const Theta& theta_star, const CostParams& cost,
                                            const std::vector<SignalPath>& signals,
                                            const std::vector<NoisePath>& noises,
                                            const std::vector<DirectionFn>& directions, double eps);

void write_episode_csv(std::ostream& os, const EpisodeData& ep);

}  // namespace liq
