#pragma once

#include "liquidate/grid_ops.hpp"
#include "liquidate/propagator.hpp"

namespace liq {

enum class KernelType { Regular, Singular };

struct EstimatorConfig {
  KernelType type = KernelType::Regular;
  double alpha = 0.25;  // singular exponent, used when type == Singular
  double eta = 0.1;
  double C = 1.0;
  double C_pi = 1.0;
};

/// Exploration data under a fixed strategy u^e. Only the sufficient
/// statistics are kept: the episode count and the running sum of S - A.
class ObservationSet {
 public:
  explicit ObservationSet(DiscreteFn ue);

  void add(const Vec& S, const Vec& A);
  int size() const { return count_; }
  const DiscreteFn& strategy() const { return ue_; }
  const Grid& grid() const { return ue_.grid; }
  /// (1/N) sum_m (S^m - A^m) on the simulation grid.
  Vec mean_price_residual() const;

 private:
  DiscreteFn ue_;
  Vec sum_;
  int count_ = 0;
};

struct Schedule {
  double tau = 0.0;
  double mesh = 0.0;  // requested cell width min(C_pi sqrt(tau), T/2)
  int cells = 0;      // ceil(T / mesh), raised to a divisor of n
};

Schedule schedule(int N, const EstimatorConfig& cfg, const Grid& g);

struct KernelEstimate {
  double lambda = 0.0;
  Vec g_cells;  // values on the estimation partition
  DiscreteFn G; // injection onto the simulation grid
  int N = 0;
  double tau = 0.0;
  int cells = 0;

  Theta theta() const { return Theta{lambda, G}; }
};

double estimate_lambda(const ObservationSet& obs);

/// Cell-indicator design: column c is u^e convolved with 1_{cell c}.
Mat design_matrix(const DiscreteFn& ue, int cells);

KernelEstimate estimate_kernel(const ObservationSet& obs, double lambda, double tau, int cells);

struct LseResult {
  KernelEstimate estimate;
  Schedule sched;
  bool admissible = false;
};

LseResult lse(const ObservationSet& obs, const EstimatorConfig& cfg, const AdmissibleSet& set);

/// 𝒟(R) = inf { ||G - (u^e)^* v|| : ||v|| <= R } with u^e discretized by its
/// cell-averaged projection, evaluated through one SVD.
class DistanceFunction {
 public:
  DistanceFunction(const DiscreteFn& G_star, const DiscreteFn& ue);

  double operator()(double R) const;
  /// Norm of the unconstrained minimizer; 𝒟 reaches its floor at this radius.
  double saturation_radius() const;
  double floor() const { return floor_; }

 private:
  double norm_v(double mu) const;  // Euclidean, unscaled
  double h_;
  Vec sigma_;
  Vec coef_;
  double floor_ = 0.0;
};

double distance_function(const DiscreteFn& G_star, const DiscreteFn& ue, double R);

}  // namespace liq
