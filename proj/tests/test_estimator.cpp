#include <cmath>

#include "doctest.h"
#include "liquidate/estimator.hpp"
#include "liquidate/market.hpp"

using namespace liq;

namespace {

ObservationSet noiseless(const Theta& th, double ue, int N, std::uint64_t seed = 1) {
  const Grid& g = th.G.grid;
  ObservationSet obs(DiscreteFn::constant(g, ue));
  const NoisePath none{Vec::Zero(g.n + 1)};
  for (int m = 0; m < N; ++m) {
    Rng rng = substream(seed, m);
    const SignalPath sig = simulate_signal(SignalModel{1.0, 0.5, 0.2, 0.3}, g, rng);
    const EpisodeData ep = simulate_episode(th, constant_policy(ue), sig, none, g, 1.0);
    obs.add(ep.S, ep.A);
  }
  return obs;
}

}  // namespace

TEST_CASE("temporary impact estimate") {
  const Grid g = make_grid(1.0, 64);
  const Theta th = make_theta(2.0, Exponential{1.0, 1.0}, g);
  for (int N : {1, 5, 40}) CHECK(estimate_lambda(noiseless(th, 1.0, N)) == 2.0);

  const Theta one = make_theta(1.0, Exponential{1.0, 1.0}, g);
  ObservationSet obs(DiscreteFn::constant(g, 1.0));
  NoisePath noise{Vec::Constant(g.n + 1, 0.5)};
  const SignalPath flat{Vec::Zero(g.n + 1), Vec::Zero(g.n + 1)};
  const EpisodeData ep = simulate_episode(one, constant_policy(1.0), flat, noise, g, 1.0);
  obs.add(ep.S, ep.A);
  CHECK(estimate_lambda(obs) == doctest::Approx(0.5));

  CHECK_THROWS(ObservationSet(DiscreteFn::constant(g, 0.0)));
}

TEST_CASE("regularization schedule") {
  const Grid g = make_grid(1.0, 512);
  EstimatorConfig reg;
  CHECK(schedule(100, reg, g).tau == doctest::Approx(0.6106).epsilon(2e-4));
  EstimatorConfig sing;
  sing.type = KernelType::Singular;
  sing.alpha = 0.25;
  CHECK(schedule(100, sing, g).tau == doctest::Approx(0.5531).epsilon(2e-4));

  double prev = 1e300;
  int prev_cells = 0;
  for (int N = 3; N <= 5000; N += 7) {
    const Schedule s = schedule(N, reg, g);
    CHECK(s.tau < prev);
    CHECK(s.cells >= prev_cells);
    CHECK(g.n % s.cells == 0);
    CHECK(s.mesh <= 0.5);
    prev = s.tau;
    prev_cells = s.cells;
  }
}

TEST_CASE("design matrix columns sum to the full convolution") {
  const Grid g = make_grid(1.0, 32);
  const Mat Phi = design_matrix(DiscreteFn::constant(g, 1.0), 4);
  const Vec total = Phi.rowwise().sum();
  for (int i = 0; i < g.n; ++i) CHECK(total[i] == doctest::Approx(g.node(i)).epsilon(1e-13));
  CHECK_THROWS(design_matrix(DiscreteFn::constant(g, 1.0), 5));
}

TEST_CASE("kernel estimate limits") {
  const Grid g = make_grid(1.0, 64);
  Vec cells(4);
  cells << 1.2, 0.9, 0.5, 0.4;
  const Theta th = make_theta(1.0, Tabulated{1.0, cells}, g);
  const ObservationSet obs = noiseless(th, 1.0, 3);
  const double lam = estimate_lambda(obs);

  const KernelEstimate tight = estimate_kernel(obs, lam, 1e-10, 4);
  CHECK(l2_norm(tight.G.values - th.G.values, g.h) <= 1e-6);
  CHECK(tight.g_cells.size() == 4);

  const KernelEstimate loose = estimate_kernel(obs, lam, 1e6, 4);
  CHECK(loose.G.norm() <= 1e-5);

  // N = 1 with a constant kernel
  const Theta flat = make_theta(1.0, Constant{0.8}, g);
  const ObservationSet one = noiseless(flat, 1.0, 1);
  const KernelEstimate e = estimate_kernel(one, estimate_lambda(one), 1e-4, 1);
  CHECK(estimate_lambda(one) == 1.0);
  CHECK(std::abs(e.g_cells[0] - 0.8) <= 4e-3);
}

TEST_CASE("lse follows the schedule") {
  const Grid g = make_grid(1.0, 64);
  const Theta th = make_theta(1.0, Exponential{1.0, 1.0}, g);
  const EstimatorConfig cfg;
  const LseResult r = lse(noiseless(th, 1.0, 50), cfg, AdmissibleSet{});
  const Schedule s = schedule(50, cfg, g);
  CHECK(r.sched.tau == s.tau);
  CHECK(r.estimate.cells == s.cells);
  CHECK(r.estimate.N == 50);
  CHECK(r.estimate.lambda == 1.0);
}

TEST_CASE("distance function") {
  const Grid g = make_grid(1.0, 128);
  const DiscreteFn ue = DiscreteFn::constant(g, 1.0);
  Rng rng = substream(2, 2);
  const Vec v0 = standard_normals(rng, g.n);
  const DiscreteFn G(g, adjoint(galerkin_conv_operator(ue)).apply(v0));
  const double r0 = l2_norm(v0, g.h);
  CHECK(distance_function(G, ue, 1.01 * r0) <= 1e-8);
  CHECK(distance_function(G, ue, 0.5 * r0) > 1e-3);

  const DistanceFunction D(cell_averaged_values(Exponential{1.0, 1.0}, g), ue);
  CHECK_THROWS(D(0.0));
  double prev = cell_averaged_values(Exponential{1.0, 1.0}, g).norm();
  CHECK(D(1e-9) == doctest::Approx(prev).epsilon(1e-6));
  for (double R : {0.5, 1.0, 5.0, 20.0, 100.0}) {
    CHECK(D(R) <= prev + 1e-15);
    prev = D(R);
  }
}
