#include <cmath>
#include <sstream>

#include "doctest.h"
#include "liquidate/market.hpp"
#include "liquidate/propagator.hpp"

using namespace liq;

namespace {

NoisePath zero_noise(const Grid& g) { return NoisePath{Vec::Zero(g.n + 1)}; }
SignalPath zero_signal(const Grid& g) { return SignalPath{Vec::Zero(g.n + 1), Vec::Zero(g.n + 1)}; }

}  // namespace

TEST_CASE("deterministic signal limit") {
  const Grid g = make_grid(1.0, 256);
  const SignalModel m{2.0, 0.0, 0.7, 0.0};
  Rng rng = substream(3, 0);
  const SignalPath p = simulate_signal(m, g, rng);
  double eI = 0.0, eA = 0.0;
  for (int i = 0; i <= g.n; ++i) {
    const double t = i * g.h;
    eI = std::max(eI, std::abs(p.I[i] - 0.7 * std::exp(-2.0 * t)));
    eA = std::max(eA, std::abs(p.A[i] - 0.7 * (1.0 - std::exp(-2.0 * t)) / 2.0));
  }
  CHECK(eI <= 1e-12);
  CHECK(eA <= 2 * g.h);
}

TEST_CASE("OU marginal variance") {
  const Grid g = make_grid(1.0, 16);
  const SignalModel m{1.5, 0.8, 0.0, 0.3};
  const int paths = 20000;
  double s2 = 0.0;
  for (int k = 0; k < paths; ++k) {
    Rng rng = substream(11, k);
    const double x = simulate_signal(m, g, rng).I[g.n];
    s2 += x * x;
  }
  const double e = std::exp(-1.5);
  const double var = 0.09 * e * e + 0.64 * (1.0 - e * e) / 3.0;
  CHECK(s2 / paths == doctest::Approx(var).epsilon(0.04));
}

TEST_CASE("zero mean reversion falls back to Brownian increments") {
  const Grid g = make_grid(1.0, 64);
  const SignalModel m{0.0, 0.5, 0.0, 0.0};
  Vec xi = Vec::Zero(g.n + 1);
  xi[1] = 1.0;
  const SignalPath p = signal_from_normals(m, g, xi);
  CHECK(p.I[1] == doctest::Approx(0.5 * std::sqrt(g.h)));
  CHECK(p.I[g.n] == doctest::Approx(0.5 * std::sqrt(g.h)));
  CHECK(std::isfinite(p.A[g.n]));
}

TEST_CASE("substreams are reproducible and distinct") {
  Rng a = substream(42, 7), b = substream(42, 7), c = substream(42, 8), d = substream(42, 7, 1);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("observed price") {
  const Grid g = make_grid(1.0, 128);
  Rng rng = substream(5, 1);
  const SignalModel sm{1.0, 0.4, 0.2, 0.1};
  const NoiseModel nm{0.3, 0.1};
  const SignalPath sig = simulate_signal(sm, g, rng);
  const NoisePath noise = simulate_noise(nm, g, rng);

  const Theta th = make_theta(1.3, Exponential{1.0, 1.0}, g);
  const EpisodeData idle = simulate_episode(th, constant_policy(0.0), sig, noise, g, 1.0);
  for (int i = 0; i < g.n; ++i) CHECK(idle.S[i] == sig.A[i] + noise.M[i]);

  const Theta no_kernel{1.3, DiscreteFn::constant(g, 0.0)};
  const EpisodeData flat = simulate_episode(no_kernel, constant_policy(1.0), sig, noise, g, 1.0);
  for (int i = 0; i < g.n; ++i) CHECK(flat.S[i] == doctest::Approx(sig.A[i] + noise.M[i] - 1.3));

  const Theta perm{1.3, DiscreteFn::constant(g, 0.6)};
  const EpisodeData lin = simulate_episode(perm, constant_policy(1.0), zero_signal(g), zero_noise(g), g, 1.0);
  for (int i = 0; i < g.n; ++i) CHECK(std::abs(lin.S[i] - (-1.3 - 0.6 * g.node(i))) <= 2 * g.h);
  CHECK(lin.Q[g.n] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("policies see only the past") {
  const Grid g = make_grid(1.0, 32);
  Rng rng = substream(1, 1);
  const SignalPath sig = simulate_signal(SignalModel{1.0, 0.5, 0.0, 0.2}, g, rng);
  bool ok = true;
  const Policy spy = [&](const PolicyInput& in) {
    ok = ok && static_cast<int>(in.I.size()) == in.i + 1 && static_cast<int>(in.A.size()) == in.i + 1 &&
         static_cast<int>(in.u_past.size()) == in.i && in.I.back() == sig.I[in.i];
    return 0.1 * in.i;
  };
  const Vec u = rollout_control(spy, sig, g);
  CHECK(ok);
  CHECK(u[5] == doctest::Approx(0.5));
  const Policy bad = [](const PolicyInput&) { return std::nan(""); };
  CHECK_THROWS_AS(rollout_control(bad, sig, g), NumericalError);
}

TEST_CASE("revenue and gap") {
  const Grid g = make_grid(1.0, 64);
  Rng rng = substream(9, 2);
  const SignalPath sig = simulate_signal(SignalModel{1.0, 0.5, 0.3, 0.1}, g, rng);
  const NoisePath noise = simulate_noise(NoiseModel{0.2, 0.1}, g, rng);
  const Theta th = make_theta(1.0, Exponential{1.0, 1.0}, g);
  const CostParams cost{0.5, 1.0, 1.0};

  const EpisodeData idle = simulate_episode(th, constant_policy(0.0), sig, noise, g, 1.0);
  const CostParams free{0.0, 0.0, 1.0};
  CHECK(pathwise_revenue(idle, free) == doctest::Approx(sig.A[g.n] + noise.M[g.n]));
  const EpisodeData empty = simulate_episode(th, constant_policy(0.0), sig, noise, g, 0.0);
  CHECK(pathwise_revenue(empty, cost) == 0.0);

  const Vec u = Vec::LinSpaced(g.n, 2.0, 0.0);
  CHECK(exact_gap(u, u, th, cost) == 0.0);
  Rng r2 = substream(9, 3);
  for (int k = 0; k < 5; ++k) CHECK(exact_gap(u + standard_normals(r2, g.n), u, th, cost) > 0.0);

  // revenue is quadratic, so central differences are exact up to rounding
  const Vec grad = revenue_gradient(th, cost, sig, noise, u);
  const Vec dir = standard_normals(r2, g.n);
  const double fd =
      (revenue_of_control(th, cost, sig, noise, u + 1e-3 * dir) - revenue_of_control(th, cost, sig, noise, u - 1e-3 * dir)) /
      2e-3;
  CHECK(g.h * grad.dot(dir) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("episode csv layout") {
  const Grid g = make_grid(1.0, 4);
  const Theta th = make_theta(1.0, Exponential{1.0, 1.0}, g);
  const EpisodeData ep = simulate_episode(th, constant_policy(1.0), zero_signal(g), zero_noise(g), g, 1.0);
  std::ostringstream os;
  write_episode_csv(os, ep);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,I,A,M,u,Q,S");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == g.n + 1);
}
