import math

import numpy as np
import pytest

import liquidate as lq


def test_grid():
    g = lq.Grid(1.0, 4)
    assert g.h == 0.25
    assert np.allclose(g.nodes(), [0, 0.25, 0.5, 0.75])
    with pytest.raises(ValueError):
        lq.Grid(1.0, 0)


def test_kernels_and_admissibility():
    g = lq.Grid(1.0, 64)
    G = lq.cell_averages("exponential", g, beta=1.0, scale=1.0)
    assert G.shape == (64,)
    assert lq.min_convolution_eig(g, G) >= -1e-8
    assert lq.is_admissible(g, 1.0, G)
    assert not lq.is_admissible(g, 100.0, G)
    with pytest.raises(ValueError):
        lq.cell_averages("no-such-kernel", g)


def test_singular_values():
    g = lq.Grid(1.0, 512)
    s = lq.singular_values(g, np.ones(512))
    k = np.arange(1, 11)
    assert np.allclose(s[:10], 1.0 / (math.pi * (k - 0.5)), rtol=0.01)


def test_schedules():
    g = lq.Grid(1.0, 512)
    assert lq.schedule(100, g)[0] == pytest.approx(0.6106, rel=2e-4)
    assert lq.schedule(100, g, singular=True)[0] == pytest.approx(0.5531, rel=5e-4)
    N, K, R = lq.lsmc_hyperparams(1000, 4.0)
    assert (N, K) == (26, 6)
    assert R == pytest.approx(2.241, rel=1e-3)
    assert lq.exploration_indices(5, 1 / 3, 13) == [1, 2, 3, 4, 5, 7, 9, 11, 13]
    assert lq.initial_explorations(0.1) == 7


def test_lq_oracle():
    g = lq.Grid(1.0, 512)
    for rho in (1.0, 10.0):
        u = lq.greedy_rollout(g, 1.0, np.zeros(512), 0.0, rho, 1.0, np.zeros(513))
        assert np.max(np.abs(u - rho / (1 + rho))) <= 2 * g.h


def test_run_experiment():
    summary, files = lq.run_experiment("dist-fn")
    assert set(summary) == {"config", "results", "checks", "version"}
    assert summary["checks"]["dist_fn_slope"]["pass"]
    assert files["dist_fn.csv"].startswith("R,D,in_fit\n")

    cfg = "[world]\nn = 32\n[estimate_rate]\nN_list = 4, 8\n"
    a = lq.run_experiment("estimate-rate", cfg, seed=5, replications=2)[1]
    b = lq.run_experiment("estimate-rate", cfg, seed=5, replications=2)[1]
    assert a == b
    with pytest.raises(ValueError):
        lq.run_experiment("dist-fn", "[world]\nbogus = 1\n")
