import itertools
import math

import numpy as np
import pytest

from eigqubo.core import QuboInstance, evaluate
from eigqubo.instances import GeneratorSpec, generate
from eigqubo.spectral import TransformConfig, top_k_eigenpairs, transform_q
from eigqubo.landscape import (
    WalkConfig,
    autocorrelation,
    exact_autocorrelation,
    exact_xi,
    random_walk_autocorrelation,
    write_xi_grid_csv,
    xi_grid,
)
from tests.conftest import random_instance


def chain_rho(instance, lags):
    """Exact stationary autocorrelation of the one-flip walk by enumerating states."""
    n = instance.n
    states = list(itertools.product((0, 1), repeat=n))
    index = {s: i for i, s in enumerate(states)}
    f = np.array([evaluate(instance, s) for s in states])
    P = np.zeros((len(states), len(states)))
    for s in states:
        for j in range(n):
            t = list(s)
            t[j] ^= 1
            P[index[s], index[tuple(t)]] += 1.0 / n
    pi = np.full(len(states), 1.0 / len(states))
    mu = pi @ f
    var = pi @ (f - mu) ** 2
    return [((pi * f) @ np.linalg.matrix_power(P, d) @ f - mu * mu) / var for d in lags]


def test_walk_config_floor():
    with pytest.raises(ValueError):
        WalkConfig(walk_length=999, max_lag=10)


def test_zero_matrix_flags_zero_variance():
    stats = random_walk_autocorrelation(QuboInstance(np.zeros((5, 5))), WalkConfig(10_000, 0, 10))
    assert stats.zero_variance and not stats.xi_defined


def test_needs_two_variables():
    with pytest.raises(ValueError):
        random_walk_autocorrelation(QuboInstance([[1.0]]), WalkConfig(10_000, 0, 10))


@pytest.mark.parametrize("q", [[[1.0, 0.0], [0.0, 1.0]], [[1.0, 3.0], [3.0, -2.0]]])
def test_two_variable_chain_oracle(q):
    inst = QuboInstance(q)
    exact = chain_rho(inst, [1, 2])
    stats = random_walk_autocorrelation(inst, WalkConfig(1_000_000, 4, 2))
    np.testing.assert_allclose(stats.rho, exact, atol=0.05)


def test_three_variable_chain_oracle():
    inst = random_instance(np.random.default_rng(0), 4)
    exact = chain_rho(inst, [1, 2, 3])
    stats = random_walk_autocorrelation(inst, WalkConfig(1_000_000, 1, 3))
    np.testing.assert_allclose(stats.rho, exact, atol=0.02)


def test_rho_bounded_and_xi_positive():
    inst = random_instance(np.random.default_rng(1), 60)
    stats = random_walk_autocorrelation(inst, WalkConfig(50_000, 2, 20))
    assert np.all(np.abs(stats.rho) <= 1 + 1e-9)
    assert 0 < stats.rho[0] < 1 and stats.xi > 0
    assert stats.xi == pytest.approx(-1 / math.log(stats.rho[0]))


def test_scale_invariance():
    inst = random_instance(np.random.default_rng(2), 40)
    cfg = WalkConfig(50_000, 3, 20)
    a = random_walk_autocorrelation(inst, cfg)
    b = random_walk_autocorrelation(inst.scaled(2.0), cfg)
    np.testing.assert_allclose(a.rho, b.rho, atol=1e-9)


def test_autocorrelation_of_known_series():
    t = np.arange(200, dtype=float)
    rho, mean, var = autocorrelation(np.cos(t * np.pi), 2)
    assert rho[0] == pytest.approx(-1.0, abs=0.02) and rho[1] == pytest.approx(1.0, abs=0.02)
    assert mean == pytest.approx(0.0, abs=1e-12) and var == pytest.approx(1.0)


def test_grid_identity_cell_equals_base():
    inst = random_instance(np.random.default_rng(3), 30)
    cfg = WalkConfig(20_000, 7, 10)
    grid = xi_grid(inst, [0.0], [0], cfg)
    assert grid[0, 0] == random_walk_autocorrelation(inst, cfg).xi


def test_grid_layout_and_csv(tmp_path):
    inst = generate(GeneratorSpec(40, seed=5))
    Ms, ks = [100.0, 200.0], [1, 2, 3]
    grid = xi_grid(inst, Ms, ks, WalkConfig(20_000, 1, 10))
    assert grid.shape == (3, 2) and np.all(np.isfinite(grid)) and np.all(grid > 0)
    write_xi_grid_csv(grid, Ms, ks, tmp_path / "xi.csv")
    lines = (tmp_path / "xi.csv").read_text().splitlines()
    assert lines[0] == "k,M=100,M=200"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["1", "2", "3"]


@pytest.mark.slow
def test_estimator_stable_under_longer_walks():
    ratios = []
    for seed in range(10):
        inst = generate(GeneratorSpec(100, seed=seed))
        short = random_walk_autocorrelation(inst, WalkConfig(200_000, seed, 10)).xi
        long = random_walk_autocorrelation(inst, WalkConfig(400_000, seed, 10)).xi
        ratios.append(long / short)
    assert abs(np.mean(ratios) - 1.0) < 0.05


@pytest.mark.parametrize("q", [[[1.0, 0.0], [0.0, 1.0]], [[1.0, 3.0], [3.0, -2.0]]])
def test_exact_autocorrelation_matches_chain(q):
    inst = QuboInstance(q)
    np.testing.assert_allclose(exact_autocorrelation(inst, 3), chain_rho(inst, [1, 2, 3]), atol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_exact_autocorrelation_matches_chain_random(seed):
    inst = random_instance(np.random.default_rng(seed), 5)
    np.testing.assert_allclose(exact_autocorrelation(inst, 4), chain_rho(inst, [1, 2, 3, 4]), atol=1e-10)


@pytest.mark.parametrize("seed", range(3))
def test_walk_estimate_matches_exact(seed):
    inst = generate(GeneratorSpec(200, seed=seed))
    stats = random_walk_autocorrelation(inst, WalkConfig(1_000_000, seed, 100))
    assert stats.xi == pytest.approx(exact_xi(inst), rel=0.05)


def test_larger_M_does_not_raise_xi():
    # fixed k >= 5, mean over ten generated n=500 instances; the walk cannot
    # resolve differences this small, so the noise-free expectation is used
    Ms = [100.0, 200.0, 300.0, 400.0, 500.0]
    ks = [5, 10, 20, 25]
    grids = []
    for s in range(10):
        inst = generate(GeneratorSpec(500, seed=s))
        summary = top_k_eigenpairs(inst, max(ks), method="lapack")
        grids.append([[exact_xi(transform_q(inst, TransformConfig(M, k), summary)) for M in Ms] for k in ks])
    mean = np.mean(grids, axis=0)
    assert np.all(np.diff(mean, axis=1) <= 0)
