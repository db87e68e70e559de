"""Random-walk autocorrelation of a QUBO landscape.

A walk flips one uniformly random bit per step. From the fitness series
``f_t`` the empirical autocorrelation ``rho(d)`` is estimated and the
correlation length ``xi = -1 / ln rho(1)`` is reported.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numba
import numpy as np

from eigqubo.core import QuboInstance
from eigqubo.spectral import TransformConfig, top_k_eigenpairs, transform_q

BURN_IN = 1000


@dataclass(frozen=True)
class WalkConfig:
    walk_length: int = 1_000_000
    seed: int = 0
    max_lag: int = 100

    def __post_init__(self):
        if self.walk_length < 1 or self.max_lag < 1:
            raise ValueError("walk_length and max_lag must be positive")
        if self.walk_length < 100 * self.max_lag:
            raise ValueError(
                f"walk_length={self.walk_length} is below the 100*max_lag={100 * self.max_lag} floor"
            )


@dataclass(frozen=True)
class LandscapeStats:
    xi: float  # nan when undefined
    rho: np.ndarray  # rho(d) for d = 1..max_lag
    walk_mean: float
    walk_variance: float
    zero_variance: bool = False

    @property
    def xi_defined(self) -> bool:
        return not math.isnan(self.xi)


@numba.njit(cache=True)
def _walk(q, x, flips, burn_in):
    n = q.shape[0]
    sign = 1.0 - 2.0 * x
    gains = np.empty(n)
    f = 0.0
    for i in range(n):
        h = 0.0
        for k in range(n):
            if k != i:
                h += q[i, k] * x[k]
        gains[i] = sign[i] * (q[i, i] + 2.0 * h)
        f += x[i] * (q[i, i] + h)
    out = np.empty(flips.shape[0] - burn_in + 1)
    if burn_in == 0:
        out[0] = f
    for t in range(flips.shape[0]):
        j = flips[t]
        delta = gains[j]
        sj = sign[j]
        for i in range(n):
            gains[i] += 2.0 * sj * sign[i] * q[i, j]
        gains[j] = -delta
        sign[j] = -sj
        f += delta
        if t + 1 >= burn_in:
            out[t + 1 - burn_in] = f
    return out


def fitness_walk(instance: QuboInstance, length: int, rng: np.random.Generator, burn_in: int = BURN_IN) -> np.ndarray:
    """Fitness values (offset excluded) of ``length`` consecutive walk steps after burn-in."""
    n = instance.n
    x = rng.integers(0, 2, size=n).astype(np.float64)
    flips = rng.integers(0, n, size=burn_in + length - 1)
    return _walk(np.ascontiguousarray(instance.q), x, flips, burn_in)


def autocorrelation(series: np.ndarray, max_lag: int) -> tuple[np.ndarray, float, float]:
    """Biased autocorrelation estimate ``rho(1..max_lag)``, plus mean and variance."""
    series = np.asarray(series, dtype=np.float64)
    mean = float(series.mean())
    dev = series - mean
    denom = float(dev @ dev)
    var = denom / series.size
    if denom <= 0.0 or var <= 1e-24 * max(1.0, mean * mean):
        return np.full(max_lag, np.nan), mean, 0.0
    rho = np.array([float(dev[:-d] @ dev[d:]) / denom for d in range(1, max_lag + 1)])
    return rho, mean, var


def random_walk_autocorrelation(instance: QuboInstance, config: WalkConfig) -> LandscapeStats:
    if instance.n < 2:
        raise ValueError("landscape analysis needs n >= 2")
    rng = np.random.default_rng(config.seed)
    series = fitness_walk(instance, config.walk_length, rng)
    rho, mean, var = autocorrelation(series, config.max_lag)
    if var == 0.0:
        return LandscapeStats(float("nan"), rho, mean, 0.0, zero_variance=True)
    r1 = rho[0]
    xi = -1.0 / math.log(r1) if 0.0 < r1 < 1.0 else float("nan")
    return LandscapeStats(xi, rho, mean + instance.offset, var)


def exact_autocorrelation(instance: QuboInstance, max_lag: int) -> np.ndarray:
    """Stationary ``rho(1..max_lag)`` of the one-flip walk, without sampling.

    In spin variables ``s = 2x - 1`` a quadratic splits into a linear part
    (coefficients ``a_i = row_sum_i / 2``) and a pairwise part (``q_ij / 2``).
    Under the walk these decay as ``(1 - 2/n)^d`` and ``(1 - 4/n)^d``, so
    ``rho(d)`` is their variance-weighted mix.
    """
    q = instance.q
    n = instance.n
    v1 = float(np.sum((q.sum(axis=1) / 2.0) ** 2))
    v2 = float(np.sum(np.triu(q, 1) ** 2) / 4.0)
    if v1 + v2 == 0.0:
        return np.full(max_lag, np.nan)
    d = np.arange(1, max_lag + 1)
    return (v1 * (1.0 - 2.0 / n) ** d + v2 * (1.0 - 4.0 / n) ** d) / (v1 + v2)


def exact_xi(instance: QuboInstance) -> float:
    r1 = exact_autocorrelation(instance, 1)[0]
    return -1.0 / math.log(r1) if 0.0 < r1 < 1.0 else float("nan")


def xi_grid(
    instance: QuboInstance,
    Ms: Sequence[float],
    ks: Sequence[int],
    config: WalkConfig,
    method: str = "ql",
) -> np.ndarray:
    """xi for every (k, M) cell; rows follow ``ks``, columns follow ``Ms``.

    Every cell walks with the same seed (common random numbers): the
    transformed landscapes differ only slightly, and a shared flip sequence
    keeps cell-to-cell differences from drowning in walk noise.
    """
    if not Ms or not ks:
        raise ValueError("M and k grids must be non-empty")
    kmax = max(ks)
    summary = top_k_eigenpairs(instance, kmax, method) if kmax > 0 and any(M > 0 for M in Ms) else None
    grid = np.empty((len(ks), len(Ms)))
    for r, k in enumerate(ks):
        for c, M in enumerate(Ms):
            q2 = transform_q(instance, TransformConfig(M, k), summary)
            grid[r, c] = random_walk_autocorrelation(q2, config).xi
    return grid


def write_xi_grid_csv(grid: np.ndarray, Ms: Sequence[float], ks: Sequence[int], path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k"] + [f"M={M:g}" for M in Ms])
        for k, row in zip(ks, grid):
            writer.writerow([k] + [repr(float(v)) for v in row])
