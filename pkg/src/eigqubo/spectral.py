"""Leading eigenpairs of Q and the rank-1 reward/penalty augmentation.

The transformed matrix is

    Q' = Q + sum_{t<k} M * sign(lambda_t) * c_t c_t^T

where the eigenpairs are ordered by decreasing ``|lambda|``. Because
``x^T c c^T x = (x . c)^2`` the augmented objective is the original one plus
``M * sign(lambda_t) * (x . c_t)^2`` per component.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from eigqubo._tridiag import symmetric_eig
from eigqubo.core import QuboInstance

METHODS = ("ql", "lapack")


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, worst_residual: float):
        super().__init__(f"{message} (worst residual {worst_residual:.3e})")
        self.worst_residual = worst_residual


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray

    def residual(self, instance: QuboInstance) -> float:
        return float(np.linalg.norm(instance.q @ self.vector - self.value * self.vector))


@dataclass(frozen=True)
class SpectralSummary:
    """Eigenpairs sorted by decreasing |lambda|."""

    pairs: tuple[EigenPair, ...]
    spectrum: np.ndarray | None = field(default=None, repr=False)

    @property
    def k_computed(self) -> int:
        return len(self.pairs)

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.pairs])

    @property
    def vectors(self) -> np.ndarray:
        """n x k matrix, one eigenvector per column."""
        return np.column_stack([p.vector for p in self.pairs])


@dataclass(frozen=True)
class TransformConfig:
    M: float = 100.0
    k: int = 1

    def __post_init__(self):
        if not np.isfinite(self.M) or self.M < 0:
            raise ValueError(f"M must be a finite non-negative number, got {self.M}")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"k must be a non-negative integer, got {self.k}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "M", float(self.M))


def _sign_convention(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each eigenvector made positive
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _abs_order(values: np.ndarray) -> np.ndarray:
    # |lambda| desc, then more positive first, then lower index
    return np.lexsort((np.arange(values.size), -values, -np.abs(values)))


def _decompose(instance: QuboInstance, want_vectors: bool, method: str):
    if method not in METHODS:
        raise ValueError(f"unknown eigensolver method {method!r}; choose from {METHODS}")
    q = instance.q
    if method == "lapack":
        if want_vectors:
            return np.linalg.eigh(q)
        return np.linalg.eigvalsh(q), None
    w, v, ok = symmetric_eig(q, want_vectors)
    if not ok:
        worst = float("nan")
        if v is not None:
            worst = float(np.max(np.linalg.norm(q @ v - v * w, axis=0)))
        raise ConvergenceError("implicit QL did not converge within 100*n sweeps", worst)
    order = np.argsort(w, kind="stable")
    return w[order], (v[:, order] if v is not None else None)


def top_k_eigenpairs(instance: QuboInstance, k: int, method: str = "ql") -> SpectralSummary:
    """The ``k`` eigenpairs of largest ``|lambda|``.

    Eigenvectors are unit length with their largest-magnitude entry positive.
    The full dense spectrum is computed, so the complete eigenvalue list is
    attached to the summary as well.
    """
    n = instance.n
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= n={n}, got {k}")
    w, v = _decompose(instance, True, method)
    order = _abs_order(w)[:k]
    vecs = _sign_convention(v[:, order])
    pairs = tuple(EigenPair(float(w[i]), vecs[:, t].copy()) for t, i in enumerate(order))
    return SpectralSummary(pairs, spectrum=np.sort(w)[::-1].copy())


def full_spectrum(instance: QuboInstance, method: str = "ql") -> np.ndarray:
    """All n eigenvalues, sorted in decreasing signed order."""
    w, _ = _decompose(instance, False, method)
    return np.sort(w)[::-1]


def augmentation(summary: SpectralSummary, config: TransformConfig) -> np.ndarray:
    """The dense matrix ``sum_t M * sign(lambda_t) * c_t c_t^T`` over the first k pairs."""
    if config.k > summary.k_computed:
        raise ValueError(f"k={config.k} exceeds the {summary.k_computed} computed eigenpairs")
    n = summary.pairs[0].vector.size if summary.pairs else 0
    extra = np.zeros((n, n))
    for pair in summary.pairs[: config.k]:
        weight = config.M * np.sign(pair.value)
        if weight != 0.0:
            extra += weight * np.outer(pair.vector, pair.vector)
    return extra


def transform_q(
    instance: QuboInstance,
    config: TransformConfig,
    summary: SpectralSummary | None = None,
    method: str = "ql",
) -> QuboInstance:
    """Return Q' (a new instance; ``instance`` is untouched).

    ``summary`` may be passed to reuse one decomposition across several
    (M, k) settings; it must hold at least ``config.k`` pairs.
    """
    if config.k > instance.n:
        raise ValueError(f"k={config.k} exceeds n={instance.n}")
    name = f"{instance.name}[M={config.M:g},k={config.k}]"
    if config.k == 0 or config.M == 0.0:
        return QuboInstance(instance.q, instance.offset, name)
    if summary is None:
        summary = top_k_eigenpairs(instance, config.k, method)
    q = instance.q + augmentation(summary, config)
    return QuboInstance.from_matrix(q, instance.offset, name)


def reconstruct(summary: SpectralSummary) -> np.ndarray:
    """``sum_t lambda_t c_t c_t^T`` over the stored pairs."""
    vecs = summary.vectors
    return (vecs * summary.values) @ vecs.T


def write_spectrum_csv(values: Sequence[float], path) -> None:
    """Write eigenvalues as ``index,lambda`` rows in decreasing signed order."""
    values = np.sort(np.asarray(values, dtype=np.float64))[::-1]
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "lambda"])
        for i, lam in enumerate(values):
            writer.writerow([i, repr(float(lam))])


def read_spectrum_csv(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["lambda"]) for r in rows])
