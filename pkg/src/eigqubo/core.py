"""QUBO data model, objective evaluation and incremental one-flip gains.

Everything here maximizes ``x^T Q x + offset`` over binary ``x`` with a dense,
exactly symmetric ``Q``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class QuboInstance:
    """Immutable symmetric QUBO matrix plus a constant offset."""

    q: np.ndarray
    offset: float = 0.0
    name: str = "qubo"

    def __post_init__(self):
        q = np.array(self.q, dtype=np.float64, copy=True)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] < 1:
            raise ValueError(f"Q must be a non-empty square matrix, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("Q contains non-finite coefficients")
        if not np.array_equal(q, q.T):
            raise ValueError("Q is not symmetric; use QuboInstance.from_matrix to symmetrize")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_matrix(cls, q, offset: float = 0.0, name: str = "qubo") -> "QuboInstance":
        """Build an instance from any square matrix.

        A non-symmetric input is replaced by ``(Q + Q^T) / 2``, which leaves
        ``x^T Q x`` unchanged. Round-off in already symmetric input is removed
        by copying the upper triangle over the lower one.
        """
        q = np.asarray(q, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError(f"Q must be square, got shape {q.shape}")
        if not np.array_equal(q, q.T):
            q = 0.5 * (q + q.T)
        upper = np.triu(q)
        q = upper + np.triu(q, 1).T
        return cls(q, offset, name)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def scaled(self, factor: float) -> "QuboInstance":
        return QuboInstance(self.q * factor, self.offset * factor, self.name)


@dataclass
class Solution:
    x: np.ndarray
    value: float

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.int8)

    def key(self) -> bytes:
        return np.packbits(self.x).tobytes()


def _check_x(instance: QuboInstance, x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != instance.n:
        raise ValueError(f"expected a binary vector of length {instance.n}, got shape {x.shape}")
    if not np.all((x == 0) | (x == 1)):
        raise ValueError("x must contain only 0/1 entries")
    return x.astype(np.float64)


def evaluate(instance: QuboInstance, x) -> float:
    """Return ``x^T Q x + offset``."""
    xf = _check_x(instance, x)
    return float(xf @ instance.q @ xf) + instance.offset


@dataclass
class FlipGainState:
    """Current point of a one-flip local search with cached move gains.

    ``gains[j]`` is the objective change caused by toggling bit ``j``.
    One instance of this class belongs to a single search; it is not
    thread-safe.
    """

    instance: QuboInstance
    x: np.ndarray
    gains: np.ndarray
    value: float
    _sign: np.ndarray = field(repr=False, default=None)

    def flip(self, j: int) -> float:
        """Toggle bit ``j`` in place and return the objective delta."""
        n = self.instance.n
        if not 0 <= j < n:
            raise ValueError(f"flip index {j} out of range for n={n}")
        delta = self.gains[j]
        # s = 1 - 2x; flipping j changes x_j by s_j
        sj = self._sign[j]
        self.gains += (2.0 * sj) * self._sign * self.instance.q[:, j]
        self.gains[j] = -delta
        self.x[j] ^= 1
        self._sign[j] = -sj
        self.value += delta
        return float(delta)

    def copy(self) -> "FlipGainState":
        return FlipGainState(self.instance, self.x.copy(), self.gains.copy(), self.value, self._sign.copy())


def init_gains(instance: QuboInstance, x) -> FlipGainState:
    """Compute all one-flip gains at ``x`` in O(n^2)."""
    xf = _check_x(instance, x)
    q = instance.q
    sign = 1.0 - 2.0 * xf
    diag = np.diagonal(q)
    field_ = q @ xf - diag * xf
    gains = sign * (diag + 2.0 * field_)
    value = float(xf @ q @ xf) + instance.offset
    return FlipGainState(instance, xf.astype(np.int8), gains, value, sign)


def apply_flip(state: FlipGainState, j: int) -> FlipGainState:
    """Toggle bit ``j`` of ``state`` (in place) and return the same state."""
    state.flip(j)
    return state
