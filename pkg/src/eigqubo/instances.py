"""Benchmark instance I/O, generators and the MDP -> QUBO reduction.

ORLIB triplet grammar (also used for Palubeckis-style data)::

    P                  number of instances
    n nz [offset]      per instance; the optional offset carries reduction constants
    i j v              nz lines, 1-based, i <= j or i > j; sets q[i][j] = q[j][i] = v

MDPLIB grammar::

    n m
    i j d              all pairs, 0- or 1-based (detected from the smallest index)

or, instead of triplets, a dense upper triangle: row ``i`` lists ``d[i][i+1:]``.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from eigqubo.core import QuboInstance

FAMILIES = ("orlib-like", "palubeckis-like", "dominant-eig")


class ParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


def _as_stream(source) -> TextIO:
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def _lines(stream: TextIO) -> Iterable[tuple[int, list[str]]]:
    for lineno, line in enumerate(stream, start=1):
        tokens = line.split()
        if tokens:
            yield lineno, tokens


def _num(token: str, lineno: int, kind=float):
    try:
        return kind(token)
    except ValueError:
        raise ParseError(f"expected {kind.__name__}, got {token!r}", lineno) from None


def _fmt(v: float) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(v)


# -- ORLIB -------------------------------------------------------------------

def parse_orlib(source, name: str = "orlib") -> list[QuboInstance]:
    """Parse an ORLIB-style triplet stream (maximization sense)."""
    lines = _lines(_as_stream(source))
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise ParseError("empty stream") from None
    if len(tokens) != 1:
        raise ParseError("first line must hold the instance count", lineno)
    count = _num(tokens[0], lineno, int)
    if count < 0:
        raise ParseError("negative instance count", lineno)
    out = []
    for p in range(count):
        try:
            lineno, tokens = next(lines)
        except StopIteration:
            raise ParseError(f"missing header for instance {p + 1}") from None
        if len(tokens) not in (2, 3):
            raise ParseError("instance header must be 'n nz [offset]'", lineno)
        n, nz = _num(tokens[0], lineno, int), _num(tokens[1], lineno, int)
        offset = _num(tokens[2], lineno) if len(tokens) == 3 else 0.0
        if n < 1 or nz < 0:
            raise ParseError(f"bad instance header n={n} nz={nz}", lineno)
        q = np.zeros((n, n))
        seen = set()
        for _ in range(nz):
            try:
                lineno, tokens = next(lines)
            except StopIteration:
                raise ParseError(f"instance {p + 1}: expected {nz} triplets") from None
            if len(tokens) != 3:
                raise ParseError("triplet must be 'i j v'", lineno)
            i, j = _num(tokens[0], lineno, int), _num(tokens[1], lineno, int)
            v = _num(tokens[2], lineno)
            if not (1 <= i <= n and 1 <= j <= n):
                raise ParseError(f"index ({i}, {j}) out of range 1..{n}", lineno)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ParseError(f"duplicate entry ({i}, {j})", lineno)
            seen.add(key)
            q[i - 1, j - 1] = v
            q[j - 1, i - 1] = v
        label = name if count == 1 else f"{name}_{p + 1}"
        out.append(QuboInstance(q, offset, label))
    extra = next(lines, None)
    if extra is not None:
        raise ParseError("trailing data after last instance", extra[0])
    return out


def write_orlib(instances: Iterable[QuboInstance], stream: TextIO | None = None) -> str:
    """Serialize instances in the grammar :func:`parse_orlib` accepts."""
    instances = list(instances)
    parts = [f"{len(instances)}\n"]
    for inst in instances:
        iu, ju = np.nonzero(np.triu(inst.q))
        offset = f" {_fmt(inst.offset)}" if inst.offset != 0.0 else ""
        parts.append(f"{inst.n} {iu.size}{offset}\n")
        parts.extend(f"{i + 1} {j + 1} {_fmt(inst.q[i, j])}\n" for i, j in zip(iu, ju))
    text = "".join(parts)
    if stream is not None:
        stream.write(text)
    return text


# -- generators --------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    density: float = 0.1
    coeff_low: int = -100
    coeff_high: int = 100
    seed: int = 0
    family: str = "orlib-like"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0.0 < self.density <= 1.0:
            raise ValueError("density must lie in (0, 1]")
        if self.coeff_low > self.coeff_high:
            raise ValueError("coeff_low must not exceed coeff_high")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")

    @property
    def planted_weight(self) -> float:
        """Eigenvalue of the rank-1 term planted by the dominant-eig family.

        Negative, as in penalty-reduced problems, and scaled with the
        expected bulk spectral radius ``2 * sigma * sqrt(n)`` so the planted
        component stays clearly separated at every size.
        """
        amp = max(abs(self.coeff_low), abs(self.coeff_high))
        return -5.0 * amp * np.sqrt(self.n * self.density)


def generate(spec: GeneratorSpec, name: str | None = None) -> QuboInstance:
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    iu, ju = np.triu_indices(n)
    mask = rng.random(iu.size) < spec.density
    vals = rng.integers(spec.coeff_low, spec.coeff_high, size=iu.size, endpoint=True)
    q = np.zeros((n, n))
    q[iu[mask], ju[mask]] = vals[mask]
    q[ju[mask], iu[mask]] = vals[mask]
    if spec.family == "dominant-eig":
        u = rng.normal(size=n)
        u /= np.linalg.norm(u)
        q += spec.planted_weight * np.outer(u, u)
    label = name or f"{spec.family}_n{n}_d{spec.density:g}_s{spec.seed}"
    return QuboInstance.from_matrix(q, 0.0, label)


# -- MDP ---------------------------------------------------------------------

@dataclass(frozen=True)
class MdpInstance:
    d: np.ndarray
    m: int
    name: str = "mdp"

    def __post_init__(self):
        d = np.array(self.d, dtype=np.float64, copy=True)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 1:
            raise ValueError(f"distance matrix must be square and non-empty, got {d.shape}")
        if not np.array_equal(d, d.T):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diagonal(d) != 0):
            raise ValueError("distance matrix must have a zero diagonal")
        if np.any(d < 0):
            raise ValueError("distances must be non-negative")
        if not 1 <= self.m <= d.shape[0]:
            raise ValueError(f"m={self.m} outside 1..{d.shape[0]}")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def objective(self, x) -> float:
        """Sum over ordered pairs i != j of d_ij x_i x_j (each pair counted twice)."""
        x = np.asarray(x, dtype=np.float64)
        return float(x @ self.d @ x)


def mdp_to_qubo(mdp: MdpInstance, P: float) -> QuboInstance:
    """Fold the cardinality constraint into the objective as ``-P (sum x - m)^2``.

    The constant ``-P m^2`` is kept in the offset, so the QUBO value equals
    the penalized MDP objective for every binary x.
    """
    if P < 0:
        raise ValueError("penalty P must be non-negative")
    n, m = mdp.n, mdp.m
    q = mdp.d - P
    np.fill_diagonal(q, P * (2 * m - 1))
    return QuboInstance(q, -P * m * m, f"{mdp.name}_P{P:g}")


def generate_mdp(n: int, m: int, low: int = 0, high: int = 9, seed: int = 0, name: str | None = None) -> MdpInstance:
    """Integer distances uniform in [low, high], in the style of the SOM set."""
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    d = np.zeros((n, n))
    vals = rng.integers(low, high, size=iu.size, endpoint=True)
    d[iu, ju] = vals
    d[ju, iu] = vals
    return MdpInstance(d, m, name or f"mdp_n{n}_m{m}_s{seed}")


def parse_mdplib(source, name: str = "mdp") -> MdpInstance:
    rows = list(_lines(_as_stream(source)))
    if not rows:
        raise ParseError("empty stream")
    lineno, tokens = rows[0]
    if len(tokens) != 2:
        raise ParseError("first line must be 'n m'", lineno)
    n, m = _num(tokens[0], lineno, int), _num(tokens[1], lineno, int)
    if n < 1 or not 1 <= m <= n:
        raise ParseError(f"bad header n={n} m={m}", lineno)
    body = rows[1:]
    d = np.zeros((n, n))
    if n > 1 and [len(t) for _, t in body] == list(range(n - 1, 0, -1)):
        for i, (lineno, tokens) in enumerate(body):
            vals = [_num(t, lineno) for t in tokens]
            d[i, i + 1:] = vals
            d[i + 1:, i] = vals
    else:
        triplets = []
        for lineno, tokens in body:
            if len(tokens) != 3:
                raise ParseError("expected 'i j d' triplet", lineno)
            triplets.append((_num(tokens[0], lineno, int), _num(tokens[1], lineno, int), _num(tokens[2], lineno), lineno))
        base = min((min(i, j) for i, j, _, _ in triplets), default=0)
        if base not in (0, 1):
            raise ParseError(f"smallest index is {base}; expected 0 or 1", triplets[0][3])
        filled = np.zeros((n, n), dtype=bool)
        for i, j, v, ln in triplets:
            i -= base
            j -= base
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ParseError(f"bad pair ({i + base}, {j + base})", ln)
            if filled[i, j] and d[i, j] != v:
                raise ParseError(f"conflicting distances for pair ({i + base}, {j + base})", ln)
            filled[i, j] = filled[j, i] = True
            d[i, j] = d[j, i] = v
        missing = ~filled
        np.fill_diagonal(missing, False)
        if missing.any():
            i, j = np.argwhere(missing)[0]
            raise ParseError(f"missing distance for pair ({i + base}, {j + base})")
    try:
        return MdpInstance(d, m, name)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def write_mdplib(mdp: MdpInstance, stream: TextIO | None = None) -> str:
    """0-based triplet form of :func:`parse_mdplib`'s grammar."""
    iu, ju = np.triu_indices(mdp.n, 1)
    parts = [f"{mdp.n} {mdp.m}\n"]
    parts.extend(f"{i} {j} {_fmt(mdp.d[i, j])}\n" for i, j in zip(iu, ju))
    text = "".join(parts)
    if stream is not None:
        stream.write(text)
    return text
