"""PRlocal: one-flip tabu search with random restarts and path relinking.

Moves are chosen on a *search* matrix (Q' for transformed runs) while the
incumbent is always scored on the original matrix, so values from base and
transformed runs are directly comparable.

The budget unit is one performed flip ("evaluation"). Runs bounded only by
evaluations are bit-for-bit reproducible from the seed.
"""
from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field

import numpy as np

from eigqubo.core import FlipGainState, QuboInstance, Solution, evaluate, init_gains

BRUTE_FORCE_MAX_N = 25


@dataclass
class SolverConfig:
    seed: int = 0
    time_limit: float | None = None
    max_evaluations: int | None = 100_000
    tabu_tenure: int | None = None  # None: max(10, n // 50), capped at n - 1
    elite_size: int = 8
    restart_stall: int = 500
    record_moves: bool = False

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        has_time = self.time_limit is not None and self.time_limit > 0
        has_evals = self.max_evaluations is not None and self.max_evaluations > 0
        if not (has_time or has_evals):
            raise ValueError("set a positive time_limit or max_evaluations")
        if self.time_limit is not None and self.time_limit < 0:
            raise ValueError("time_limit must be positive")
        if self.max_evaluations is not None and self.max_evaluations < 0:
            raise ValueError("max_evaluations must be positive")
        if self.tabu_tenure is not None and self.tabu_tenure < 1:
            raise ValueError("tabu_tenure must be a positive integer")
        if self.elite_size < 1 or self.restart_stall < 1:
            raise ValueError("elite_size and restart_stall must be positive")

    @property
    def deterministic(self) -> bool:
        return not (self.time_limit is not None and self.time_limit > 0)

    def tenure_for(self, n: int) -> int:
        tenure = self.tabu_tenure if self.tabu_tenure is not None else max(10, n // 50)
        return max(0, min(tenure, n - 1))


@dataclass
class RunReport:
    best_solution: Solution
    best_value_base: float
    best_value_search: float
    evaluations: int
    restarts: int
    relink_calls: int
    wall_time: float
    seed: int
    deterministic: bool
    trajectory: list[tuple[int, float]] = field(default_factory=list)
    moves: list[tuple[int, int, bool]] | None = None

    def to_dict(self, trajectory: bool = True, timing: bool = False) -> dict:
        out = {
            "best_x": "".join(map(str, self.best_solution.x.tolist())),
            "best_value_base": self.best_value_base,
            "best_value_search": self.best_value_search,
            "evaluations": self.evaluations,
            "restarts": self.restarts,
            "relink_calls": self.relink_calls,
            "seed": self.seed,
            "deterministic": self.deterministic,
        }
        if timing:
            out["wall_time"] = self.wall_time
        if trajectory:
            out["trajectory"] = [[e, v] for e, v in self.trajectory]
        return out

    def to_json(self, trajectory: bool = True, timing: bool = False) -> str:
        """JSON text; wall time is left out unless ``timing`` so that
        evaluation-budget runs serialize byte-identically."""
        return json.dumps(self.to_dict(trajectory, timing), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        x = np.array([int(c) for c in data["best_x"]], dtype=np.int8)
        return cls(
            best_solution=Solution(x, data["best_value_base"]),
            best_value_base=data["best_value_base"],
            best_value_search=data["best_value_search"],
            evaluations=data["evaluations"],
            restarts=data["restarts"],
            relink_calls=data["relink_calls"],
            wall_time=data.get("wall_time", float("nan")),
            seed=data["seed"],
            deterministic=data["deterministic"],
            trajectory=[(int(e), float(v)) for e, v in data.get("trajectory", [])],
        )


def _improves(new: float, old: float) -> bool:
    return new > old + 1e-9 * max(1.0, abs(old))


class _Run:
    """Mutable state shared by the episodes of one solver run."""

    def __init__(self, search: QuboInstance, score: QuboInstance, config: SolverConfig):
        if search.n != score.n:
            raise ValueError(f"search and score instances differ in size ({search.n} != {score.n})")
        self.search = search
        self.score = score
        self.same = search is score
        self.config = config
        self.n = search.n
        self.tenure = config.tenure_for(self.n)
        self.rng = np.random.default_rng(config.seed)
        self.evaluations = 0
        self.max_evals = config.max_evaluations if config.max_evaluations else None
        self.deadline = None
        self.start = time.perf_counter()
        if config.time_limit:
            self.deadline = self.start + config.time_limit
        self.tabu_until = np.zeros(self.n, dtype=np.int64)
        self.best_x: np.ndarray | None = None
        self.best_value = -np.inf
        self.best_search = -np.inf
        self.trajectory: list[tuple[int, float]] = []
        self.moves: list[tuple[int, int, bool]] | None = [] if config.record_moves else None
        self.restarts = 0
        self.relink_calls = 0

    def exhausted(self) -> bool:
        if self.max_evals is not None and self.evaluations >= self.max_evals:
            return True
        return self.deadline is not None and time.perf_counter() >= self.deadline

    def states(self, x) -> tuple[FlipGainState, FlipGainState]:
        s = init_gains(self.search, x)
        return s, (s if self.same else init_gains(self.score, x))

    def visit(self, s: FlipGainState, sc: FlipGainState) -> None:
        if sc.value > self.best_value:
            self.best_value = sc.value
            self.best_x = sc.x.copy()
            self.trajectory.append((self.evaluations, float(sc.value)))
        if s.value > self.best_search:
            self.best_search = s.value

    def flip(self, s: FlipGainState, sc: FlipGainState, j: int) -> None:
        s.flip(j)
        if not self.same:
            sc.flip(j)
        self.evaluations += 1
        self.visit(s, sc)

    def select(self, s: FlipGainState) -> tuple[int, bool]:
        g = s.gains
        if self.tenure == 0:
            return int(np.argmax(g)), False
        allowed = self.tabu_until <= self.evaluations
        cand = np.where(allowed, g, -np.inf)
        j = int(np.argmax(cand))
        if not allowed.all():
            tabu = np.where(allowed, -np.inf, g)
            jt = int(np.argmax(tabu))
            # aspiration: tabu move that beats the search-matrix incumbent
            if tabu[jt] > cand[j] and _improves(s.value + tabu[jt], self.best_search):
                return jt, True
        return j, False

    def episode(self, x0) -> Solution:
        """Tabu descent from ``x0`` until ``restart_stall`` non-improving moves."""
        s, sc = self.states(x0)
        self.visit(s, sc)
        ep_search = s.value
        ep_best = Solution(sc.x.copy(), sc.value)
        stall = 0
        while stall < self.config.restart_stall and not self.exhausted():
            j, aspirated = self.select(s)
            if self.moves is not None:
                self.moves.append((self.evaluations, j, aspirated))
            self.tabu_until[j] = self.evaluations + self.tenure + 1
            self.flip(s, sc, j)
            if sc.value > ep_best.value:
                ep_best = Solution(sc.x.copy(), sc.value)
            if _improves(s.value, ep_search):
                ep_search = s.value
                stall = 0
            else:
                stall += 1
        return ep_best

    def relink(self, a: Solution, b: Solution, budgeted: bool = True) -> tuple[Solution, int]:
        s, sc = self.states(a.x)
        self.visit(s, sc)
        best = Solution(sc.x.copy(), sc.value)
        diff = np.flatnonzero(s.x != b.x)
        mask = np.zeros(self.n, dtype=bool)
        mask[diff] = True
        flips = 0
        while mask.any():
            if budgeted and self.exhausted():
                break
            j = int(np.argmax(np.where(mask, s.gains, -np.inf)))
            mask[j] = False
            self.flip(s, sc, j)
            flips += 1
            if sc.value > best.value:
                best = Solution(sc.x.copy(), sc.value)
        return best, flips

    def random_x(self) -> np.ndarray:
        return self.rng.integers(0, 2, size=self.n, dtype=np.int8)

    def report(self) -> RunReport:
        x = self.best_x if self.best_x is not None else np.zeros(self.n, dtype=np.int8)
        base_value = evaluate(self.score, x)
        search_value = base_value if self.same else evaluate(self.search, x)
        return RunReport(
            best_solution=Solution(x, base_value),
            best_value_base=base_value,
            best_value_search=search_value,
            evaluations=self.evaluations,
            restarts=self.restarts,
            relink_calls=self.relink_calls,
            wall_time=time.perf_counter() - self.start,
            seed=int(self.config.seed),
            deterministic=self.config.deterministic,
            trajectory=list(self.trajectory),
            moves=self.moves,
        )


def tabu_search(search_instance: QuboInstance, score_instance: QuboInstance, config: SolverConfig) -> RunReport:
    """Best-improvement tabu search with random restarts on stall."""
    run = _Run(search_instance, score_instance, config)
    first = True
    while first or not run.exhausted():
        if not first:
            run.restarts += 1
        first = False
        run.episode(run.random_x())
    return run.report()


def path_relink(a: Solution, b: Solution, search_instance: QuboInstance, score_instance: QuboInstance) -> Solution:
    """Greedy walk from ``a`` to ``b`` flipping only the bits where they differ.

    At each step the differing bit with the largest gain on the search matrix
    is flipped (lowest index on ties). The best solution seen on the path,
    endpoints included, is returned with its value on the score matrix.
    """
    xa = np.asarray(a.x)
    xb = np.asarray(b.x)
    if xa.shape != xb.shape:
        raise ValueError("endpoints have different lengths")
    if np.array_equal(xa, xb):
        raise ValueError("path relinking needs distinct endpoints")
    run = _Run(search_instance, score_instance, SolverConfig(max_evaluations=1))
    best, _ = run.relink(Solution(xa, 0.0), Solution(xb, 0.0), budgeted=False)
    return best


class _ElitePool:
    def __init__(self, size: int):
        self.size = size
        self.members: list[Solution] = []

    def add(self, sol: Solution) -> bool:
        key = sol.key()
        if any(m.key() == key for m in self.members):
            return False
        if len(self.members) >= self.size and sol.value <= self.members[-1].value:
            return False
        self.members.append(Solution(sol.x.copy(), sol.value))
        # stable sort keeps older members ahead on ties
        self.members.sort(key=lambda m: -m.value)
        del self.members[self.size:]
        return True


def prlocal(base: QuboInstance, transformed: QuboInstance | None, config: SolverConfig) -> RunReport:
    """Tabu episodes over Q' (or Q) interleaved with path relinking on an elite pool.

    After each episode its best solution is offered to the pool and the most
    recently admitted elite is relinked with a random other pool member.
    """
    search = transformed if transformed is not None else base
    run = _Run(search, base, config)
    pool = _ElitePool(config.elite_size)
    newest: Solution | None = None
    first = True
    while first or not run.exhausted():
        if not first:
            run.restarts += 1
        first = False
        ep_best = run.episode(run.random_x())
        if pool.add(ep_best):
            newest = ep_best
        if newest is None or len(pool.members) < 2 or run.exhausted():
            continue
        others = [m for m in pool.members if m.key() != newest.key()]
        partner = others[int(run.rng.integers(len(others)))]
        run.relink_calls += 1
        relinked, _ = run.relink(newest, partner)
        if pool.add(relinked):
            newest = relinked
    return run.report()


def brute_force(instance: QuboInstance) -> Solution:
    """Exact maximum by enumeration; ties go to the lexicographically smallest x."""
    n = instance.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force refuses n={n} > {BRUTE_FORCE_MAX_N}")
    q = instance.q
    best_val = -np.inf
    best_x = None
    chunk_bits = min(n, 16)
    # enumerate the low bits as a block; high bits in an outer loop
    low = np.array(list(itertools.product((0, 1), repeat=chunk_bits)), dtype=np.float64)
    high_bits = n - chunk_bits
    for hi in itertools.product((0, 1), repeat=high_bits):
        xs = np.hstack([np.tile(np.array(hi, dtype=np.float64), (low.shape[0], 1)), low])
        vals = np.einsum("ij,jk,ik->i", xs, q, xs)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = vals[i]
            best_x = xs[i]
    x = best_x.astype(np.int8)
    return Solution(x, evaluate(instance, x))
