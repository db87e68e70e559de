"""Experiment runner: base vs transformed comparisons, sweeps, spectrum reports."""
from __future__ import annotations

import csv
import hashlib
import logging
import math
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from eigqubo.core import QuboInstance
from eigqubo.instances import GeneratorSpec, ParseError, generate, parse_orlib
from eigqubo.solver import SolverConfig, prlocal
from eigqubo.spectral import TransformConfig, full_spectrum, top_k_eigenpairs, transform_q, write_spectrum_csv

log = logging.getLogger(__name__)

COMPARISON_HEADER = ["instance", "M", "k", "base_best", "transformed_best", "improvement_abs", "improvement_pct"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    instances: list[str] = field(default_factory=list)
    generators: list[GeneratorSpec] = field(default_factory=list)
    Ms: list[float] = field(default_factory=lambda: [100.0])
    ks: list[int] = field(default_factory=lambda: [1])
    max_evaluations: int | None = 100_000
    time_limit: float | None = None
    repetitions: int = 1
    seed_base: int = 0
    output: str = "results"
    workers: int = 1
    tabu_tenure: int | None = None
    elite_size: int = 8
    restart_stall: int = 500
    method: str = "ql"

    def __post_init__(self):
        if not self.Ms or not self.ks:
            raise ConfigError("M and k grids must be non-empty")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if any(M < 0 for M in self.Ms) or any(k < 0 for k in self.ks):
            raise ConfigError("M and k values must be non-negative")

    def solver_config(self, seed: int) -> SolverConfig:
        return SolverConfig(
            seed=seed,
            time_limit=self.time_limit,
            max_evaluations=self.max_evaluations,
            tabu_tenure=self.tabu_tenure,
            elite_size=self.elite_size,
            restart_stall=self.restart_stall,
        )

    def to_text(self) -> str:
        """Flat key-value form accepted by :func:`parse_config`."""
        lines = []
        if self.instances:
            lines.append("instances = " + ", ".join(self.instances))
        for g in self.generators:
            lines.append(
                f"generate = {g.family} n={g.n} density={g.density!r} low={g.coeff_low} "
                f"high={g.coeff_high} seed={g.seed}"
            )
        lines += [
            "M = " + ", ".join(repr(float(M)) for M in self.Ms),
            "k = " + ", ".join(str(k) for k in self.ks),
            f"evaluations = {self.max_evaluations or ''}",
            f"time_limit = {self.time_limit if self.time_limit else ''}",
            f"repetitions = {self.repetitions}",
            f"seed_base = {self.seed_base}",
            f"output = {self.output}",
            f"workers = {self.workers}",
            f"tabu_tenure = {self.tabu_tenure or ''}",
            f"elite_size = {self.elite_size}",
            f"restart_stall = {self.restart_stall}",
            f"method = {self.method}",
        ]
        return "\n".join(lines) + "\n"


def _parse_generator(value: str, lineno: int) -> list[GeneratorSpec]:
    tokens = value.split()
    if not tokens:
        raise ConfigError(f"line {lineno}: empty generate entry")
    fields = {"family": tokens[0]}
    for tok in tokens[1:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {tok!r}")
        fields[key] = val
    count = int(fields.pop("count", 1))
    try:
        n = int(fields.pop("n"))
        density = float(fields.pop("density", 0.1))
        low = int(fields.pop("low", -100))
        high = int(fields.pop("high", 100))
        seed = int(fields.pop("seed", 0))
        family = fields.pop("family")
        if fields:
            raise ConfigError(f"line {lineno}: unknown generator keys {sorted(fields)}")
        return [GeneratorSpec(n, density, low, high, seed + i, family) for i in range(count)]
    except KeyError as exc:
        raise ConfigError(f"line {lineno}: generator needs {exc.args[0]}=") from None
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: {exc}") from None


def parse_config(text: str) -> ExperimentConfig:
    """Read the flat ``key = value`` format; ``#`` starts a comment.

    ``generate`` may repeat; list values are comma separated.
    """
    kw: dict = {"generators": []}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key != "generate" and key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        try:
            if key == "instances":
                kw["instances"] = [v.strip() for v in value.split(",") if v.strip()]
            elif key == "generate":
                kw["generators"].extend(_parse_generator(value, lineno))
            elif key == "M":
                kw["Ms"] = [float(v) for v in value.split(",")]
            elif key == "k":
                kw["ks"] = [int(v) for v in value.split(",")]
            elif key == "evaluations":
                kw["max_evaluations"] = int(value) if value else None
            elif key == "time_limit":
                kw["time_limit"] = float(value) if value else None
            elif key == "tabu_tenure":
                kw["tabu_tenure"] = int(value) if value else None
            elif key in ("repetitions", "seed_base", "workers", "elite_size", "restart_stall"):
                kw[key] = int(value)
            elif key in ("output", "method"):
                kw[key] = value
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from None
    return ExperimentConfig(**kw)


def derive_seed(seed_base: int, name: str, M: float, k: int, repetition: int) -> int:
    digest = hashlib.blake2b(f"{seed_base}|{name}|{float(M)!r}|{int(k)}|{repetition}".encode(), digest_size=8)
    return int.from_bytes(digest.digest(), "little")


@dataclass
class ComparisonRow:
    instance: str
    M: float
    k: int
    base_best: float
    transformed_best: float
    base_runs: list[float] = field(default_factory=list)
    transformed_runs: list[float] = field(default_factory=list)
    base_evaluations: list[int] = field(default_factory=list)
    transformed_evaluations: list[int] = field(default_factory=list)
    seeds: list[int] = field(default_factory=list)

    @property
    def improvement_abs(self) -> float:
        return self.transformed_best - self.base_best

    @property
    def pct_defined(self) -> bool:
        return self.base_best != 0.0

    @property
    def improvement_pct(self) -> float:
        if not self.pct_defined:
            return float("nan")
        return 100.0 * (self.transformed_best - self.base_best) / abs(self.base_best)

    def csv_row(self) -> list[str]:
        pct = repr(self.improvement_pct) if self.pct_defined else "undefined"
        return [
            self.instance,
            repr(float(self.M)),
            str(self.k),
            repr(self.base_best),
            repr(self.transformed_best),
            repr(self.improvement_abs),
            pct,
        ]


@dataclass
class ErrorRecord:
    source: str
    message: str


@dataclass
class CellSummary:
    M: float
    k: int
    mean_improvement_pct: float
    mean_improvement_abs: float
    matched_or_better: int
    instances: int


@dataclass
class ComparisonResult:
    rows: list[ComparisonRow]
    summary: list[CellSummary]
    errors: list[ErrorRecord]


def load_instances(path) -> list[QuboInstance]:
    path = Path(path)
    with path.open() as fh:
        return parse_orlib(fh, name=path.stem)


def _collect(config: ExperimentConfig) -> tuple[list[QuboInstance], list[ErrorRecord]]:
    instances, errors = [], []
    for src in config.instances:
        try:
            instances.extend(load_instances(src))
        except (OSError, ParseError) as exc:
            errors.append(ErrorRecord(src, str(exc)))
    for spec in config.generators:
        instances.append(generate(spec))
    return instances, errors


def _solve_cell(instance: QuboInstance, transformed: QuboInstance, M: float, k: int, config: ExperimentConfig) -> ComparisonRow:
    row = ComparisonRow(instance.name, M, k, 0.0, 0.0)
    for rep in range(config.repetitions):
        seed = derive_seed(config.seed_base, instance.name, M, k, rep)
        scfg = config.solver_config(seed)
        base = prlocal(instance, None, scfg)
        trans = prlocal(instance, transformed, scfg)
        row.seeds.append(seed)
        row.base_runs.append(base.best_value_base)
        row.transformed_runs.append(trans.best_value_base)
        row.base_evaluations.append(base.evaluations)
        row.transformed_evaluations.append(trans.evaluations)
    row.base_best = float(np.mean(row.base_runs))
    row.transformed_best = float(np.mean(row.transformed_runs))
    return row


def _summarize(rows: Sequence[ComparisonRow], config: ExperimentConfig) -> list[CellSummary]:
    out = []
    for k in config.ks:
        for M in config.Ms:
            cell = [r for r in rows if r.M == M and r.k == k]
            if not cell:
                continue
            pcts = [r.improvement_pct for r in cell if r.pct_defined]
            out.append(
                CellSummary(
                    M,
                    k,
                    float(np.mean(pcts)) if pcts else float("nan"),
                    float(np.mean([r.improvement_abs for r in cell])),
                    sum(r.transformed_best >= r.base_best - 1e-9 * max(1.0, abs(r.base_best)) for r in cell),
                    len(cell),
                )
            )
    return out


def run_comparison(config: ExperimentConfig) -> ComparisonResult:
    """Solve every instance with and without the transform for each (M, k) cell.

    Base and transformed runs of a cell share the derived seed and budget;
    all best values are measured on the original matrix (offset included).
    """
    instances, errors = _collect(config)
    jobs = []
    for inst in instances:
        kmax = min(max(config.ks), inst.n)
        try:
            summary = None
            if kmax > 0 and any(M > 0 for M in config.Ms):
                summary = top_k_eigenpairs(inst, kmax, config.method)
            for k in config.ks:
                for M in config.Ms:
                    if k > inst.n:
                        errors.append(ErrorRecord(inst.name, f"k={k} exceeds n={inst.n}"))
                        continue
                    jobs.append((inst, transform_q(inst, TransformConfig(M, k), summary), M, k))
        except (ValueError, ArithmeticError) as exc:
            errors.append(ErrorRecord(inst.name, str(exc)))
    rows: list[ComparisonRow] = []
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_solve_cell, inst, t, M, k, config) for inst, t, M, k in jobs]
            for (inst, _, M, k), fut in zip(jobs, futures):
                try:
                    rows.append(fut.result())
                except (ValueError, ArithmeticError) as exc:
                    errors.append(ErrorRecord(f"{inst.name} M={M:g} k={k}", str(exc)))
    else:
        for inst, t, M, k in jobs:
            try:
                rows.append(_solve_cell(inst, t, M, k, config))
            except (ValueError, ArithmeticError) as exc:
                errors.append(ErrorRecord(f"{inst.name} M={M:g} k={k}", str(exc)))
            log.info("%s M=%g k=%d done", inst.name, M, k)
    rows.sort(key=lambda r: (r.instance, r.k, r.M))
    return ComparisonResult(rows, _summarize(rows, config), errors)


def versions() -> dict[str, str]:
    import numba

    from eigqubo import __version__

    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "numba": numba.__version__,
        "eigqubo": __version__,
    }


def write_manifest(path, entries: dict | str, seeds: Sequence[tuple[str, int]] = ()) -> None:
    """Plain-text manifest: the run's settings, then versions and seeds as comments."""
    lines = []
    if isinstance(entries, str):
        lines.append(entries.rstrip("\n"))
    else:
        lines += [f"{k} = {v}" for k, v in entries.items()]
    lines.append(f"# argv: {' '.join(sys.argv)}")
    lines += [f"# version {k}: {v}" for k, v in versions().items()]
    lines += [f"# seed {label}: {seed}" for label, seed in seeds]
    Path(path).write_text("\n".join(lines) + "\n")


def write_comparison(result: ComparisonResult, config: ExperimentConfig, outdir) -> None:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with (outdir / "comparison.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COMPARISON_HEADER)
        w.writerows(r.csv_row() for r in result.rows)
    with (outdir / "runs.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["instance", "M", "k", "repetition", "seed", "base_best", "transformed_best", "base_evaluations", "transformed_evaluations"])
        for r in result.rows:
            for rep, seed in enumerate(r.seeds):
                w.writerow([r.instance, repr(float(r.M)), r.k, rep, seed, repr(r.base_runs[rep]),
                            repr(r.transformed_runs[rep]), r.base_evaluations[rep], r.transformed_evaluations[rep]])
    with (outdir / "improvement_table.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k"] + [f"M={M:g}" for M in config.Ms])
        cells = {(c.k, c.M): c for c in result.summary}
        for k in config.ks:
            w.writerow([k] + [repr(cells[(k, M)].mean_improvement_pct) if (k, M) in cells else "" for M in config.Ms])
    with (outdir / "summary.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["M", "k", "mean_improvement_pct", "mean_improvement_abs", "matched_or_better", "instances"])
        for c in result.summary:
            w.writerow([repr(float(c.M)), c.k, repr(c.mean_improvement_pct), repr(c.mean_improvement_abs), c.matched_or_better, c.instances])
    if result.errors:
        with (outdir / "errors.csv").open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["source", "message"])
            w.writerows([e.source, e.message] for e in result.errors)
    seeds = [(f"{r.instance} M={r.M:g} k={r.k} rep={i}", s) for r in result.rows for i, s in enumerate(r.seeds)]
    write_manifest(outdir / "manifest.txt", config.to_text(), seeds)


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray  # decreasing signed order
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    @property
    def dominance_ratio(self) -> float:
        """Largest |lambda| over the second largest (inf when the latter is 0)."""
        a = np.sort(np.abs(self.eigenvalues))[::-1]
        if a.size < 2 or a[1] == 0.0:
            return math.inf
        return float(a[0] / a[1])

    def summary_line(self) -> str:
        return f"max |lambda| = {self.max_abs:.6g}; ratio to second largest = {self.dominance_ratio:.6g}"


def run_spectrum_report(instance: QuboInstance, outdir=None, bins: int = 50, method: str = "ql") -> SpectrumReport:
    """Full spectrum and an equal-width histogram over [min lambda, max lambda]."""
    w = full_spectrum(instance, method)
    lo, hi = float(w.min()), float(w.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(w, bins=bins, range=(lo, hi))
    report = SpectrumReport(w, edges, counts)
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        write_spectrum_csv(w, outdir / f"{instance.name}_eigenvalues.csv")
        with (outdir / f"{instance.name}_histogram.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_left", "bin_right", "count"])
            for left, right, c in zip(edges[:-1], edges[1:], counts):
                writer.writerow([repr(float(left)), repr(float(right)), int(c)])
    return report
