"""Command-line entry point: ``eigqubo <subcommand> ...``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from eigqubo.harness import (
    ConfigError,
    load_instances,
    parse_config,
    run_comparison,
    run_spectrum_report,
    write_comparison,
    write_manifest,
)
from eigqubo.instances import (
    FAMILIES,
    GeneratorSpec,
    ParseError,
    generate,
    generate_mdp,
    mdp_to_qubo,
    parse_mdplib,
    write_mdplib,
    write_orlib,
)
from eigqubo.landscape import WalkConfig, random_walk_autocorrelation, write_xi_grid_csv, xi_grid
from eigqubo.solver import SolverConfig, prlocal
from eigqubo.spectral import METHODS, ConvergenceError, TransformConfig, transform_q


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",")]


def _load_one(path: str, index: int):
    instances = load_instances(path)
    if not 0 <= index < len(instances):
        raise ValueError(f"{path} holds {len(instances)} instance(s); --index {index} is out of range")
    return instances[index]


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.txt")


def _args_entries(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def cmd_solve(args) -> int:
    inst = _load_one(args.instance, args.index)
    transformed = None
    if args.transform:
        transformed = transform_q(inst, TransformConfig(args.M, args.k), method=args.method)
    config = SolverConfig(
        seed=args.seed,
        time_limit=args.time_limit,
        max_evaluations=args.evals if (args.evals or args.time_limit) else 100_000,
        tabu_tenure=args.tabu_tenure,
        elite_size=args.elite_size,
        restart_stall=args.restart_stall,
    )
    report = prlocal(inst, transformed, config)
    print(f"{inst.name}: best {report.best_value_base!r} after {report.evaluations} evaluations")
    if args.report:
        out = Path(args.report)
        out.write_text(report.to_json(trajectory=not args.no_trajectory, timing=args.timing))
        write_manifest(_manifest_path(out), _args_entries(args), [("solver", args.seed)])
    return 0


def cmd_transform(args) -> int:
    inst = _load_one(args.instance, args.index)
    q2 = transform_q(inst, TransformConfig(args.M, args.k), method=args.method)
    text = write_orlib([q2])
    if args.output:
        out = Path(args.output)
        out.write_text(text)
        write_manifest(_manifest_path(out), _args_entries(args))
    else:
        sys.stdout.write(text)
    return 0


def cmd_eig(args) -> int:
    inst = _load_one(args.instance, args.index)
    report = run_spectrum_report(inst, args.outdir, bins=args.bins, method=args.method)
    print(f"{inst.name}: {report.summary_line()}")
    if args.outdir:
        write_manifest(Path(args.outdir) / f"{inst.name}_eig.manifest.txt", _args_entries(args))
    return 0


def cmd_landscape(args) -> int:
    inst = _load_one(args.instance, args.index)
    config = WalkConfig(args.walk_length, args.seed, args.max_lag)
    out = Path(args.output) if args.output else None
    if args.grid_M or args.grid_k:
        Ms = _floats(args.grid_M) if args.grid_M else [0.0]
        ks = _ints(args.grid_k) if args.grid_k else [0]
        grid = xi_grid(inst, Ms, ks, config, method=args.method)
        if out is None:
            print("k," + ",".join(f"M={M:g}" for M in Ms))
            for k, row in zip(ks, grid):
                print(f"{k}," + ",".join(f"{v:.6g}" for v in row))
        else:
            write_xi_grid_csv(grid, Ms, ks, out)
    else:
        stats = random_walk_autocorrelation(inst, config)
        if stats.zero_variance:
            print(f"{inst.name}: constant landscape (zero variance); xi undefined")
        else:
            print(f"{inst.name}: xi = {stats.xi:.6g}, rho(1) = {stats.rho[0]:.9g}")
        if out is not None:
            lines = ["lag,rho"] + [f"{d},{r!r}" for d, r in enumerate(stats.rho.tolist(), start=1)]
            out.write_text("\n".join(lines) + "\n")
    if out is not None:
        write_manifest(_manifest_path(out), _args_entries(args), [("walk", args.seed)])
    return 0


def cmd_sweep(args) -> int:
    config = parse_config(Path(args.config).read_text())
    if args.output:
        config.output = args.output
    if args.workers:
        config.workers = args.workers
    result = run_comparison(config)
    write_comparison(result, config, config.output)
    for cell in result.summary:
        print(
            f"M={cell.M:g} k={cell.k}: mean improvement {cell.mean_improvement_pct:.6g}% "
            f"({cell.matched_or_better}/{cell.instances} matched or better)"
        )
    for err in result.errors:
        print(f"error: {err.source}: {err.message}", file=sys.stderr)
    return 1 if result.errors else 0


def cmd_gen(args) -> int:
    out = Path(args.output)
    if args.family == "mdp":
        if args.m is None:
            raise ValueError("--m is required for the mdp family")
        text = write_mdplib(generate_mdp(args.n, args.m, args.low if args.low is not None else 0,
                                         args.high if args.high is not None else 9, args.seed))
    else:
        specs = [
            GeneratorSpec(args.n, args.density, args.low if args.low is not None else -100,
                          args.high if args.high is not None else 100, args.seed + i, args.family)
            for i in range(args.count)
        ]
        text = write_orlib([generate(s) for s in specs])
    out.write_text(text)
    write_manifest(_manifest_path(out), _args_entries(args), [("generator", args.seed)])
    return 0


def cmd_mdp2qubo(args) -> int:
    path = Path(args.instance)
    with path.open() as fh:
        mdp = parse_mdplib(fh, name=path.stem)
    text = write_orlib([mdp_to_qubo(mdp, args.P)])
    out = Path(args.output)
    out.write_text(text)
    write_manifest(_manifest_path(out), _args_entries(args))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eigqubo", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def instance_args(p):
        p.add_argument("instance", help="ORLIB-format instance file")
        p.add_argument("--index", type=int, default=0, help="instance to use from a multi-instance file")
        p.add_argument("--method", choices=METHODS, default="ql", help="eigensolver backend")

    p = sub.add_parser("solve", help="run PRlocal on one instance")
    instance_args(p)
    p.add_argument("--transform", action="store_true", help="search on Q' instead of Q")
    p.add_argument("--M", type=float, default=100.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--evals", type=int, default=None, help="evaluation budget (default 100000 when no time limit)")
    p.add_argument("--time-limit", type=float, default=None, help="wall-clock budget in seconds")
    p.add_argument("--tabu-tenure", type=int, default=None)
    p.add_argument("--elite-size", type=int, default=8)
    p.add_argument("--restart-stall", type=int, default=500)
    p.add_argument("--report", help="write the JSON run report here")
    p.add_argument("--no-trajectory", action="store_true")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("transform", help="write Q' in ORLIB triplet format")
    instance_args(p)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("eig", help="eigenvalue spectrum and histogram")
    instance_args(p)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_eig)

    p = sub.add_parser("landscape", help="random-walk correlation length (or a grid over M, k)")
    instance_args(p)
    p.add_argument("--walk-length", type=int, default=1_000_000)
    p.add_argument("--max-lag", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-M", help="comma-separated M values")
    p.add_argument("--grid-k", help="comma-separated k values")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("sweep", help="base vs transformed comparison from a config file")
    p.add_argument("config")
    p.add_argument("--output", help="override the config's output directory")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="generate benchmark-style instances")
    p.add_argument("--family", choices=FAMILIES + ("mdp",), default="orlib-like")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, help="subset size (mdp family)")
    p.add_argument("--density", type=float, default=0.1)
    p.add_argument("--low", type=int)
    p.add_argument("--high", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("mdp2qubo", help="penalty reduction of an MDPLIB instance")
    p.add_argument("instance")
    p.add_argument("--P", type=float, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_mdp2qubo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ParseError, ConfigError, ConvergenceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
