"""(M, k) sensitivity sweep at desk scale, written as a Table-1-style CSV.

    python scripts/sensitivity_sweep.py --n 200 --instances 5 --evals 20000 --out results/sweep
"""
import argparse
import logging

from eigqubo.harness import ExperimentConfig, run_comparison, write_comparison
from eigqubo.instances import FAMILIES, GeneratorSpec

parser = argparse.ArgumentParser()
parser.add_argument("--n", type=int, default=200)
parser.add_argument("--instances", type=int, default=5)
parser.add_argument("--family", choices=FAMILIES, default="orlib-like")
parser.add_argument("--density", type=float, default=0.1)
parser.add_argument("--evals", type=int, default=20_000)
parser.add_argument("--repetitions", type=int, default=1)
parser.add_argument("--workers", type=int, default=1)
parser.add_argument("--out", default="results/sweep")
args = parser.parse_args()

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
config = ExperimentConfig(
    generators=[GeneratorSpec(args.n, args.density, seed=s, family=args.family) for s in range(args.instances)],
    Ms=[100.0, 200.0, 300.0, 400.0, 500.0],
    ks=[1, 2, 5, 10, 20, 25],
    max_evaluations=args.evals,
    repetitions=args.repetitions,
    workers=args.workers,
    output=args.out,
)
result = run_comparison(config)
write_comparison(result, config, args.out)
print("k    " + "".join(f"M={M:<9g}" for M in config.Ms))
cells = {(c.k, c.M): c.mean_improvement_pct for c in result.summary}
for k in config.ks:
    print(f"{k:<5d}" + "".join(f"{cells[(k, M)]:<11.4f}" for M in config.Ms))
