"""Base vs transformed PRlocal on SOM-like MDP reductions (M=100, k=1)."""
import argparse

import numpy as np

from eigqubo.harness import derive_seed
from eigqubo.instances import generate_mdp, mdp_to_qubo
from eigqubo.solver import SolverConfig, prlocal
from eigqubo.spectral import TransformConfig, transform_q

parser = argparse.ArgumentParser()
parser.add_argument("--n", type=int, default=100)
parser.add_argument("--m", type=int, default=10)
parser.add_argument("--P", type=float, default=10.0)
parser.add_argument("--instances", type=int, default=10)
parser.add_argument("--evals", type=int, default=20_000)
args = parser.parse_args()

pcts = []
for seed in range(args.instances):
    q = mdp_to_qubo(generate_mdp(args.n, args.m, seed=seed), args.P)
    cfg = SolverConfig(seed=derive_seed(0, q.name, 100.0, 1, 0), max_evaluations=args.evals)
    base = prlocal(q, None, cfg).best_value_base
    trans = prlocal(q, transform_q(q, TransformConfig(100.0, 1)), cfg).best_value_base
    pct = 100.0 * (trans - base) / abs(base) if base else float("nan")
    pcts.append(pct)
    print(f"{q.name}: base {base:.1f} transformed {trans:.1f} ({pct:+.3f}%)")
print(f"mean improvement {np.nanmean(pcts):.4f}%")
