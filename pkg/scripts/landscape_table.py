"""Correlation-length grid over (M, k) averaged across generated instances."""
import argparse

import numpy as np

from eigqubo.landscape import WalkConfig, write_xi_grid_csv, xi_grid
from eigqubo.instances import GeneratorSpec, generate

parser = argparse.ArgumentParser()
parser.add_argument("--n", type=int, default=500)
parser.add_argument("--instances", type=int, default=10)
parser.add_argument("--walk-length", type=int, default=1_000_000)
parser.add_argument("--out", default="results/xi_grid.csv")
args = parser.parse_args()

Ms = [100.0, 200.0, 300.0, 400.0, 500.0]
ks = [1, 2, 5, 10, 20, 25]
grids = []
for seed in range(args.instances):
    inst = generate(GeneratorSpec(args.n, 0.1, seed=seed))
    grids.append(xi_grid(inst, Ms, ks, WalkConfig(args.walk_length, seed, 100), method="lapack"))
    print(f"instance {seed} done")
mean = np.mean(grids, axis=0)
write_xi_grid_csv(mean, Ms, ks, args.out)
for k, row in zip(ks, mean):
    print(f"{k:<4d}" + " ".join(f"{v:8.2f}" for v in row))
