"""Eigenvalue histograms for an ORLIB-like instance and a SOM-like MDP reduction."""
import argparse

from eigqubo.harness import run_spectrum_report
from eigqubo.instances import GeneratorSpec, generate, generate_mdp, mdp_to_qubo

parser = argparse.ArgumentParser()
parser.add_argument("--n", type=int, default=1000)
parser.add_argument("--out", default="results/spectra")
parser.add_argument("--method", choices=("ql", "lapack"), default="ql")
args = parser.parse_args()

orlib = generate(GeneratorSpec(args.n, 0.1, seed=1), name=f"orlib_like_{args.n}")
som = mdp_to_qubo(generate_mdp(100, 10, seed=21, name="som_like_n100_m10"), P=10)
for inst in (orlib, som):
    report = run_spectrum_report(inst, args.out, method=args.method)
    print(f"{inst.name}: {report.summary_line()}")
