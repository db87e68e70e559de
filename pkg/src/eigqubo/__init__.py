"""Eigenvalue-guided preprocessing and heuristics for QUBO maximization."""

from eigqubo.core import FlipGainState, QuboInstance, Solution, apply_flip, evaluate, init_gains
from eigqubo.spectral import (
    ConvergenceError,
    EigenPair,
    SpectralSummary,
    TransformConfig,
    full_spectrum,
    top_k_eigenpairs,
    transform_q,
)
from eigqubo.solver import RunReport, SolverConfig, brute_force, path_relink, prlocal, tabu_search

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "EigenPair",
    "FlipGainState",
    "QuboInstance",
    "RunReport",
    "Solution",
    "SolverConfig",
    "SpectralSummary",
    "TransformConfig",
    "apply_flip",
    "brute_force",
    "evaluate",
    "full_spectrum",
    "init_gains",
    "path_relink",
    "prlocal",
    "tabu_search",
    "top_k_eigenpairs",
    "transform_q",
]
