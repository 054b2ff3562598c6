"""One-dimensional dynamic debonding: a damped wave on a growing domain plus Griffith's criterion.

The main entry points are :func:`debond.solver.solve` for the
representation-formula solver, :func:`debond.oracle.fd_solve` for the
independent finite-difference check and the presets in :mod:`debond.problem`.
"""

from .exceptions import (ConvergenceError, DataError, DebondError, DomainError, RangeError,
                         ResolutionError)
from .problem import PRESETS, ProblemData, preset, validate
from .solver import Solution, SolverConfig, solve

__all__ = [
    "ConvergenceError",
    "DataError",
    "DebondError",
    "DomainError",
    "RangeError",
    "ResolutionError",
    "PRESETS",
    "ProblemData",
    "preset",
    "validate",
    "Solution",
    "SolverConfig",
    "solve",
]

__version__ = "0.1.0"
