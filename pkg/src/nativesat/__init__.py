"""Incremental SAT modelling and solving kept alive across calls."""

from .solver import SAT, UNSAT, Solver, SolverStats, SolverStateError, SolverTimeout

__all__ = ["SAT", "UNSAT", "Solver", "SolverStats", "SolverStateError", "SolverTimeout"]
