"""Numerical tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Default tolerance constants.

    Attributes
    ----------
    feas : float
        Feasibility band for set membership.
    lin : float
        Relative residual accepted from the dense linear solver.
    solver : float
        Stopping tolerance of the iterative solvers.
    cone : float
        Relative tolerance of the recession-cone test deciding whether a
        support function is finite for unbounded sets.
    max_condition : float
        Largest condition number ``solve_dense`` accepts.
    """

    feas: float = 1e-9
    lin: float = 1e-10
    solver: float = 1e-8
    cone: float = 1e-10
    max_condition: float = 1e12


DEFAULT_TOL = Tolerances()
