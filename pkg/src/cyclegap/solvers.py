"""Cycles and the gap displacement, computed two independent ways.

``km_fixed_point`` looks for a cycle directly, as a fixed point of
``x -> P_C(shift x)``. ``dr_gap_solve`` never touches cycles: it finds the
unique balanced ``d`` with ``0 in -inverse_difference(d) + subdiff sigma_C(d)``
by Douglas-Rachford splitting. For every cycle ``z``, ``difference(z) = d``,
which is what lets the two routes check each other.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .hilbert import LinearSolver, inner_product, norm

log = logging.getLogger(__name__)


@dataclass
class CycleResult:
    z: np.ndarray
    fixed_point_residual: float
    iterations: int
    converged: bool

    def to_dict(self):
        return {
            "z": self.z.tolist(),
            "fixed_point_residual": self.fixed_point_residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


@dataclass
class GapResult:
    """Output of :func:`dr_gap_solve`.

    ``d`` is the gap displacement, ``e = inverse_difference(d)`` and
    ``v = -shift^{m-1}(d)`` the gap vector. ``y_residual = ||average(d)||``
    measures balance and ``D_residual = max(0, sigma_C(d) + ||d||^2/2)``
    membership in the displacement set.
    """

    d: np.ndarray
    e: np.ndarray
    v: np.ndarray
    y_residual: float
    D_residual: float
    iterations: int
    converged: bool
    splitting_residual: float = math.nan

    def to_dict(self):
        return {
            "d": self.d.tolist(),
            "e": self.e.tolist(),
            "v": self.v.tolist(),
            "y_residual": self.y_residual,
            "D_residual": self.D_residual,
            "splitting_residual": self.splitting_residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class DMembership:
    sigma: float
    value: float
    in_D: bool


def km_fixed_point(ops, C, x0=None, alpha=0.5, max_iters=100_000, tol=DEFAULT_TOL.solver):
    """Krasnosel'skii-Mann iteration for a cycle of projections.

    Iterates ``x <- (1 - alpha) x + alpha T x`` with ``T = P_C o shift``
    until ``||x - T x|| <= tol`` (which also bounds the step length).

    Parameters
    ----------
    ops : CycleOperators
    C : ProductSet
    x0 : (m, n) array_like, optional
        Starting point, zero by default.
    alpha : float
        Relaxation in ``(0, 1)``.

    Returns
    -------
    CycleResult
        On convergence ``z = T x`` for the last iterate ``x``, so ``z`` lies
        in ``C`` and its residual ``||z - T z||`` is at most ``||x - T x||``.
        When ``max_iters`` is exhausted ``converged`` is False and ``z`` is
        the last iterate.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    x = ops.zeros() if x0 is None else ops.check(x0).copy()

    def T(p):
        return C.project(ops.shift(p))

    for it in range(max_iters + 1):
        tx = T(x)
        res = norm(x - tx)
        if res <= tol:
            z = tx
            return CycleResult(z, norm(z - T(z)), it, True)
        if it == max_iters:
            break
        x = x + alpha * (tx - x)
    log.info("km_fixed_point: no convergence after %d iterations (residual %.3e)", max_iters, res)
    return CycleResult(x, res, max_iters, False)


def gap_vector(ops, d):
    """``v = -shift^{m-1}(d)``; equivalently ``d = -shift(v)``."""
    return -ops.shift(d, ops.m - 1)


def support_prox(C, x, lam):
    """Resolvent of ``lam * subdiff sigma_C`` at ``x``: ``x - lam P_C(x / lam)``."""
    return x - lam * C.project(x / lam)


def membership_D(ops, C, y, tol=DEFAULT_TOL.feas):
    """Evaluate ``sigma_C(y) + ||y||^2/2`` and membership in the displacement set.

    ``in_D`` requires ``y`` balanced (``||average(y)|| <= tol``) and the value
    at most ``tol``; an infinite support value is never in the set.
    """
    y = ops.check(y)
    sigma = C.support(y)
    value = sigma + 0.5 * inner_product(y, y)
    in_D = norm(ops.average(y)) <= tol and value <= tol
    return DMembership(sigma, value, bool(in_D))


def _linear_part(ops, lam, tol):
    # M = P_Y (-Q) P_Y; <Mx, x> = ||P_Y x||^2 / 2, so I + lam M is invertible
    def M(x):
        return ops.project_balanced(-ops.inverse_difference(ops.project_balanced(x)))

    return LinearSolver(np.eye(ops.m * ops.n) + lam * ops.as_matrix(M), tol)


def dr_gap_solve(ops, C, lam=1.0, max_iters=100_000, tol=DEFAULT_TOL.solver, w0=None,
                 inner_tol=None, linear_tol=DEFAULT_TOL):
    """Gap displacement by Douglas-Rachford splitting.

    Finds the zero of ``A1 + A2`` on X with ``A1 = subdiff sigma_C`` and
    ``A2 = N_Y + M``, ``M = P_Y o (-inverse_difference) o P_Y``, ``Y`` the
    balanced subspace. The resolvent of ``lam A1`` is :func:`support_prox`;
    the resolvent of ``lam A2`` is ``(I + lam M)^{-1} P_Y``, solved with a
    factorization computed once.

    Parameters
    ----------
    lam : float
        Step size, positive.
    tol : float
        Required bound on ``y_residual`` and ``D_residual``.
    w0 : (m, n) array_like, optional
        Starting point of the governing sequence (zero by default). The
        limit does not depend on it.
    inner_tol : float, optional
        Stopping tolerance on ``||x_k - y_k||``, default ``tol / 100``.

    Returns
    -------
    GapResult
        ``d`` is taken from the ``A1`` resolvent, so it lies in the domain
        of ``sigma_C`` even for unbounded sets; balance holds to the
        reported ``y_residual``.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    inner_tol = tol * 1e-2 if inner_tol is None else inner_tol
    solver = _linear_part(ops, lam, linear_tol)
    w = ops.zeros() if w0 is None else ops.check(w0).copy()
    shape = ops.shape
    res = math.inf
    it = 0
    for it in range(1, max_iters + 1):
        x = solver.solve(np.ravel(ops.project_balanced(w))).reshape(shape)
        y = support_prox(C, 2.0 * x - w, lam)
        w = w + (y - x)
        res = norm(y - x)
        if res <= inner_tol:
            break
    d = y
    e = ops.inverse_difference(d)
    y_res = norm(ops.average(d))
    D_res = max(0.0, C.support(d) + 0.5 * inner_product(d, d))
    converged = res <= inner_tol and y_res <= tol and D_res <= tol
    if not converged:
        log.info("dr_gap_solve: not converged (splitting %.3e, balance %.3e, D %.3e)",
                 res, y_res, D_res)
    return GapResult(d, e, gap_vector(ops, d), y_res, D_res, it, converged, res)


def saddle_residual(ops, C, d, e, probes, tol=DEFAULT_TOL.solver):
    """Largest value of ``sigma_C(d) + <Sx - d, e> - sigma_C(Sx)`` over probes.

    ``S = difference``. Probes with ``sigma_C(Sx) = inf`` are skipped since
    the inequality holds trivially there. Because ``difference(e) = d`` is a
    precondition, ``d`` stands in for ``difference(e)`` in the formula, which
    keeps ``sigma_C`` evaluated on the domain point ``d``.

    Returns ``-inf`` when every probe is skipped.
    """
    d = ops.check(d)
    e = ops.check(e)
    gap = norm(ops.difference(e) - d)
    if gap > tol:
        raise ValueError(f"difference(e) differs from d by {gap:.3e}")
    sigma_d = C.support(d)
    worst = -math.inf
    for x in probes:
        sx = ops.difference(x)
        sigma_x = C.support(sx)
        if math.isinf(sigma_x):
            continue
        worst = max(worst, sigma_d + inner_product(sx - d, e) - sigma_x)
    return worst


def default_starts(ops, count=4, seed=0, scale=5.0):
    """Zero plus ``count`` seeded Gaussian starting points."""
    rng = np.random.default_rng(seed)
    return [ops.zeros()] + [scale * rng.standard_normal(ops.shape) for _ in range(count)]

