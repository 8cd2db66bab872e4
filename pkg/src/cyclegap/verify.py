"""Numerical checks of the cycle / gap-vector theory.

Each ``*_check`` function returns a :class:`CheckRecord`; a record passes
iff its measured violation is at most its tolerance, and carries witness
points whenever it fails.
"""

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL
from .exceptions import ConsistencyError
from .hilbert import inner_product, norm
from .solvers import km_fixed_point, saddle_residual, default_starts

log = logging.getLogger(__name__)

# P1-residual band excluded from equivalence probes: inside it the three
# conditions are decided by tolerances rather than by the geometry
EQUIVALENCE_GUARD = 1e-3
IDENTITY_TOL = 1e-10


@dataclass
class CheckRecord:
    name: str
    passed: bool
    violation: float
    tolerance: float
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "violation": self.violation,
            "tolerance": self.tolerance,
            "witnesses": [np.asarray(w).tolist() for w in self.witnesses],
            "details": self.details,
        }


def _record(name, violation, tolerance, witnesses=(), details=None, started=None):
    violation = float(violation)
    passed = violation <= tolerance
    witnesses = list(witnesses) if not passed else []
    if not passed and not witnesses:
        witnesses = [[]]
    wall = time.perf_counter() - started if started is not None else 0.0
    return CheckRecord(name, passed, violation, float(tolerance), witnesses, details or {}, wall)


def _failed_precondition(name, tolerance, reason, witness, started):
    rec = _record(name, math.inf, tolerance, [witness], {"error": reason}, started)
    log.info("%s: %s", name, reason)
    return rec


# --- cycles -----------------------------------------------------------------

@dataclass(frozen=True)
class CycleCheck:
    is_cycle: bool
    residual: float
    difference_residual: float


def check_cycle(ops, C, z, d, tol):
    """Decide whether ``z`` is a cycle in two ways that must agree.

    Difference form: every ``z_i`` in ``C_i`` and ``z_i - z_{i+1} = d_{i+1}``
    for ``i = 1..m-1``. Fixed-point form: ``||z - P_C(shift z)|| <= tol``.

    Returns
    -------
    CycleCheck
        ``residual`` is the fixed-point residual, ``difference_residual``
        the worst violation of the difference form.

    Raises
    ------
    ConsistencyError
        If one form accepts ``z`` while the other's residual exceeds
        ``10 * tol``.
    """
    z = ops.check(z)
    d = ops.check(d)
    membership = max(float(b.distance(z[i])) for i, b in enumerate(C.blocks))
    steps = max(norm(z[i] - z[i + 1] - d[i + 1]) for i in range(ops.m - 1))
    diff_res = max(membership, steps)
    fp_res = norm(z - C.project(ops.shift(z)))
    diff_ok, fp_ok = diff_res <= tol, fp_res <= tol
    if (diff_ok and fp_res > 10 * tol) or (fp_ok and diff_res > 10 * tol):
        raise ConsistencyError(
            f"cycle tests disagree: difference form {diff_res:.3e}, fixed-point form {fp_res:.3e}"
        )
    return CycleCheck(diff_ok and fp_ok, fp_res, diff_res)


def compute_cycles(ops, C, starts=None, alpha=0.5, max_iters=100_000, tol=DEFAULT_TOL.solver, seed=0):
    """Run :func:`km_fixed_point` from each start (zero + 4 seeded by default)."""
    if starts is None:
        starts = default_starts(ops, seed=seed)
    return [km_fixed_point(ops, C, x0, alpha, max_iters, tol) for x0 in starts]


def cycle_through(ops, zeta, v):
    """The point ``w`` with ``w_m = zeta`` and ``w_{i+1} = w_i + v_i``."""
    w = np.empty(ops.shape)
    w[-1] = zeta
    for i in range(ops.m - 2, -1, -1):
        w[i] = w[i + 1] - v[i]
    return w


def cycle_check(ops, C, cycle_results, gap, tol=1e-7, agreement_tol=1e-6):
    """Every computed cycle passes :func:`check_cycle` against ``gap.d``,
    advances by the gap vector, and has ``difference(z)`` within
    ``agreement_tol`` of ``d``; the gap vector's blocks sum to zero."""
    t0 = time.perf_counter()
    v_sum = norm(np.sum(gap.v, axis=0))
    worst, witnesses, rows = 0.0, [], []
    for res in cycle_results:
        if not res.converged:
            worst = math.inf
            witnesses.append(res.z)
            rows.append({"converged": False, "fixed_point_residual": res.fixed_point_residual})
            continue
        z = res.z
        try:
            cc = check_cycle(ops, C, z, gap.d, tol)
        except ConsistencyError as exc:
            worst = math.inf
            witnesses.append(z)
            rows.append({"error": str(exc)})
            continue
        advance = max(norm(z[i + 1] - z[i] - gap.v[i]) for i in range(ops.m - 1))
        agreement = norm(ops.difference(z) - gap.d)
        viol = max(cc.residual, cc.difference_residual, advance,
                   agreement * tol / agreement_tol)
        if not cc.is_cycle:
            viol = max(viol, 10 * tol)
        if viol > tol:
            witnesses.append(z)
        worst = max(worst, viol)
        rows.append({"fixed_point_residual": cc.residual, "difference_residual": cc.difference_residual,
                     "advance_residual": advance, "solver_agreement": agreement})
    if v_sum > IDENTITY_TOL:
        worst = max(worst, math.inf)
        witnesses.append(gap.v)
    return _record("cycle", worst, tol, witnesses,
                   {"cycles": rows, "gap_vector_sum": v_sum}, t0)


# --- equivalence of the cycle characterizations -------------------------------

def classify(ops, C, z, d, tol):
    """The three conditions on ``z in C``: fixed point of ``P_C o shift``,
    ``difference(z)`` in the displacement set, ``difference(z) = d``."""
    sz = ops.difference(z)
    p1 = norm(z - C.project(ops.shift(z))) <= tol
    p3 = C.support(sz) + 0.5 * inner_product(sz, sz) <= tol
    p5 = norm(sz - d) <= tol
    return p1, p3, p5


def equivalence_probes(ops, C, cycles, gap, count=100, seed=0, tol=1e-7):
    """Cycles, perturbed cycles and generic feasible points, all in ``C``.

    Cycles are rebuilt from their last block along the gap vector so that
    ``difference(z) = d`` up to rounding. Non-cycle probes whose fixed-point
    residual falls between ``tol`` and :data:`EQUIVALENCE_GUARD` are dropped.
    """
    rng = np.random.default_rng(seed)
    base = [cycle_through(ops, c.z[-1], gap.v) for c in cycles if c.converged]
    probes = list(base)
    n_cycles = len(probes)
    feasible = C.sample_points(4 * count, seed=seed + 1)
    candidates = []
    for k in range(4 * count):
        if base and k % 2 == 0:
            z = base[k % len(base)]
            delta = rng.standard_normal(ops.shape)
            delta *= rng.uniform(0.1, 1.0, (ops.m, 1)) / np.maximum(
                np.linalg.norm(delta, axis=1, keepdims=True), 1e-300)
            candidates.append(C.project(z + delta))
        else:
            candidates.append(feasible[k])
    for z in candidates:
        if len(probes) >= count:
            break
        res = norm(z - C.project(ops.shift(z)))
        if tol < res < EQUIVALENCE_GUARD:
            continue
        probes.append(z)
    return probes, n_cycles


def check_pthm_equivalence(ops, C, d, points, tol=1e-7):
    """The three cycle characterizations classify every probe identically,
    and ``<Sz, z> = -||Sz||^2 / 2`` holds on each probe."""
    t0 = time.perf_counter()
    d = ops.check(d)
    bad, counts, worst_identity = [], {"all_true": 0, "all_false": 0}, 0.0
    for z in points:
        z = ops.check(z)
        flags = classify(ops, C, z, d, tol)
        sz = ops.difference(z)
        identity = abs(inner_product(sz, z) + 0.5 * inner_product(sz, sz)) / (1.0 + inner_product(z, z))
        worst_identity = max(worst_identity, identity)
        if len(set(flags)) > 1 or identity > IDENTITY_TOL:
            bad.append(z)
        elif flags[0]:
            counts["all_true"] += 1
        else:
            counts["all_false"] += 1
    details = dict(counts, probes=len(points), disagreements=len(bad),
                   norm_identity_violation=worst_identity)
    return _record("pthm", len(bad), 0, bad, details, t0)


# --- the set identity -------------------------------------------------------

def _zeta_candidates(C_last, rng, samples, grid_step, radius, extra):
    pts = []
    if samples:
        pts.append(C_last.sample_points(samples, seed=int(rng.integers(2**31)), radius=radius))
    if C_last.dim <= 2 and grid_step:
        lo, hi = C_last.bounding_box(radius)
        axes = [np.arange(a - grid_step, b + 2 * grid_step, grid_step) for a, b in zip(lo, hi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, C_last.dim)
        # pulling grid points onto the set also populates its boundary
        pts.append(C_last.project(grid))
    pts.append(np.asarray(extra, dtype=float).reshape(-1, C_last.dim))
    return np.unique(np.concatenate(pts), axis=0)


def translate_offsets(ops, v):
    """Row ``k`` is ``sum_{i=k}^{m-1} v_i`` (zero for the last block)."""
    offs = np.zeros(ops.shape)
    for k in range(ops.m - 2, -1, -1):
        offs[k] = offs[k + 1] + v[k]
    return offs


def verify_geometry(ops, C, gap, cycles=None, samples=1000, seed=0, tol=None,
                    grid_step=0.05, radius=5.0):
    """Check ``{z_m : z a cycle} = C_m n (C_{m-1} + v_{m-1}) n ... n (C_1 + v_1 + ... + v_{m-1})``.

    Forward: the last block of every computed cycle lies in each translate.
    Reverse: candidate points of ``C_m`` (grid for ``n <= 2``, random
    samples, computed cycle ends) lying in every translate generate
    ``w = cycle_through(zeta, v)``, which must satisfy ``difference(w) = d``
    and be a fixed point of ``P_C o shift``.
    """
    t0 = time.perf_counter()
    tol = DEFAULT_TOL.solver + DEFAULT_TOL.feas if tol is None else tol
    if not gap.converged:
        return _failed_precondition("geometry", tol, "gap solver did not converge", gap.d, t0)
    if cycles is None:
        cycles = compute_cycles(ops, C, seed=seed)
    offs = translate_offsets(ops, gap.v)

    def translate_distance(zeta):
        # distance of zeta to C_k + offs_k for every k (offs_m = 0 gives C_m)
        return max(float(b.distance(zeta - offs[k])) for k, b in enumerate(C.blocks))

    forward, witnesses = 0.0, []
    ends = []
    for c in cycles:
        if not c.converged:
            forward = math.inf
            witnesses.append(c.z)
            continue
        ends.append(c.z[-1])
        dist = translate_distance(c.z[-1])
        if dist > tol:
            witnesses.append(c.z[-1])
        forward = max(forward, dist)

    rng = np.random.default_rng(seed)
    cands = _zeta_candidates(C.blocks[-1], rng, samples, grid_step, radius, ends)
    dist_all = np.max(np.stack([b.distance(cands - offs[k]) for k, b in enumerate(C.blocks)]), axis=0)
    members = cands[dist_all <= tol]
    reverse = 0.0
    for zeta in members:
        w = cycle_through(ops, zeta, gap.v)
        viol = max(norm(ops.difference(w) - gap.d), norm(w - C.project(ops.shift(w))))
        if viol > tol:
            witnesses.append(zeta)
        reverse = max(reverse, viol)
    details = {
        "forward_violation": forward,
        "reverse_violation": reverse,
        "candidates": int(len(cands)),
        "reverse_witnesses": int(len(members)),
        "cycle_ends": [np.asarray(e).tolist() for e in ends],
    }
    if len(members) == 0:
        details["note"] = "no candidate landed in every translate; reverse direction vacuous"
    return _record("geometry", max(forward, reverse), tol, witnesses, details, t0)


# --- saddle function ------------------------------------------------------------

def saddle_function(ops, C, b, d):
    """``sigma_C(d) + ||d||^2/2 + <b, inverse_difference(d)> - sigma_C(b)``."""
    return (C.support(d) + 0.5 * inner_product(d, d)
            + inner_product(b, ops.inverse_difference(d)) - C.support(b))


def sample_displacement_set(ops, C, d, k, seed=0):
    """Up to ``k`` points of the (convex) displacement set.

    Random balanced directions ``y`` with ``sigma_C(y) < 0`` are scaled into
    the set (``t y`` belongs iff ``t <= -2 sigma_C(y) / ||y||^2``), and so are
    multiples of ``d``; the rest are convex combinations of those. Always
    contains ``0`` and ``d``.
    """
    rng = np.random.default_rng(seed)
    pool = [ops.zeros(), np.array(d, dtype=float)]
    for t in rng.random(max(1, k // 10)):
        pool.append(t * d)
    attempts = 20 * k
    for _ in range(attempts):
        if len(pool) >= k // 2 + 2:
            break
        y = ops.project_balanced(rng.standard_normal(ops.shape)) * rng.exponential(norm(d) + 1.0)
        s = C.support(y)
        yy = inner_product(y, y)
        if math.isfinite(s) and s < 0 and yy > 0:
            pool.append(rng.uniform(0.0, 1.0) * (-2.0 * s / yy) * y)
    base = np.stack(pool)
    out = list(pool)
    while len(out) < k:
        wts = rng.dirichlet(np.ones(min(len(base), 3)))
        idx = rng.choice(len(base), size=len(wts), replace=False)
        out.append(np.tensordot(wts, base[idx], axes=1))
    return out[:max(k, 2)]


def saddle_check(ops, C, gap, b_samples=100, seed=0, tol=1e-6, diagonal_tol=IDENTITY_TOL,
                 probes=None):
    """Diagonal identity ``f(b, b) = 0`` and ``sup_b f(b, d) <= tol`` over
    sampled ``b`` in the displacement set, plus the probe residual of
    :func:`~cyclegap.solvers.saddle_residual` when ``probes`` are given."""
    t0 = time.perf_counter()
    if not gap.converged:
        return _failed_precondition("saddle", tol, "gap solver did not converge", gap.d, t0)
    bs = sample_displacement_set(ops, C, gap.d, b_samples, seed)
    in_set = [b for b in bs if C.support(b) + 0.5 * inner_product(b, b) <= DEFAULT_TOL.feas]
    degenerate = not any(norm(b) > 0 and norm(b - gap.d) > 0 for b in in_set)
    if degenerate:
        log.warning("saddle_check: no displacement-set samples besides 0 and d")
    diag = [abs(saddle_function(ops, C, b, b)) for b in in_set]
    values = [saddle_function(ops, C, b, gap.d) for b in in_set]
    worst_diag = max(diag)
    sup_f = max(values)
    details = {"samples": len(in_set), "diagonal_max": worst_diag, "sup_f": sup_f,
               "degenerate": degenerate}
    viol = max(sup_f, worst_diag * tol / diagonal_tol)
    witnesses = [b for b, fv, dv in zip(in_set, values, diag) if fv > tol or dv > diagonal_tol]
    if probes is not None:
        sr = saddle_residual(ops, C, gap.d, gap.e, probes)
        details["probe_residual"] = sr
        viol = max(viol, sr)
    return _record("saddle", viol, tol, witnesses, details, t0)


def d_bound_check(ops, C, gap, c_samples=100, seed=0, tol=DEFAULT_TOL.solver):
    """``||d|| <= 2 ||c0||`` for sampled ``c0`` in ``C``."""
    t0 = time.perf_counter()
    if not gap.converged:
        return _failed_precondition("dbound", tol, "gap solver did not converge", gap.d, t0)
    cs = C.sample_points(c_samples, seed=seed)
    dn = norm(gap.d)
    slack = dn - 2.0 * np.linalg.norm(cs.reshape(len(cs), -1), axis=1)
    witnesses = cs[slack > tol]
    return _record("dbound", max(0.0, float(np.max(slack))), tol, witnesses,
                   {"norm_d": dn, "samples": len(cs)}, t0)
