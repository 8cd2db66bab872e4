"""Scenario files, the solve-then-verify pipeline, and JSON reports.

A scenario is a JSON object::

    {
      "schema_version": 1,
      "name": "two_intervals",
      "m": 2, "n": 1,
      "sets": [{"kind": "box", "lower": [-1], "upper": [1]}, ...],
      "solver": {"alpha": 0.5, "lambda": 1.0, "max_iters": 100000, "eps_solver": 1e-8},
      "verify": {"seed": 0, "samples": null, "grid_step": 0.05, "probes": 100,
                 "b_samples": 100, "c_samples": 100, "dr_starts": 3,
                 "tolerances": {"cycle": 1e-7, "pthm": 1e-7, "geometry": null,
                                "saddle": 1e-6, "dbound": 1e-8}},
      "starts": [[[0.0], [0.0]], ...]
    }

Only ``m``, ``n`` and ``sets`` are required. ``samples: null`` means grid
sampling alone for ``n <= 2`` and 1000 random samples otherwise;
``geometry: null`` means ``eps_solver + eps_feas``.
"""

import copy
import datetime
import json
import logging
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import verify
from .config import DEFAULT_TOL
from .exceptions import ScenarioError, SetDefinitionError
from .hilbert import norm
from .operators import CycleOperators
from .sets import ProductSet, set_from_dict
from .solvers import default_starts, dr_gap_solve

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CHECK_NAMES = ("cycle", "pthm", "geometry", "saddle", "dbound")

SOLVER_DEFAULTS = {"alpha": 0.5, "lambda": 1.0, "max_iters": 100_000, "eps_solver": DEFAULT_TOL.solver}
VERIFY_DEFAULTS = {
    "seed": 0,
    "samples": None,
    "grid_step": 0.05,
    "radius": 5.0,
    "probes": 100,
    "b_samples": 100,
    "c_samples": 100,
    "dr_starts": 3,
    "tolerances": {"cycle": 1e-7, "pthm": 1e-7, "geometry": None, "saddle": 1e-6,
                   "dbound": 1e-8, "agreement": 1e-6},
}


@dataclass
class Scenario:
    name: str
    m: int
    n: int
    sets: list
    solver: dict = field(default_factory=lambda: dict(SOLVER_DEFAULTS))
    verify: dict = field(default_factory=lambda: copy.deepcopy(VERIFY_DEFAULTS))
    starts: list = None

    @property
    def ops(self):
        return CycleOperators(self.m, self.n)

    @property
    def product(self):
        return ProductSet(self.sets)

    def tolerance(self, name):
        tol = self.verify["tolerances"].get(name)
        if name == "geometry" and tol is None:
            return self.solver["eps_solver"] + DEFAULT_TOL.feas
        return tol

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "m": self.m,
            "n": self.n,
            "sets": [s.to_dict() for s in self.sets],
            "solver": self.solver,
            "verify": self.verify,
            "starts": None if self.starts is None else [np.asarray(s).tolist() for s in self.starts],
        }


def _merge(defaults, given, where):
    if given is None:
        return copy.deepcopy(defaults)
    if not isinstance(given, dict):
        raise ScenarioError(f"field '{where}' must be an object")
    unknown = set(given) - set(defaults)
    if unknown:
        raise ScenarioError(f"field '{where}': unknown keys {sorted(unknown)}")
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        if isinstance(defaults[key], dict):
            out[key] = _merge(defaults[key], value, f"{where}.{key}")
        else:
            out[key] = value
    return out


def _positive_int(data, key, minimum):
    value = data.get(key)
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ScenarioError(f"field '{key}' must be an integer >= {minimum}, got {value!r}"
                            + (" (at least two sets are required)" if key == "m" else ""))
    return value


def scenario_from_dict(data):
    """Validate a parsed scenario object and build a :class:`Scenario`."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"field 'schema_version': unsupported version {version!r}")
    m = _positive_int(data, "m", 2)
    n = _positive_int(data, "n", 1)
    raw_sets = data.get("sets")
    if not isinstance(raw_sets, list) or len(raw_sets) != m:
        raise ScenarioError(f"field 'sets' must be a list of m = {m} set descriptions")
    sets = []
    for i, raw in enumerate(raw_sets):
        try:
            s = set_from_dict(raw)
        except SetDefinitionError as exc:
            raise ScenarioError(f"field 'sets[{i}]': {exc}") from None
        if isinstance(s, ProductSet) or s.dim != n:
            raise ScenarioError(f"field 'sets[{i}]': expected a set in R^{n}")
        sets.append(s)
    solver = _merge(SOLVER_DEFAULTS, data.get("solver"), "solver")
    if not 0 < solver["alpha"] < 1:
        raise ScenarioError("field 'solver.alpha' must lie in (0, 1)")
    if not solver["lambda"] > 0:
        raise ScenarioError("field 'solver.lambda' must be positive")
    if not (isinstance(solver["max_iters"], int) and solver["max_iters"] >= 1):
        raise ScenarioError("field 'solver.max_iters' must be a positive integer")
    if not solver["eps_solver"] > 0:
        raise ScenarioError("field 'solver.eps_solver' must be positive")
    verify_cfg = _merge(VERIFY_DEFAULTS, data.get("verify"), "verify")
    starts = data.get("starts")
    if starts is not None:
        try:
            starts = [np.asarray(s, dtype=float).reshape(m, n) for s in starts]
        except (ValueError, TypeError):
            raise ScenarioError(f"field 'starts': every start must have shape ({m}, {n})") from None
    return Scenario(str(data.get("name", "scenario")), m, n, sets, solver, verify_cfg, starts)


def bundled_scenarios():
    """Names of the scenario files shipped with the package."""
    root = resources.files("cyclegap") / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def resolve_path(path):
    """``path`` itself, or the bundled scenario of that name."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.suffix == ".json" else p.name + ".json"
    bundled = resources.files("cyclegap") / "scenarios" / name
    if bundled.is_file():
        return Path(str(bundled))
    return p


def load_scenario(path):
    """Read and validate a scenario file.

    Raises
    ------
    ScenarioError
        With a line/column diagnostic for malformed JSON and a field path
        for schema violations.
    """
    p = resolve_path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{p}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(data)


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    if isinstance(x, np.generic):
        return _finite(x.item())
    return x


def run(scenario, checks=CHECK_NAMES):
    """Solve (KM from every start, then DR) and run the selected checks.

    Returns
    -------
    report : dict
        JSON-ready; ``timestamp`` and ``timings`` are the only fields that
        vary between identical runs.
    exit_code : int
        0 if every check passed, 1 otherwise.
    """
    unknown = set(checks) - set(CHECK_NAMES)
    if unknown:
        raise ScenarioError(f"unknown check(s) {sorted(unknown)}")
    ops, C = scenario.ops, scenario.product
    sv, vf = scenario.solver, scenario.verify
    seed = vf["seed"]
    timings = {}

    t0 = time.perf_counter()
    starts = scenario.starts if scenario.starts is not None else default_starts(ops, seed=seed)
    cycles = verify.compute_cycles(ops, C, starts, sv["alpha"], sv["max_iters"], sv["eps_solver"])
    timings["km"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    gap = dr_gap_solve(ops, C, sv["lambda"], sv["max_iters"], sv["eps_solver"])
    rng = np.random.default_rng(seed)
    spread = 0.0
    for _ in range(max(0, vf["dr_starts"] - 1)):
        other = dr_gap_solve(ops, C, sv["lambda"], sv["max_iters"], sv["eps_solver"],
                             w0=5.0 * rng.standard_normal(ops.shape))
        spread = max(spread, norm(other.d - gap.d) if other.converged else math.inf)
    timings["dr"] = time.perf_counter() - t0

    records = []
    if "cycle" in checks:
        rec = verify.cycle_check(ops, C, cycles, gap, scenario.tolerance("cycle"),
                                 scenario.tolerance("agreement"))
        rec.details["dr_start_spread"] = spread
        if spread > scenario.tolerance("agreement") or not gap.converged:
            rec.passed = False
            rec.violation = math.inf
            rec.witnesses = rec.witnesses or [gap.d]
        records.append(rec)
    if "pthm" in checks:
        tol = scenario.tolerance("pthm")
        probes, _ = verify.equivalence_probes(ops, C, cycles, gap, vf["probes"], seed, tol)
        records.append(verify.check_pthm_equivalence(ops, C, gap.d, probes, tol))
    if "geometry" in checks:
        samples = vf["samples"]
        if samples is None:
            samples = 0 if scenario.n <= 2 else 1000
        records.append(verify.verify_geometry(
            ops, C, gap, cycles, samples, seed, scenario.tolerance("geometry"),
            vf["grid_step"] if scenario.n <= 2 else None, vf["radius"]))
    if "saddle" in checks:
        probes = list(C.sample_points(vf["c_samples"], seed=seed + 2)) + [ops.zeros()]
        probes += [c.z for c in cycles if c.converged]
        records.append(verify.saddle_check(ops, C, gap, vf["b_samples"], seed,
                                           scenario.tolerance("saddle"), probes=probes))
    if "dbound" in checks:
        records.append(verify.d_bound_check(ops, C, gap, vf["c_samples"], seed,
                                            scenario.tolerance("dbound")))
    for rec in records:
        timings[rec.name] = rec.wall_time

    passed = all(r.passed for r in records) and gap.converged and all(c.converged for c in cycles)
    report = {
        "schema_version": SCHEMA_VERSION,
        "scenario": scenario.name,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "settings": scenario.to_dict(),
        "km": [c.to_dict() for c in cycles],
        "gap": dict(gap.to_dict(), dr_start_spread=spread),
        "checks": [r.to_dict() for r in records],
        "passed": passed,
        "timings": timings,
    }
    return _finite(report), 0 if passed else 1


def dumps_report(report):
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
