"""Closed convex sets with closed-form projections.

Every set exposes

* ``project(x)``: nearest point; accepts a batch ``(..., *shape)``,
* ``support(t)``: ``sup <c, t>`` over the set, ``math.inf`` when unbounded,
* ``support_point(t)``: a maximizer of ``<., t>`` or ``None``,
* ``contains(x, tol)``: distance test against ``project``,
* ``sample_points(k, seed)``: ``k`` feasible points, deterministic in ``seed``.

Simple sets live in ``R^n`` (``shape == (n,)``); a :class:`ProductSet`
lives in ``(R^n)^m`` (``shape == (m, n)``) and acts blockwise.
Sets serialize to plain dicts (``to_dict`` / :func:`set_from_dict`).
"""

import math

import numpy as np

from .config import DEFAULT_TOL
from .exceptions import DimensionError, SetDefinitionError
from .hilbert import as_vector

# radius used when sampling unbounded sets around the projection of the origin
DEFAULT_SAMPLE_RADIUS = 5.0
# fraction of samples pushed onto the boundary of bounded sets
BOUNDARY_FRACTION = 0.25


class ConvexSet:
    kind = None

    @property
    def shape(self):
        return (self.dim,)

    def _batch(self, x):
        x = np.asarray(x, dtype=float)
        k = len(self.shape)
        if x.ndim < k or x.shape[x.ndim - k:] != self.shape:
            raise DimensionError(f"{self.kind}: expected trailing shape {self.shape}, got {x.shape}")
        return x

    def _point(self, t):
        t = np.asarray(t, dtype=float)
        if t.shape != self.shape:
            raise DimensionError(f"{self.kind}: expected shape {self.shape}, got {t.shape}")
        return t

    def distance(self, x):
        """Distance from ``x`` (or each point of a batch) to the set."""
        x = self._batch(x)
        diff = x - self.project(x)
        axes = tuple(range(x.ndim - len(self.shape), x.ndim))
        return np.sqrt(np.sum(diff * diff, axis=axes))

    def contains(self, x, tol=0.0):
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        return bool(self.distance(self._point(x)) <= tol)

    def sample_points(self, k, seed=0, radius=DEFAULT_SAMPLE_RADIUS):
        """Return ``k`` points of the set as an array of shape ``(k, *shape)``."""
        if k < 1:
            raise ValueError("k must be at least 1")
        return self._sample(int(k), np.random.default_rng(seed), radius)

    def bounding_box(self, radius=DEFAULT_SAMPLE_RADIUS):
        """Axis-aligned box enclosing the set (or its part within ``radius``
        of the projection of the origin, for unbounded sets)."""
        p0 = self.project(np.zeros(self.dim))
        return p0 - radius, p0 + radius

    def _around_origin_projection(self, k, rng, radius):
        # points in a ball around P(0), pulled back onto the set; P is
        # nonexpansive and fixes P(0), so they stay within ``radius`` of it
        p0 = self.project(np.zeros(self.dim))
        return self.project(p0 + _ball_cloud(k, self.dim, rng) * radius)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"


def _ball_cloud(k, n, rng):
    """``k`` points uniformly distributed in the unit ball of R^n."""
    g = rng.standard_normal((k, n))
    g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
    return g * rng.random((k, 1)) ** (1.0 / n)


def _nonzero_normal(a, kind):
    a = as_vector(a)
    nrm2 = float(a @ a)
    if nrm2 == 0.0:
        raise SetDefinitionError(f"{kind}: normal vector must be nonzero")
    return a, nrm2


class Ball(ConvexSet):
    kind = "ball"

    def __init__(self, center, radius):
        self.center = as_vector(center)
        self.radius = float(radius)
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise SetDefinitionError("ball: radius must be positive and finite")
        self.dim = self.center.shape[0]

    def project(self, x):
        x = self._batch(x)
        diff = x - self.center
        nrm = np.linalg.norm(diff, axis=-1, keepdims=True)
        scale = np.where(nrm > self.radius, self.radius / np.maximum(nrm, 1e-300), 1.0)
        return self.center + diff * scale

    def support(self, t):
        t = self._point(t)
        return self.radius * float(np.linalg.norm(t)) + float(self.center @ t)

    def support_point(self, t):
        t = self._point(t)
        nrm = np.linalg.norm(t)
        if nrm == 0:
            return self.center.copy()
        return self.center + self.radius * t / nrm

    def bounding_box(self, radius=DEFAULT_SAMPLE_RADIUS):
        return self.center - self.radius, self.center + self.radius

    def _sample(self, k, rng, radius):
        pts = _ball_cloud(k, self.dim, rng)
        edge = rng.random(k) < BOUNDARY_FRACTION
        nrm = np.linalg.norm(pts[edge], axis=1, keepdims=True)
        pts[edge] = pts[edge] / np.maximum(nrm, 1e-300)
        return self.center + self.radius * pts

    def to_dict(self):
        return {"kind": self.kind, "center": self.center.tolist(), "radius": self.radius}


class Box(ConvexSet):
    kind = "box"

    def __init__(self, lower, upper):
        self.lower = as_vector(lower)
        self.upper = as_vector(upper, self.lower.shape[0])
        if np.any(self.lower > self.upper):
            raise SetDefinitionError("box: lower bound exceeds upper bound")
        self.dim = self.lower.shape[0]

    def project(self, x):
        return np.clip(self._batch(x), self.lower, self.upper)

    def support(self, t):
        t = self._point(t)
        return float(np.sum(np.maximum(self.lower * t, self.upper * t)))

    def support_point(self, t):
        t = self._point(t)
        return np.where(t > 0, self.upper, self.lower)

    def bounding_box(self, radius=DEFAULT_SAMPLE_RADIUS):
        return self.lower.copy(), self.upper.copy()

    def _sample(self, k, rng, radius):
        u = rng.random((k, self.dim))
        snap = rng.random((k, self.dim)) < BOUNDARY_FRACTION
        u = np.where(snap, np.round(u), u)
        return self.lower + u * (self.upper - self.lower)

    def to_dict(self):
        return {"kind": self.kind, "lower": self.lower.tolist(), "upper": self.upper.tolist()}


class Halfspace(ConvexSet):
    """``{x : <normal, x> <= offset}``."""

    kind = "halfspace"

    def __init__(self, normal, offset, cone_tol=DEFAULT_TOL.cone):
        self.normal, self._nn = _nonzero_normal(normal, self.kind)
        self.offset = float(offset)
        self.cone_tol = cone_tol
        self.dim = self.normal.shape[0]

    def project(self, x):
        x = self._batch(x)
        excess = np.maximum(x @ self.normal - self.offset, 0.0)
        return x - excess[..., None] * (self.normal / self._nn)

    def _normal_multiple(self, t):
        """Return ``lam`` with ``t = lam * normal`` (within ``cone_tol``) or None."""
        lam = float(t @ self.normal) / self._nn
        if np.linalg.norm(t - lam * self.normal) <= self.cone_tol * np.linalg.norm(t):
            return lam
        return None

    def support(self, t):
        t = self._point(t)
        lam = self._normal_multiple(t)
        if lam is None or lam < 0:
            return math.inf
        return lam * self.offset

    def support_point(self, t):
        if math.isinf(self.support(t)):
            return None
        return self.offset * self.normal / self._nn

    def _sample(self, k, rng, radius):
        return self._around_origin_projection(k, rng, radius)

    def to_dict(self):
        return {"kind": self.kind, "normal": self.normal.tolist(), "offset": self.offset}


class Hyperplane(Halfspace):
    """``{x : <normal, x> = offset}``."""

    kind = "hyperplane"

    def project(self, x):
        x = self._batch(x)
        excess = x @ self.normal - self.offset
        return x - excess[..., None] * (self.normal / self._nn)

    def support(self, t):
        t = self._point(t)
        lam = self._normal_multiple(t)
        return math.inf if lam is None else lam * self.offset


class Affine(ConvexSet):
    """``{point + basis^T u}``; ``basis`` rows span the direction space."""

    kind = "affine"

    def __init__(self, point, basis, cone_tol=DEFAULT_TOL.cone):
        point = as_vector(point)
        self.dim = point.shape[0]
        basis = np.asarray(basis, dtype=float).reshape(-1, self.dim)
        if not np.all(np.isfinite(basis)):
            raise SetDefinitionError("affine: basis entries must be finite")
        self.basis = basis
        self.cone_tol = cone_tol
        if basis.shape[0]:
            u, s, _ = np.linalg.svd(basis.T, full_matrices=False)
            rank = int(np.sum(s > 1e-12 * s[0])) if s[0] > 0 else 0
            self._onb = u[:, :rank]
        else:
            self._onb = np.zeros((self.dim, 0))
        # minimum-norm point, so the support value does not depend on ``point``
        self.point = point
        self._p0 = point - self._onb @ (self._onb.T @ point)

    def project(self, x):
        x = self._batch(x)
        return self._p0 + (x @ self._onb) @ self._onb.T

    def support(self, t):
        t = self._point(t)
        if np.linalg.norm(self._onb.T @ t) > self.cone_tol * np.linalg.norm(t):
            return math.inf
        return float(self._p0 @ t)

    def support_point(self, t):
        if math.isinf(self.support(t)):
            return None
        return self._p0.copy()

    def _sample(self, k, rng, radius):
        return self._around_origin_projection(k, rng, radius)

    def to_dict(self):
        return {"kind": self.kind, "point": self.point.tolist(), "basis": self.basis.tolist()}


class Singleton(ConvexSet):
    kind = "singleton"

    def __init__(self, point):
        self.point = as_vector(point)
        self.dim = self.point.shape[0]

    def project(self, x):
        x = self._batch(x)
        return np.broadcast_to(self.point, x.shape).copy()

    def support(self, t):
        return float(self.point @ self._point(t))

    def support_point(self, t):
        self._point(t)
        return self.point.copy()

    def bounding_box(self, radius=DEFAULT_SAMPLE_RADIUS):
        return self.point.copy(), self.point.copy()

    def _sample(self, k, rng, radius):
        return np.tile(self.point, (k, 1))

    def to_dict(self):
        return {"kind": self.kind, "point": self.point.tolist()}


class Simplex(ConvexSet):
    """Standard probability simplex ``{x >= 0, sum(x) = 1}`` in R^dim."""

    kind = "simplex"

    def __init__(self, dim):
        self.dim = int(dim)
        if self.dim < 1:
            raise SetDefinitionError("simplex: dimension must be at least 1")

    def project(self, x):
        x = self._batch(x)
        # sort-based algorithm; stable sort keeps ties in coordinate order
        u = -np.sort(-x, axis=-1, kind="stable")
        css = np.cumsum(u, axis=-1) - 1.0
        ind = np.arange(1, self.dim + 1)
        rho = np.sum(u - css / ind > 0, axis=-1, keepdims=True)
        theta = np.take_along_axis(css, rho - 1, axis=-1) / rho
        return np.maximum(x - theta, 0.0)

    def support(self, t):
        return float(np.max(self._point(t)))

    def support_point(self, t):
        t = self._point(t)
        c = np.zeros(self.dim)
        c[int(np.argmax(t))] = 1.0
        return c

    def bounding_box(self, radius=DEFAULT_SAMPLE_RADIUS):
        return np.zeros(self.dim), np.ones(self.dim)

    def _sample(self, k, rng, radius):
        pts = rng.dirichlet(np.ones(self.dim), size=k)
        face = rng.random(k) < BOUNDARY_FRACTION
        if self.dim > 1 and np.any(face):
            # zero one coordinate and renormalize to land on a facet
            idx = rng.integers(0, self.dim, size=int(face.sum()))
            sub = pts[face]
            sub[np.arange(len(idx)), idx] = 0.0
            pts[face] = sub / sub.sum(axis=1, keepdims=True)
        return pts

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim}


class Translate(ConvexSet):
    """``{c + shift : c in inner}``."""

    kind = "translate"

    def __init__(self, inner, shift):
        if isinstance(inner, ProductSet):
            raise SetDefinitionError("translate: inner set must be a set in R^n")
        self.inner = inner
        self.shift = as_vector(shift, inner.dim)
        self.dim = inner.dim

    def project(self, x):
        x = self._batch(x)
        return self.inner.project(x - self.shift) + self.shift

    def support(self, t):
        t = self._point(t)
        return self.inner.support(t) + float(self.shift @ t)

    def support_point(self, t):
        c = self.inner.support_point(t)
        return None if c is None else c + self.shift

    def bounding_box(self, radius=DEFAULT_SAMPLE_RADIUS):
        lo, hi = self.inner.bounding_box(radius)
        return lo + self.shift, hi + self.shift

    def _sample(self, k, rng, radius):
        return self.inner._sample(k, rng, radius) + self.shift

    def to_dict(self):
        return {"kind": self.kind, "set": self.inner.to_dict(), "shift": self.shift.tolist()}


class ProductSet(ConvexSet):
    """``C_1 x ... x C_m`` acting blockwise on ``(m, n)`` arrays."""

    kind = "product"

    def __init__(self, blocks):
        self.blocks = list(blocks)
        if not self.blocks:
            raise SetDefinitionError("product: needs at least one block")
        dims = {b.dim for b in self.blocks}
        if any(isinstance(b, ProductSet) for b in self.blocks) or len(dims) != 1:
            raise SetDefinitionError("product: blocks must be sets in a common R^n")
        self.dim = dims.pop()
        self.m = len(self.blocks)

    @property
    def shape(self):
        return (self.m, self.dim)

    def __len__(self):
        return self.m

    def __getitem__(self, i):
        return self.blocks[i]

    def project(self, x):
        x = self._batch(x)
        return np.stack([b.project(x[..., i, :]) for i, b in enumerate(self.blocks)], axis=-2)

    def support(self, t):
        t = self._point(t)
        return sum(b.support(t[i]) for i, b in enumerate(self.blocks))

    def support_point(self, t):
        t = self._point(t)
        pts = [b.support_point(t[i]) for i, b in enumerate(self.blocks)]
        if any(p is None for p in pts):
            return None
        return np.stack(pts)

    def bounding_box(self, radius=DEFAULT_SAMPLE_RADIUS):
        boxes = [b.bounding_box(radius) for b in self.blocks]
        return np.stack([lo for lo, _ in boxes]), np.stack([hi for _, hi in boxes])

    def _sample(self, k, rng, radius):
        return np.stack([b._sample(k, rng, radius) for b in self.blocks], axis=1)

    def to_dict(self):
        return {"kind": self.kind, "sets": [b.to_dict() for b in self.blocks]}


def _require(d, key, kind):
    try:
        return d[key]
    except KeyError:
        raise SetDefinitionError(f"{kind}: missing field '{key}'") from None


def set_from_dict(d):
    """Build a set from its dict description (inverse of ``to_dict``)."""
    if not isinstance(d, dict):
        raise SetDefinitionError(f"set description must be an object, got {type(d).__name__}")
    kind = d.get("kind")
    try:
        if kind == "ball":
            return Ball(_require(d, "center", kind), _require(d, "radius", kind))
        if kind == "box":
            return Box(_require(d, "lower", kind), _require(d, "upper", kind))
        if kind == "halfspace":
            return Halfspace(_require(d, "normal", kind), _require(d, "offset", kind))
        if kind == "hyperplane":
            return Hyperplane(_require(d, "normal", kind), _require(d, "offset", kind))
        if kind == "affine":
            return Affine(_require(d, "point", kind), d.get("basis", []))
        if kind == "singleton":
            return Singleton(_require(d, "point", kind))
        if kind == "simplex":
            return Simplex(_require(d, "dim", kind))
        if kind == "translate":
            return Translate(set_from_dict(_require(d, "set", kind)), _require(d, "shift", kind))
        if kind == "product":
            return ProductSet([set_from_dict(b) for b in _require(d, "sets", kind)])
    except (DimensionError, TypeError) as exc:
        raise SetDefinitionError(f"{kind}: {exc}") from None
    raise SetDefinitionError(f"unknown set kind {kind!r}")
