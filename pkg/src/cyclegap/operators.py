"""Linear operators of the cyclic shift on X = H^m.

With ``shift`` the cyclic shift ``(x_1, ..., x_m) -> (x_m, x_1, ..., x_{m-1})``:

=========================  ================================================
``difference``             ``shift - I``
``average``                ``(1/m) sum_{i=1..m} shift^i`` (block mean)
``inverse_difference``     ``(1/m) sum_{i=1..m-1} i shift^i``; inverts
                           ``difference`` on the balanced subspace
``project_balanced``       ``I - average``, orthogonal projection onto the
                           balanced subspace ``{y : average(y) = 0}``
=========================  ================================================

All operators act on ``(m, n)`` arrays by block-index manipulation; no
matrix is formed.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError
from .hilbert import inner_product, norm


@dataclass(frozen=True)
class CycleOperators:
    """Operator context for ``m`` sets in ``R^n``."""

    m: int
    n: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n}")

    @property
    def shape(self):
        return (self.m, self.n)

    def check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != self.shape:
            raise DimensionError(f"expected shape {self.shape}, got {x.shape}")
        return x

    def zeros(self):
        return np.zeros(self.shape)

    def shift(self, x, k=1):
        """Apply the cyclic shift ``k`` times."""
        return np.roll(self.check(x), k, axis=0)

    def difference(self, x):
        """``(x_m - x_1, x_1 - x_2, ..., x_{m-1} - x_m)``."""
        x = self.check(x)
        return np.roll(x, 1, axis=0) - x

    def average(self, x):
        """Every block replaced by the mean of the blocks."""
        x = self.check(x)
        return np.broadcast_to(x.mean(axis=0), x.shape).copy()

    def inverse_difference(self, y):
        """``(1/m) sum_{i=1..m-1} i * shift^i(y)``.

        Defined on all of X. On balanced ``y`` (blocks summing to zero) the
        result is balanced and ``difference`` maps it back to ``y``.
        """
        y = self.check(y)
        m = self.m
        # block j of the sum is T_j = sum_i i*y_{j-i}; T_j = T_{j-1} + total - m*y_j
        weights = np.arange(1, m)[:, None]
        t0 = np.sum(weights * y[::-1][: m - 1], axis=0)
        total = y.sum(axis=0)
        j = np.arange(m)[:, None]
        running = np.concatenate([np.zeros((1, self.n)), np.cumsum(y[1:], axis=0)])
        return (t0 + j * total - m * running) / m

    def project_balanced(self, x):
        """``x - average(x)``."""
        x = self.check(x)
        return x - x.mean(axis=0)

    def as_matrix(self, op):
        """Dense ``(mn, mn)`` matrix of a linear map on X (row-major blocks)."""
        size = self.m * self.n
        cols = np.empty((size, size))
        for k in range(size):
            e = np.zeros(size)
            e[k] = 1.0
            cols[:, k] = np.ravel(op(e.reshape(self.shape)))
        return cols


def cyclic_shift_matrix(m, n=1):
    """Matrix of the cyclic shift on ``(R^n)^m`` acting on row-major blocks."""
    return np.kron(np.roll(np.eye(m), 1, axis=0), np.eye(n))


def isometry_defect(M, x):
    """``||(M - I)x||^2 + 2 <(M - I)x, x>``, which equals ``||Mx||^2 - ||x||^2``.

    Nonpositive for every ``x`` iff ``M`` is nonexpansive, identically zero
    iff ``M`` is an isometry.
    """
    M = np.asarray(M, dtype=float)
    x = np.asarray(x, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or x.shape != (M.shape[1],):
        raise DimensionError(f"incompatible shapes {M.shape} and {x.shape}")
    sx = M @ x - x
    return inner_product(sx, sx) + 2.0 * inner_product(sx, x)


def identity_violations(m, n, trials=100, seed=0):
    """Largest violation of each algebraic identity of the cyclic operators.

    Runs ``trials`` random standard-normal points ``x, z`` in ``(R^n)^m``.

    Returns
    -------
    dict
        identity name -> max absolute violation (a norm or scalar gap).
    """
    ops = CycleOperators(m, n)
    rng = np.random.default_rng(seed)
    S, A, Q, P = ops.difference, ops.average, ops.inverse_difference, ops.project_balanced
    worst = {}

    def record(name, value):
        worst[name] = max(worst.get(name, 0.0), float(value))

    for _ in range(trials):
        x = rng.standard_normal(ops.shape)
        z = rng.standard_normal(ops.shape)
        y = P(x)
        record("shift^m = I", norm(ops.shift(x, m) - x))
        record("shift is an isometry", abs(norm(ops.shift(x)) - norm(x)))
        record("average(difference x) = 0", norm(A(S(x))))
        record("average(shift x) = shift(average x) = average x",
               max(norm(A(ops.shift(x)) - A(x)), norm(ops.shift(A(x)) - A(x))))
        record("average shift^k = average, 1 <= k <= m",
               max(norm(A(ops.shift(x, k)) - A(x)) for k in range(1, m + 1)))
        record("difference(inverse_difference y) = y on balanced y", norm(S(Q(y)) - y))
        record("inverse_difference(difference y) = y on balanced y", norm(Q(S(y)) - y))
        record("inverse_difference y is balanced", norm(A(Q(y))))
        record("S Q = Q S = I - average",
               max(norm(S(Q(x)) - (x - A(x))), norm(Q(S(x)) - (x - A(x)))))
        record("A Q = Q A = (m-1)/2 A",
               max(norm(A(Q(x)) - 0.5 * (m - 1) * A(x)), norm(Q(A(x)) - 0.5 * (m - 1) * A(x))))
        record("average is idempotent", norm(A(A(x)) - A(x)))
        record("S A = A S = 0", max(norm(S(A(x))), norm(A(S(x)))))
        sx = S(x)
        record("||Sx||^2 = -2<Sx, x>", abs(inner_product(sx, sx) + 2.0 * inner_product(sx, x)))
        record("<Qy, y> = -||y||^2/2", abs(inner_product(Q(y), y) + 0.5 * inner_product(y, y)))
        record("average is symmetric", abs(inner_product(A(x), z) - inner_product(x, A(z))))
    return worst
