"""Brute-force counterparts of the closed forms, for cross-checking only.

Nothing here is used by the closed-form code paths. Grid oracles return
lattice maxima, which under-estimate the true suprema and converge as the
step shrinks.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
import math

import numpy as np

from ._validation import DEFAULT_TOL, check_tol, check_vector
from .capra import _conjugate_rows, _coupling_rows
from .norms import PExponent, _lp_norm_rows, top_norm_prefix
from .subdiff import lattice

DEFAULT_BUDGET = 20_000_000
_CHUNK = 1 << 18


class BudgetExceeded(ValueError):
    """Raised when an oracle would enumerate more cells than allowed."""


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned lattice ``[lo, hi]^d`` with spacing ``step``."""

    lo: float
    hi: float
    step: float
    d: int
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("grid needs lo < hi")
        if not self.step > 0:
            raise ValueError("grid needs step > 0")
        if self.d < 1:
            raise ValueError("grid needs d >= 1")
        if self.cells > self.budget:
            raise BudgetExceeded(f"{self.cells} grid cells exceed the budget of {self.budget}")

    @property
    def axis(self):
        return lattice(self.lo, self.hi, self.step)

    @property
    def cells(self):
        n = int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return n**self.d

    def chunks(self, size=_CHUNK):
        """Yield the lattice points in blocks of at most ``size`` rows."""
        axis = self.axis
        n = axis.size
        total = n**self.d
        for start in range(0, total, size):
            flat = np.arange(start, min(start + size, total))
            idx = np.unravel_index(flat, (n,) * self.d)
            yield np.stack([axis[i] for i in idx], axis=-1)


def _check_grid(grid, d):
    if grid.d != d:
        raise ValueError(f"grid dimension {grid.d} does not match vector dimension {d}")


def conjugate_by_sup(y, p, grid):
    """Lattice estimate of ``sup_x coupling(x, y) - l0(x)``.

    The coupling is constant along rays, so the sup over all ``x`` is the
    sup over the unit p-sphere and the origin. Lattice points of ``grid``
    (normally the box ``[-1, 1]^d``) are projected radially onto the
    p-sphere; exact zeros survive the projection, so every support pattern
    present in the lattice is visited.
    """
    p = PExponent.coerce(p)
    y = check_vector(y)
    _check_grid(grid, y.size)
    best = 0.0  # x = 0
    for X in grid.chunks():
        nz = np.any(X != 0, axis=1)
        X = X[nz]
        if X.size == 0:
            continue
        X = X / _lp_norm_rows(X, p.p)[:, None]
        vals = X @ y - np.count_nonzero(X, axis=1)
        best = max(best, float(vals.max()))
    return best


def biconjugate_by_sup(x, p, grid):
    """Lattice estimate of ``sup_y coupling(x, y) - conjugate(y)`` over a box."""
    p = PExponent.coerce(p)
    x = check_vector(x, "x")
    _check_grid(grid, x.size)
    best = -math.inf
    for Y in grid.chunks():
        vals = _coupling_rows(x[None], Y, p.p) - _conjugate_rows(Y, p)
        best = max(best, float(vals.max()))
    return best


def level_values(y, p):
    """``top_norm(y, j, q) - j`` for j = 0, ..., d."""
    p = PExponent.coerce(p)
    y = check_vector(y)
    return top_norm_prefix(y, p.q) - np.arange(y.size + 1)


def admissible_dual_by_argmax(y, p, tol=DEFAULT_TOL):
    """Levels attaining ``max_j top_norm(y, j, q) - j`` over j = 0..d.

    Ties are resolved with the package tolerance convention:
    ``v_j >= max - tol * max(1, |max|)``.
    """
    tol = check_tol(tol)
    v = level_values(y, p)
    top = v.max()
    return {int(j) for j in np.flatnonzero(v >= top - tol * max(1.0, abs(top)))}


@lru_cache(maxsize=None)
def _subset_masks(d, k):
    masks = []
    for size in range(1, k + 1):
        for K in combinations(range(d), size):
            m = np.zeros(d, dtype=bool)
            m[list(K)] = True
            masks.append(m)
    out = np.array(masks)
    out.flags.writeable = False
    return out


def coordinate_dual_norm_by_subsets(y, k, p, max_d=20):
    """Dual coordinate-k norm by enumerating every subset ``K`` with ``|K| <= k``.

    For an lp source norm the dual of the restriction to the coordinates
    ``K`` is the lq norm of ``y_K``; the result is the largest of these.
    """
    p = PExponent.coerce(p)
    y = check_vector(y)
    d = y.size
    if d > max_d:
        raise BudgetExceeded(f"subset enumeration limited to d <= {max_d}")
    k = int(k)
    if not 1 <= k <= d:
        raise ValueError(f"k must lie in [1, {d}], got {k}")
    masks = _subset_masks(d, k)
    A = np.abs(y)
    if math.isinf(p.q):
        return float(np.max(np.where(masks, A, 0.0)))
    sums = np.where(masks, A, 0.0) ** p.q
    return float(np.max(sums.sum(axis=1)) ** (1.0 / p.q))
