"""Exact Capra-subdifferential of l0 for lp source norms.

Membership is decided from the explicit row system (normal-cone row,
off-support row, lower chain, upper row), never by optimisation. The same
vectorised condition table backs the single-pair verdict with its condition
ledger and the bulk masks used by region sweeps.
"""

from dataclasses import dataclass, field
from itertools import combinations
import math
from typing import NamedTuple

import numpy as np

from ._validation import DEFAULT_TOL, check_rows, check_tol, check_vector, close, geq, leq
from .capra import threshold_rows
from .norms import PExponent, _lp_norm_rows, normal_cone_alignment


class Condition(NamedTuple):
    name: str
    satisfied: bool
    lhs: float
    rhs: float


@dataclass(frozen=True)
class SubdiffVerdict:
    """Membership decision with the full ledger of evaluated conditions."""

    conditions: tuple

    @property
    def member(self):
        return all(c.satisfied for c in self.conditions)

    @property
    def failed(self):
        return [c for c in self.conditions if not c.satisfied]

    def __bool__(self):
        return self.member


def _condition_table(X, Y, p, tol):
    """Evaluate every condition row for each pair ``(X[i], Y[i])``.

    Returns a list of ``(name, lhs, rhs, ok, active)`` with arrays of length
    ``n``; a pair is a member iff ``ok`` holds on every row where it is
    ``active``.
    """
    n, d = X.shape
    A = np.abs(Y)
    sup_y = A.max(axis=1)
    l = np.count_nonzero(X, axis=1)
    at_zero = l == 0
    rows = [("unit_ball", sup_y, np.ones(n), leq(sup_y, 1.0, tol), at_zero)]

    if p.regime == "one":
        in_dom = ~at_zero & (l <= 1)
        rows.append(("domain", l.astype(float), np.ones(n), l <= 1, ~at_zero))
        align = normal_cone_alignment(np.where(at_zero[:, None], 1.0, X), Y, p)
        nx = _lp_norm_rows(X, 1.0)
        inner = np.sum(X * Y, axis=1) / np.where(at_zero, 1.0, nx)
        rows.append(("normal_cone", inner, sup_y, align >= 1.0 - tol, in_dom))
        rows.append(("dual_norm_lower", sup_y, np.ones(n), geq(sup_y, 1.0, tol), in_dom))
        return rows

    on_support = X != 0
    if p.regime == "inf":
        ax = np.abs(X)
        big = ax.max(axis=1)
        small = np.where(on_support, ax, np.inf).min(axis=1)
        ratio = np.where(at_zero, 1.0, small / np.where(at_zero, 1.0, big))
        dom_ok = close(ratio, 1.0, tol)
        rows.append(("domain", ratio, np.ones(n), dom_ok, ~at_zero))
        in_dom = ~at_zero & dom_ok
    else:
        in_dom = ~at_zero

    Y_L = np.where(on_support, Y, 0.0)
    X_safe = np.where(at_zero[:, None], 1.0, X)
    nx = _lp_norm_rows(X_safe, p.p)
    inner = np.sum(X_safe * Y_L, axis=1) / nx
    dual_norm_L = _lp_norm_rows(Y_L, p.q)
    align = normal_cone_alignment(X_safe, Y_L, p)
    rows.append(("normal_cone", inner, dual_norm_L, align >= 1.0 - tol, in_dom))

    off = np.where(on_support, 0.0, A).max(axis=1)
    low = np.where(on_support, A, np.inf).min(axis=1)
    low = np.where(at_zero, 0.0, low)
    rows.append(("off_support", off, low, leq(off, low, tol), in_dom))

    S, R = threshold_rows(Y, p.q)
    for k in range(d):
        ok = geq(S[:, k], R[:, k], tol)
        rows.append((f"lower_chain[{k}]", S[:, k], R[:, k], ok, in_dom & (k < l)))
    idx = np.minimum(l, d - 1)
    take = np.arange(n)
    up_lhs, up_rhs = S[take, idx], R[take, idx]
    rows.append(("upper", up_lhs, up_rhs, leq(up_lhs, up_rhs, tol), in_dom & (l < d)))
    return rows


def _pairs(x, y):
    X = check_rows(x, "x")
    Y = check_rows(y)
    if X.shape[-1] != Y.shape[-1]:
        raise ValueError(f"dimension mismatch: {X.shape[-1]} vs {Y.shape[-1]}")
    X, Y = np.broadcast_arrays(X, Y)
    shape = X.shape[:-1]
    d = X.shape[-1]
    return X.reshape(-1, d), Y.reshape(-1, d), shape


def subdiff_member_mask(x, y, p, tol=DEFAULT_TOL):
    """Vectorised membership of ``y`` in the Capra-subdifferential of l0 at ``x``.

    ``x`` and ``y`` broadcast against each other over leading axes; the
    result has the broadcast leading shape.
    """
    p = PExponent.coerce(p)
    tol = check_tol(tol)
    X, Y, shape = _pairs(x, y)
    member = np.ones(X.shape[0], dtype=bool)
    for _, _, _, ok, active in _condition_table(X, Y, p, tol):
        member &= ok | ~active
    return member.reshape(shape)


def subdiff_member(x, y, p, tol=DEFAULT_TOL):
    """Decide ``y`` in the Capra-subdifferential of l0 at ``x``, with diagnostics.

    Every row of the active case is evaluated and reported, including rows
    after the first failure.

    Examples
    --------
    >>> subdiff_member([1, 0], [1, 0.5], 2).member
    True
    >>> [c.name for c in subdiff_member([1, 0], [0.5, 0], 2).failed]
    ['lower_chain[0]']
    """
    p = PExponent.coerce(p)
    tol = check_tol(tol)
    x = check_vector(x, "x")
    y = check_vector(y)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    conditions = []
    for name, lhs, rhs, ok, active in _condition_table(x[None], y[None], p, tol):
        if active[0]:
            conditions.append(Condition(name, bool(ok[0]), float(lhs[0]), float(rhs[0])))
    return SubdiffVerdict(tuple(conditions))


def in_subdiff_domain(x, p, tol=DEFAULT_TOL):
    """Whether the Capra-subdifferential of l0 at ``x`` is nonempty.

    ``p = 1``: at most one nonzero entry. ``1 < p < inf``: always.
    ``p = inf``: all nonzero magnitudes equal (relative tolerance ``tol``).
    """
    p = PExponent.coerce(p)
    tol = check_tol(tol)
    x = check_vector(x, "x")
    if p.regime == "one":
        return bool(np.count_nonzero(x) <= 1)
    if p.regime == "mid" or not np.any(x):
        return True
    a = np.abs(x[x != 0])
    return bool(close(a.min() / a.max(), 1.0, tol))


def subdiff_witness(x, p, tol=DEFAULT_TOL, max_doublings=200):
    """Construct one element of the Capra-subdifferential of l0 at ``x``.

    At ``x = 0`` this is 0. For ``p = 1`` it is the signed unit vector on the
    single support coordinate, for ``p = inf`` the sign pattern of ``x``.
    For ``1 < p < inf`` it is ``lam * g`` where ``g`` is the unit dual
    supporting functional of ``x`` on its support, and ``lam`` starts at 1
    and doubles until the lower-chain rows hold.

    Raises
    ------
    ValueError
        If ``x`` is outside the domain of the subdifferential.
    RuntimeError
        If ``max_doublings`` is exhausted.
    """
    p = PExponent.coerce(p)
    x = check_vector(x, "x")
    if not in_subdiff_domain(x, p, tol):
        raise ValueError(f"x is outside the subdifferential domain for p={p}")
    if not np.any(x):
        return np.zeros_like(x)
    if p.regime != "mid":
        return np.sign(x)
    on_support = x != 0
    l = int(on_support.sum())
    g = np.sign(x) * (np.abs(x) / _lp_norm_rows(x, p.p)) ** (p.p - 1.0)
    g[~on_support] = 0.0
    lam = 1.0
    for _ in range(max_doublings + 1):
        y = lam * g
        S, R = threshold_rows(y, p.q)
        if np.all(geq(S[:l], R[:l], tol)):
            return y
        lam *= 2.0
    raise RuntimeError("no witness found within the doubling budget")


def lattice(lo, hi, step):
    """Grid coordinates ``lo, lo + step, ...`` up to ``hi``.

    When ``lo`` is an integer multiple of ``step`` the coordinates are
    computed as integer multiples of ``step``, so 0 and small multiples such
    as ``+-1`` land on exact values.
    """
    lo, hi, step = float(lo), float(hi), float(step)
    if not step > 0:
        raise ValueError("step must be positive")
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    k0 = lo / step
    if abs(k0 - round(k0)) < 1e-9:
        return (round(k0) + np.arange(count)) * step
    return lo + np.arange(count) * step


@dataclass
class RegionGrid:
    """Membership flags of a rectangular sweep over the dual plane.

    ``member[i, j]`` refers to the cell ``(y1[j], y2[i])``: rows run along
    ``y2``, columns along ``y1``. ``classes`` is an optional bit mask per cell
    (1: subdifferential at 0, 2: at points with l0 = 1, 4: with l0 = 2).
    """

    y1: np.ndarray
    y2: np.ndarray
    member: np.ndarray
    step: float
    classes: np.ndarray = field(default=None)

    @property
    def shape(self):
        return self.member.shape

    def cells(self):
        """Yield ``(y1, y2, flag)`` in row-major order."""
        for i, b in enumerate(self.y2):
            for j, a in enumerate(self.y1):
                yield a, b, bool(self.member[i, j])


def _window_axes(window, step):
    window = np.asarray(window, dtype=float)
    if window.shape == (2,):
        window = np.stack([window, window])
    if window.shape != (2, 2):
        raise ValueError("window must be (lo, hi) or ((lo1, hi1), (lo2, hi2))")
    return lattice(*window[0], step), lattice(*window[1], step)


def region_sweep(x, p, window, step, tol=DEFAULT_TOL):
    """Sweep the Capra-subdifferential of l0 at a planar ``x`` over a window.

    Parameters
    ----------
    x : array_like, shape (2,)
    p : float, str or PExponent
    window : (lo, hi) or ((lo1, hi1), (lo2, hi2))
    step : float
        Lattice spacing on both axes.
    """
    x = check_vector(x, "x")
    if x.size != 2:
        raise ValueError("region sweeps need d = 2")
    y1, y2 = _window_axes(window, step)
    G1, G2 = np.meshgrid(y1, y2)
    Y = np.stack([G1, G2], axis=-1)
    member = subdiff_member_mask(x, Y, p, tol)
    return RegionGrid(y1, y2, member, float(step))


def primal_partner(Y, support_mask, p):
    """Primal point with the given support whose normal cone holds ``y`` there.

    On the support ``L`` this is ``sign(y_L) |y_L|^(q-1)`` for ``1 < p < inf``
    and ``sign(y_L)`` otherwise (zeros take sign +1). It is, up to positive
    scaling, the only candidate with support ``L`` at which ``y`` can be a
    subgradient, which turns unions of subdifferentials into pointwise tests.
    """
    p = PExponent.coerce(p)
    Y = np.asarray(Y, dtype=float)
    s = np.where(Y >= 0, 1.0, -1.0)
    if p.regime == "mid":
        mag = np.abs(Y) ** (p.q - 1.0)
        X = np.where(mag > 0, s * mag, 0.0)
    else:
        X = s
    return np.where(support_mask, X, 0.0)


def class_union_mask(Y, p, level, tol=DEFAULT_TOL):
    """Membership of each ``y`` in the union of subdifferentials over all ``x`` with ``l0(x) = level``."""
    p = PExponent.coerce(p)
    Y = check_rows(Y)
    d = Y.shape[-1]
    if level == 0:
        return subdiff_member_mask(np.zeros(d), Y, p, tol)
    out = np.zeros(Y.shape[:-1], dtype=bool)
    for L in combinations(range(d), level):
        mask = np.zeros(d, dtype=bool)
        mask[list(L)] = True
        X = primal_partner(Y, mask, p)
        # a partner that lost part of L has the wrong support
        full = np.all(X[..., mask] != 0, axis=-1)
        out |= full & subdiff_member_mask(X, Y, p, tol)
    return out


def region_sweep_classes(p, window, step, tol=DEFAULT_TOL):
    """Union of the Capra-subdifferentials of l0 over all planar ``x``.

    Returns a :class:`RegionGrid` whose ``classes`` bit mask records which
    l0 class of ``x`` contributes each cell; ``member`` is the union.
    """
    p = PExponent.coerce(p)
    y1, y2 = _window_axes(window, step)
    G1, G2 = np.meshgrid(y1, y2)
    Y = np.stack([G1, G2], axis=-1)
    classes = np.zeros(Y.shape[:2], dtype=np.int8)
    for level in range(3):
        classes |= np.where(class_union_mask(Y, p, level, tol), 1 << level, 0).astype(np.int8)
    return RegionGrid(y1, y2, classes > 0, float(step), classes)
