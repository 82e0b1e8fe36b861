"""The l0 pseudonorm and its conjugacy objects under the Capra coupling.

The Capra coupling replaces the scalar product by ``<x, y> / ||x||_p``
(0 at ``x = 0``), so every quantity here is constant along primal rays.
"""

import mpmath
import numpy as np

from ._validation import DEFAULT_TOL, check_rows, check_tol, check_vector, geq, leq
from .norms import PExponent, _lp_norm_rows, sorted_abs, top_norm_prefix


def _scalar(out):
    return out.item() if np.ndim(out) == 0 else out


def l0(x):
    """Number of nonzero entries (exact-zero test, no threshold).

    >>> l0([1, 0, -3])
    2
    """
    X = check_rows(x, "x")
    out = np.count_nonzero(X, axis=-1)
    return int(out) if np.ndim(out) == 0 else out


def support(x):
    """Sorted 0-based indices of the nonzero entries of ``x``."""
    return np.flatnonzero(check_vector(x, "x"))


def capra_coupling(x, y, p):
    """Capra coupling ``<x, y> / ||x||_p``, and 0 when ``x = 0``.

    Broadcasts over leading axes of ``x`` and ``y``.
    """
    p = PExponent.coerce(p)
    X = check_rows(x, "x")
    Y = check_rows(y)
    if X.shape[-1] != Y.shape[-1]:
        raise ValueError(f"dimension mismatch: {X.shape[-1]} vs {Y.shape[-1]}")
    return _scalar(_coupling_rows(X, Y, p.p))


def _coupling_rows(X, Y, p):
    nx = _lp_norm_rows(X, p)
    safe = np.where(nx > 0, nx, 1.0)
    X_hat = X / np.expand_dims(safe, -1)
    return np.sum(X_hat * Y, axis=-1)


def _conjugate_rows(Y, p):
    T = top_norm_prefix(Y, p.q)
    d = Y.shape[-1]
    levels = np.arange(1, d + 1)
    return np.maximum(np.max(T[..., 1:] - levels, axis=-1), 0.0)


def capra_conjugate(y, p):
    """Capra conjugate of l0: ``max_j (top_norm(y, j, q) - j)^+`` over j = 1..d.

    For ``p = 1`` this equals ``(||y||_inf - 1)^+`` and for ``p = inf`` it
    equals the sum of ``(|y_k| - 1)^+``; both collapses are asserted against
    the generic formula unless Python runs with ``-O``.

    >>> capra_conjugate([2, 0], 2)
    1.0
    """
    p = PExponent.coerce(p)
    Y = check_rows(y)
    out = _conjugate_rows(Y, p)
    if __debug__ and p.regime != "mid":
        A = np.abs(Y)
        if p.regime == "one":
            collapsed = np.maximum(A.max(axis=-1) - 1.0, 0.0)
        else:
            collapsed = np.sum(np.maximum(A - 1.0, 0.0), axis=-1)
        assert np.allclose(out, collapsed, rtol=1e-12, atol=1e-12), (out, collapsed)
    return _scalar(out)


def _exact_conjugate(a, p):
    a = sorted(a, reverse=True)
    if p.regime == "inf":
        return mpmath.fsum(max(v - 1, 0) for v in a)
    if p.regime == "one":
        return max(a[0] - 1, mpmath.mpf(0))
    q = mpmath.mpf(p.q)
    best, acc = mpmath.mpf(0), mpmath.mpf(0)
    for j, v in enumerate(a, start=1):
        acc += v**q
        best = max(best, acc ** (1 / q) - j)
    return best


def capra_young_gap(x, y, p, exact=False):
    """Slack ``capra_coupling(x, y) - l0(x) - capra_conjugate(y)``, always <= 0.

    It vanishes exactly when ``y`` is a Capra-subgradient of l0 at ``x``.
    Subgradients at points with small relative entries are necessarily large
    vectors, and the float difference then loses absolute precision; with
    ``exact=True`` the float inputs are evaluated in 60-digit arithmetic and
    only the small result is rounded.

    >>> capra_young_gap([1, 0], [0.5, 0], 2)
    -0.5
    """
    p = PExponent.coerce(p)
    x = check_vector(x, "x")
    y = check_vector(y)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if not exact:
        gap = _coupling_rows(x, y, p.p) - np.count_nonzero(x) - _conjugate_rows(y, p)
        return float(gap)
    with mpmath.workdps(60):
        X = [mpmath.mpf(float(v)) for v in x]
        Y = [mpmath.mpf(float(v)) for v in y]
        conj = _exact_conjugate([abs(v) for v in Y], p)
        if any(X):
            if p.regime == "inf":
                nx = max(abs(v) for v in X)
            else:
                pp = mpmath.mpf(p.p)
                nx = mpmath.fsum(abs(v) ** pp for v in X) ** (1 / pp)
            coupling = mpmath.fdot(X, Y) / nx
        else:
            coupling = mpmath.mpf(0)
        return float(coupling - np.count_nonzero(x) - conj)


def capra_biconjugate(x, p):
    """Capra biconjugate of l0, from its closed forms.

    ``p = 1`` gives 1 off the origin, ``1 < p < inf`` gives back ``l0`` and
    ``p = inf`` gives ``||x||_1 / ||x||_inf``. All vanish at ``x = 0``.
    """
    p = PExponent.coerce(p)
    X = check_rows(x, "x")
    nonzero = np.any(X != 0, axis=-1)
    if p.regime == "one":
        out = nonzero.astype(float)
    elif p.regime == "mid":
        out = np.count_nonzero(X, axis=-1).astype(float)
    else:
        A = np.abs(X)
        m = A.max(axis=-1)
        out = np.where(nonzero, A.sum(axis=-1) / np.where(nonzero, m, 1.0), 0.0)
    return _scalar(out)


def threshold_rows(Y, q):
    """Sorted magnitudes and the level thresholds behind the sets D_l.

    Returns ``(S, R)`` where ``S[..., k] = |y_nu(k+1)|**q`` and
    ``R[..., k] = (T_k + 1)**q - T_k**q`` with ``T_k = top_norm(y, k, q)``,
    for k = 0, ..., d - 1 (finite ``q`` only).
    """
    S = sorted_abs(Y)
    T = top_norm_prefix(Y, q)[..., :-1]
    # for T > 1 the plain difference cancels; T^q ((1 + 1/T)^q - 1) does not
    big = np.maximum(T, 1.0)
    R = np.where(T > 1.0, big**q * np.expm1(q * np.log1p(1.0 / big)), (T + 1.0) ** q - T**q)
    return S**q, R


def in_admissible_dual(y, l, p, tol=DEFAULT_TOL):
    """Whether level ``l`` maximizes ``j -> top_norm(y, j, q) - j`` over 0..d.

    Uses the explicit characterisation of D_l: for ``p = 1`` the sup-norm
    rows; otherwise the lower chain ``|y_nu(k+1)|^q >= (T_k+1)^q - T_k^q``
    for ``k < l`` and, unless ``l = d``, the upper row at ``k = l``.
    Inequalities are non-strict; ``tol`` only absorbs rounding.
    """
    p = PExponent.coerce(p)
    tol = check_tol(tol)
    y = check_vector(y)
    d = y.size
    l = int(l)
    if not 0 <= l <= d:
        raise ValueError(f"l must lie in [0, {d}], got {l}")
    if p.regime == "one":
        m = np.abs(y).max()
        if l == 0:
            return bool(leq(m, 1.0, tol))
        if l == 1:
            return bool(geq(m, 1.0, tol))
        return False
    S, R = threshold_rows(y, p.q)
    if not np.all(geq(S[:l], R[:l], tol)):
        return False
    if l < d and not leq(S[l], R[l], tol):
        return False
    return True


def admissible_levels(y, p, tol=DEFAULT_TOL):
    """All levels ``l`` with ``y`` in D_l, from the explicit characterisation."""
    y = check_vector(y)
    return {l for l in range(y.size + 1) if in_admissible_dual(y, l, p, tol)}


def classical_subdiff(x):
    """Fenchel subdifferential of l0 as a descriptor: ``"{0}"`` at 0, else ``"empty"``."""
    x = check_vector(x, "x")
    return "{0}" if not np.any(x) else "empty"


def frechet_family_subdiff_member(x, y):
    """Membership in the Fréchet / proximal / limiting subdifferential of l0.

    All these notions agree for l0: ``y`` is a member iff it vanishes on the
    support of ``x``.
    """
    x = check_vector(x, "x")
    y = check_vector(y)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return bool(np.all(y[x != 0] == 0))
