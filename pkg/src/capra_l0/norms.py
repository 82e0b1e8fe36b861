"""lp norms, Hölder duality, top-(k, q) norms and normal cones of lp balls.

Every function that takes vectors works along the last axis, so a stack of
vectors of shape ``(n, d)`` is evaluated row by row.
"""

from dataclasses import dataclass
import math

import mpmath
import numpy as np

from ._validation import DEFAULT_TOL, check_rows, check_tol, check_vector


@dataclass(frozen=True)
class PExponent:
    """Exponent ``p`` of an lp source norm, with its Hölder conjugate ``q``.

    ``p`` is a float in ``[1, inf]``; ``math.inf`` stands for the sup norm.
    The three regimes ``p == 1``, ``1 < p < inf`` and ``p == inf`` are
    distinguished everywhere a closed form changes shape.

    Examples
    --------
    >>> PExponent(2).q
    2.0
    >>> PExponent.parse("inf").q
    1.0
    """

    p: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1.0:
            raise ValueError(f"p must lie in [1, inf], got {self.p!r}")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, text):
        """Read ``p`` from a string such as ``"2"``, ``"1.5"`` or ``"inf"``."""
        s = str(text).strip().lower()
        if s in ("inf", "infinity", "+inf", "∞"):
            return cls(math.inf)
        try:
            value = float(s)
        except ValueError:
            raise ValueError(f"cannot read p from {text!r}") from None
        return cls(value)

    @classmethod
    def coerce(cls, p):
        if isinstance(p, cls):
            return p
        if isinstance(p, str):
            return cls.parse(p)
        return cls(p)

    @property
    def q(self):
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    @property
    def regime(self):
        """One of ``"one"``, ``"mid"`` or ``"inf"``."""
        if self.p == 1.0:
            return "one"
        if math.isinf(self.p):
            return "inf"
        return "mid"

    @property
    def dual(self):
        return PExponent(self.q)

    def __str__(self):
        return "inf" if math.isinf(self.p) else f"{self.p:g}"


def _lp_norm_rows(Y, p):
    A = np.abs(Y)
    if math.isinf(p):
        return A.max(axis=-1)
    if p == 1.0:
        return A.sum(axis=-1)
    # rescale by the max entry so tiny or huge vectors neither under- nor overflow
    m = A.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    return m[..., 0] * np.sum((A / safe) ** p, axis=-1) ** (1.0 / p)


def lp_norm(y, p):
    """lp norm of ``y`` (or of each row of a stack).

    >>> lp_norm([3, 4], 2)
    5.0
    """
    p = PExponent.coerce(p)
    Y = check_rows(y)
    out = _lp_norm_rows(Y, p.p)
    return float(out) if out.ndim == 0 else out


def sort_abs(y):
    """0-based permutation sorting ``y`` by decreasing absolute value.

    Ties keep ascending original index (stable sort).

    >>> sort_abs([3, -1, 2]).tolist()
    [0, 2, 1]
    """
    y = check_vector(y)
    return np.argsort(-np.abs(y), kind="stable")


def sorted_abs(Y):
    """Absolute values sorted in decreasing order along the last axis."""
    return -np.sort(-np.abs(Y), axis=-1)


def top_norm_prefix(Y, q):
    """All top-(k, q) norms of each row, for k = 0, ..., d.

    Returns an array of shape ``(..., d + 1)`` whose entry ``k`` is
    ``top_norm(y, k, q)``; entry 0 is the seminorm convention value 0.
    """
    q = float(q)
    S = sorted_abs(np.asarray(Y, dtype=float))
    zeros = np.zeros(S.shape[:-1] + (1,))
    if math.isinf(q):
        T = np.broadcast_to(S[..., :1], S.shape).copy()
        return np.concatenate([zeros, T], axis=-1)
    if q == 1.0:
        return np.concatenate([zeros, np.cumsum(S, axis=-1)], axis=-1)
    m = S[..., :1]
    safe = np.where(m > 0, m, 1.0)
    T = m * np.cumsum((S / safe) ** q, axis=-1) ** (1.0 / q)
    return np.concatenate([zeros, T], axis=-1)


def top_norm(y, k, q):
    """Top-(k, q) norm: lq norm of the ``k`` largest-magnitude entries.

    For ``q = inf`` every ``k >= 1`` gives the sup norm. ``k = 0`` returns 0
    (a seminorm by convention, not a norm).

    Parameters
    ----------
    y : array_like, shape (..., d)
    k : int
        Number of retained entries, ``0 <= k <= d``.
    q : float or PExponent
        Exponent of the lq norm applied to the retained entries.
    """
    q = PExponent.coerce(q).p
    Y = check_rows(y)
    d = Y.shape[-1]
    k = int(k)
    if not 0 <= k <= d:
        raise ValueError(f"k must lie in [0, {d}], got {k}")
    out = top_norm_prefix(Y, q)[..., k]
    return float(out) if out.ndim == 0 else out


def normal_cone_alignment(U, Y, p):
    """Cosine-like ratio ``<u, y> / (||u||_p ||y||_q)``, 1 where ``y = 0``.

    By Hölder the ratio is at most 1, with equality exactly when ``y`` lies
    in the normal cone of the unit lp ball at ``u / ||u||_p``.
    """
    p = PExponent.coerce(p)
    U = np.asarray(U, dtype=float)
    Y = np.asarray(Y, dtype=float)
    # pre-scale by the max entries so subnormal inputs keep their direction
    U = U / np.abs(U).max(axis=-1, keepdims=True)
    my = np.abs(Y).max(axis=-1, keepdims=True)
    Y = Y / np.where(my > 0, my, 1.0)
    nu = _lp_norm_rows(U, p.p)
    ny = _lp_norm_rows(Y, p.q)
    U_hat = U / np.expand_dims(nu, -1)
    safe = np.where(ny > 0, ny, 1.0)
    Y_hat = Y / np.expand_dims(safe, -1)
    inner = np.sum(U_hat * Y_hat, axis=-1)
    return np.where(ny > 0, inner, 1.0)


def normal_cone_member_lp(u_base, y, p, tol=DEFAULT_TOL):
    """Decide whether ``y`` is normal to the unit lp ball at ``u_base / ||u_base||_p``.

    Tests the Hölder equality ``<u, y> = ||u||_p ||y||_q`` with relative
    tolerance ``tol``; ``y = 0`` always belongs to the cone. Both arguments
    may be scaled by positive factors without changing the answer.

    Raises
    ------
    ValueError
        If ``u_base`` is the zero vector.
    """
    p = PExponent.coerce(p)
    tol = check_tol(tol)
    u = check_vector(u_base, "u_base")
    y = check_vector(y)
    if u.shape != y.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {y.shape}")
    if not np.any(u):
        raise ValueError("u_base must be nonzero")
    return bool(normal_cone_alignment(u, y, p) >= 1.0 - tol)


def _exactly_smaller(x, x_prime, p):
    """Extended-precision test of ``||x||_p < ||x'||_p`` for finite ``p``."""
    with mpmath.workdps(120):
        mp_p = mpmath.mpf(p)
        s = mpmath.fsum(mpmath.mpf(abs(float(v))) ** mp_p for v in x)
        sp = mpmath.fsum(mpmath.mpf(abs(float(v))) ** mp_p for v in x_prime)
        return bool(s < sp)


def osm_falsify(p, d, trials, rng_seed):
    """Search for a pair showing the lp norm is not orthant-strictly monotonic.

    Each trial draws ``x'`` from a standard Gaussian and sets ``x = x'`` with
    one random coordinate shrunk by a uniform factor in ``[0, 1)``, so that
    ``|x| < |x'|`` (one strict coordinate) and ``x * x' >= 0`` hold by
    construction. Returns the first pair with ``||x||_p >= ||x'||_p``, or
    ``None`` when every trial passes.

    Near-ties in floating point are resolved in extended precision, so a
    returned pair is a genuine violation rather than a rounding artefact.
    """
    p = PExponent.coerce(p)
    d = int(d)
    trials = int(trials)
    if d < 2:
        raise ValueError("d must be at least 2")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(rng_seed)
    X_prime = rng.standard_normal((trials, d))
    idx = rng.integers(0, d, size=trials)
    shrink = rng.random(trials)
    X = X_prime.copy()
    rows = np.arange(trials)
    X[rows, idx] *= shrink
    if p.regime == "inf":
        # max of absolute values is exact in floating point
        bad = np.abs(X).max(axis=1) >= np.abs(X_prime).max(axis=1)
        unsure = np.zeros(trials, dtype=bool)
    else:
        nx = _lp_norm_rows(X, p.p)
        nxp = _lp_norm_rows(X_prime, p.p)
        margin = 8 * np.finfo(float).eps * nxp
        bad = nx - nxp > margin
        unsure = ~bad & (nxp - nx <= margin)
    for i in np.flatnonzero(bad | unsure):
        if bad[i] or not _exactly_smaller(X[i], X_prime[i], p.p):
            return X[i], X_prime[i]
    return None
