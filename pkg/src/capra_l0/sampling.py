"""Random instance generators for the cross-check suites.

Pure uniform draws almost never land in a Capra-subdifferential, so the pair
generator mixes uniform dual points with dual points built around the
supporting functional of ``x``; the latter fall on both sides of every
condition row.
"""

import numpy as np

from .norms import PExponent, _lp_norm_rows


def random_primal(rng, n, d, p):
    """Primal points with a spread of supports, including the origin.

    For ``p = inf`` most points are drawn from ``{-lam, 0, lam}^d`` (the
    subdifferential domain); for ``p = 1`` half of them are 1-sparse.
    """
    p = PExponent.coerce(p)
    X = rng.standard_normal((n, d)) * rng.uniform(0.2, 3.0, size=(n, 1))
    sizes = rng.integers(0, d + 1, size=n)
    if p.regime == "one":
        sizes = np.where(rng.random(n) < 0.5, rng.integers(0, 2, size=n), sizes)
    keep = np.argsort(rng.random((n, d)), axis=1) < sizes[:, None]
    X = np.where(keep, X, 0.0)
    if p.regime == "inf":
        lattice = rng.random(n) < 0.7
        lam = rng.uniform(0.2, 3.0, size=(n, 1))
        X = np.where(lattice[:, None], np.sign(X) * lam, X)
    return X


def supporting_direction(X, p):
    """Unit dual-norm direction aligned with each row of ``X`` on its support."""
    p = PExponent.coerce(p)
    if p.regime == "mid":
        nx = _lp_norm_rows(X, p.p)
        safe = np.where(nx > 0, nx, 1.0)
        return np.sign(X) * (np.abs(X) / safe[:, None]) ** (p.p - 1.0)
    if p.regime == "inf":
        return np.sign(X)
    # p = 1: the largest entry carries the whole dual norm
    G = np.zeros_like(X)
    rows = np.arange(X.shape[0])
    j = np.abs(X).argmax(axis=1)
    G[rows, j] = np.sign(X[rows, j])
    return G


def random_pairs(rng, n, d, p):
    """``n`` pairs ``(x, y)`` of which a sizeable share are subdifferential members."""
    p = PExponent.coerce(p)
    X = random_primal(rng, n, d, p)
    G = supporting_direction(X, p)
    lam = np.exp(rng.uniform(np.log(0.5), np.log(40.0), size=(n, 1)))
    Y_L = lam * G
    on = X != 0
    low = np.where(on, np.abs(Y_L), np.inf).min(axis=1, keepdims=True)
    low = np.where(np.isfinite(low), low, 1.0)
    off = rng.uniform(-1.0, 1.0, size=(n, d)) * low * rng.uniform(0.0, 1.3, size=(n, 1))
    built = np.where(on, Y_L, off)
    plain = rng.uniform(-1.0, 1.0, size=(n, d)) * rng.uniform(0.3, 4.0, size=(n, 1))
    Y = np.where((rng.random(n) < 0.6)[:, None], built, plain)
    return X, Y
