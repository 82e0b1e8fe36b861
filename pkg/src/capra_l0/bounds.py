"""Lower bounds of l0 as maxima of Capra-affine functions.

A Capra-affine function is ``x -> coupling(x, y) - z``. Taking ``y`` in the
Capra-subdifferential of l0 at a sample ``x_i`` and ``z`` the conjugate of
l0 at ``y`` gives a function below l0 everywhere and equal to it at ``x_i``
(for ``1 < p < inf``, where l0 is Capra-convex).
"""

from dataclasses import dataclass
import json
import math
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import DEFAULT_TOL, check_rows, check_vector
from .capra import _conjugate_rows, _coupling_rows, capra_conjugate
from .norms import PExponent, _lp_norm_rows
from .subdiff import subdiff_member, subdiff_witness

FORMAT = "capra-l0-model"


class CapraAffinePiece(NamedTuple):
    dual_point: np.ndarray
    offset: float


def _require_convex_regime(p):
    if p.regime != "mid":
        raise ValueError(f"lower-bound models need 1 < p < inf, got p={p}")


@dataclass(frozen=True, eq=False)
class CapraAffineModel:
    """Immutable max-of-Capra-affine underestimator of l0.

    Attributes
    ----------
    p : PExponent
    dual_points : ndarray, shape (m, d)
        One dual point per piece; row ``i`` lies in the subdifferential at
        ``samples[i]``.
    offsets : ndarray, shape (m,)
        Conjugate of l0 at each dual point.
    samples : ndarray, shape (m, d)
    """

    p: PExponent
    dual_points: np.ndarray
    offsets: np.ndarray
    samples: np.ndarray

    def __post_init__(self):
        for name in ("dual_points", "offsets", "samples"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        m = self.offsets.shape[0]
        if m == 0:
            raise ValueError("a model needs at least one piece")
        if self.dual_points.shape[0] != m or self.samples.shape != self.dual_points.shape:
            raise ValueError("pieces and samples disagree in count or dimension")
        expected = _conjugate_rows(self.dual_points, self.p)
        if not np.allclose(self.offsets, expected, rtol=1e-12, atol=1e-12):
            raise ValueError("offsets must equal the conjugate of l0 at the dual points")

    @property
    def d(self):
        return self.dual_points.shape[1]

    @property
    def pieces(self):
        return [CapraAffinePiece(y, float(z)) for y, z in zip(self.dual_points, self.offsets)]

    def affine_values(self, x):
        """Value of each Capra-affine piece at ``x``; shape ``(..., m)``."""
        X = check_rows(x, "x")
        if X.shape[-1] != self.d:
            raise ValueError(f"model has dimension {self.d}, got {X.shape[-1]}")
        nx = _lp_norm_rows(X, self.p.p)
        safe = np.where(nx > 0, nx, 1.0)
        X_hat = X / np.expand_dims(safe, -1)
        return X_hat @ self.dual_points.T - self.offsets

    def __call__(self, x):
        return eval_model(self, x)


def build_model(samples, p, tol=DEFAULT_TOL):
    """Assemble a lower-bound model from sample points.

    Each sample gets the canonical subdifferential witness as dual point.

    Raises
    ------
    ValueError
        On an empty sample list or when ``p`` is 1 or inf.
    """
    p = PExponent.coerce(p)
    _require_convex_regime(p)
    X = np.asarray(samples, dtype=float)
    if X.ndim == 1 and X.size:
        X = X[None]
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("samples must be a nonempty list of vectors")
    dual = np.array([subdiff_witness(check_vector(x, "sample"), p, tol) for x in X])
    offsets = np.array([capra_conjugate(y, p) for y in dual])
    return CapraAffineModel(p, dual, offsets, X)


def eval_model(model, x):
    """``max_i coupling(x, y_i) - offset_i``; broadcasts over leading axes of ``x``."""
    out = model.affine_values(x).max(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def sphere_samples(n, d, p, rng=None):
    """``n`` points on the unit p-sphere.

    For ``d = 2`` the points are evenly spaced in angle starting on the
    first axis; otherwise they are normalised Gaussian draws from ``rng``.
    Coordinates within 1e-12 of zero are snapped to exactly zero so that axis
    points keep their true support.
    """
    p = PExponent.coerce(p)
    if d == 2:
        t = 2 * math.pi * np.arange(n) / n
        X = np.stack([np.cos(t), np.sin(t)], axis=1)
    else:
        rng = np.random.default_rng(rng)
        X = rng.standard_normal((n, d))
    X[np.abs(X) < 1e-12] = 0.0
    return X / _lp_norm_rows(X, p.p)[:, None]


def _num(v):
    return format(float(v), ".17g")


def dumps_model(model):
    """Serialise to a JSON document; numbers carry 17 significant digits."""
    rows = lambda M: "[" + ", ".join("[" + ", ".join(_num(v) for v in r) + "]" for r in M) + "]"
    pieces = ",\n    ".join(
        '{"y": [' + ", ".join(_num(v) for v in y) + '], "offset": ' + _num(z) + "}"
        for y, z in zip(model.dual_points, model.offsets)
    )
    from . import __version__

    return (
        "{\n"
        f'  "format": "{FORMAT}",\n'
        f'  "version": "{__version__}",\n'
        f'  "p": "{model.p}",\n'
        f'  "pieces": [\n    {pieces}\n  ],\n'
        f'  "samples": {rows(model.samples)}\n'
        "}\n"
    )


def loads_model(text):
    """Inverse of :func:`dumps_model`; re-validates the offsets."""
    doc = json.loads(text)
    if doc.get("format") != FORMAT:
        raise ValueError("not a capra-l0 model document")
    p = PExponent.parse(doc["p"])
    dual = [piece["y"] for piece in doc["pieces"]]
    offsets = [piece["offset"] for piece in doc["pieces"]]
    return CapraAffineModel(p, dual, offsets, doc["samples"])


class CapraL0LowerBound(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :class:`CapraAffineModel`.

    ``fit`` takes the sample points, ``transform`` returns the value of each
    Capra-affine piece and ``predict`` the lower bound itself.

    Parameters
    ----------
    p : float or str, default=2.0
        Source-norm exponent, strictly between 1 and inf.
    tol : float, default=1e-9
        Tolerance used when constructing the subdifferential witnesses.

    Examples
    --------
    >>> est = CapraL0LowerBound(p=2).fit([[1.0, 0.0]])
    >>> est.predict([[3.0, 0.0], [0.0, 1.0]]).tolist()
    [1.0, 0.0]
    """

    def __init__(self, p=2.0, tol=DEFAULT_TOL):
        self.p = p
        self.tol = tol

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=1)
        self.model_ = build_model(X, self.p, self.tol)
        self.n_features_in_ = X.shape[1]
        return self

    @property
    def dual_points_(self):
        check_is_fitted(self, "model_")
        return self.model_.dual_points

    @property
    def offsets_(self):
        check_is_fitted(self, "model_")
        return self.model_.offsets

    def transform(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        return self.model_.affine_values(X)

    def predict(self, X):
        return self.transform(X).max(axis=1)

    def certify(self, tol=DEFAULT_TOL):
        """Check every dual point against the exact subdifferential rows."""
        check_is_fitted(self, "model_")
        m = self.model_
        return all(subdiff_member(x, y, m.p, tol).member for x, y in zip(m.samples, m.dual_points))
