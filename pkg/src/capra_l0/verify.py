"""Oracle-versus-closed-form suites driven by ``capra-l0 verify``."""

from dataclasses import dataclass

import numpy as np

from ._validation import DEFAULT_TOL
from .capra import (
    _conjugate_rows,
    _coupling_rows,
    capra_biconjugate,
    capra_conjugate,
    capra_young_gap,
    in_admissible_dual,
    l0,
)
from .norms import PExponent, top_norm_prefix
from .oracle import (
    GridSpec,
    admissible_dual_by_argmax,
    biconjugate_by_sup,
    conjugate_by_sup,
    coordinate_dual_norm_by_subsets,
)
from .sampling import random_pairs, random_primal
from .subdiff import in_subdiff_domain, subdiff_member, subdiff_member_mask, subdiff_witness

MAX_ORACLE_TRIALS = 100
MAX_SUBSET_DIM = 12


@dataclass
class SuiteResult:
    name: str
    passed: int
    failed: int
    skipped: bool = False

    def __post_init__(self):
        self.passed, self.failed = int(self.passed), int(self.failed)

    @property
    def ok(self):
        return self.failed == 0


def _definitional_equal(X, Y, p, tol):
    gap = _conjugate_rows(Y, p) - (_coupling_rows(X, Y, p.p) - np.count_nonzero(X, axis=-1))
    return np.abs(gap) <= tol


def suite_conjugate_oracle(p, dim, trials, rng, step):
    """Sphere-lattice sup never exceeds the closed form and lags it by < 2 * step."""
    grid = GridSpec(-1.0, 1.0, step, dim)
    passed = failed = 0
    for _ in range(min(trials, MAX_ORACLE_TRIALS)):
        y = rng.uniform(-4.0, 4.0, size=dim)
        exact = capra_conjugate(y, p)
        approx = conjugate_by_sup(y, p, grid)
        good = approx <= exact + 1e-9 and exact - approx < 2 * step
        passed += good
        failed += not good
    return SuiteResult("conjugate_vs_sphere_sup", passed, failed)


def suite_definitional(p, dim, trials, rng, tol):
    """Row-system verdict agrees with the Capra-Young equality."""
    X, Y = random_pairs(rng, trials, dim, p)
    agree = subdiff_member_mask(X, Y, p, tol) == _definitional_equal(X, Y, p, tol)
    return SuiteResult("subdiff_rows_vs_definition", int(agree.sum()), int((~agree).sum()))


def suite_admissible(p, dim, trials, rng, tol):
    """Explicit D_l membership equals the argmax of top norm minus level."""
    passed = failed = 0
    for _ in range(trials):
        y = rng.standard_normal(dim) * rng.uniform(0.3, 4.0)
        closed = {l for l in range(dim + 1) if in_admissible_dual(y, l, p, tol)}
        good = closed == admissible_dual_by_argmax(y, p, tol)
        passed += good
        failed += not good
    return SuiteResult("admissible_dual_vs_argmax", passed, failed)


def suite_top_norm(p, dim, trials, rng):
    """Sorted top-norm formula equals subset enumeration."""
    if dim > MAX_SUBSET_DIM:
        return SuiteResult("top_norm_vs_subsets", 0, 0, skipped=True)
    passed = failed = 0
    for _ in range(min(trials, MAX_ORACLE_TRIALS * 10)):
        y = rng.standard_normal(dim)
        T = top_norm_prefix(y, p.q)
        for k in range(1, dim + 1):
            good = abs(T[k] - coordinate_dual_norm_by_subsets(y, k, p)) <= 1e-12 * max(1.0, T[k])
            passed += good
            failed += not good
    return SuiteResult("top_norm_vs_subsets", passed, failed)


def suite_witness(p, dim, trials, rng, tol):
    """Witnesses are members; in the convex regime they certify biconjugate = l0."""
    X = random_primal(rng, trials, dim, p)
    passed = failed = 0
    for x in X:
        if not in_subdiff_domain(x, p, tol):
            continue
        y = subdiff_witness(x, p, tol)
        good = subdiff_member(x, y, p, tol).member
        if p.regime == "mid":
            good = good and abs(capra_young_gap(x, y, p, exact=True)) <= tol
        passed += good
        failed += not good
    return SuiteResult("witness_validity", passed, failed)


def suite_domain(p, dim, trials, rng, tol):
    """Outside the domain no dual point satisfies the Capra-Young equality."""
    if p.regime == "mid" or dim < 2:
        return SuiteResult("empty_outside_domain", 0, 0, skipped=True)
    X = rng.standard_normal((trials, dim))
    X[:, :2] = np.abs(X[:, :2]) + 0.1
    X[:, 1] *= 1.5  # two unequal nonzero magnitudes: outside the domain for p = 1 and p = inf
    axis = np.linspace(-3.0, 3.0, 13)
    coarse = np.stack(np.meshgrid(*([axis] * min(dim, 3))), axis=-1).reshape(-1, min(dim, 3))
    passed = failed = 0
    for x in X:
        Y = rng.uniform(-4.0, 4.0, size=(64, dim))
        C = np.zeros((coarse.shape[0], dim))
        C[:, : coarse.shape[1]] = coarse
        Y = np.vstack([Y, C, np.sign(x), np.sign(x) * 2.0])
        Xs = np.broadcast_to(x, Y.shape)
        good = (
            not in_subdiff_domain(x, p, tol)
            and not subdiff_member_mask(Xs, Y, p, tol).any()
            and not _definitional_equal(Xs, Y, p, tol).any()
        )
        passed += good
        failed += not good
    return SuiteResult("empty_outside_domain", passed, failed)


def suite_biconjugate(p, dim, trials, rng, step, tol, radius=6.0):
    """Box-lattice sup of the biconjugate: below l0, below and close to the closed form."""
    if dim > 2:
        return SuiteResult("biconjugate_vs_box_sup", 0, 0, skipped=True)
    grid = GridSpec(-radius, radius, max(step, 0.05), dim)
    passed = failed = 0
    for x in random_primal(rng, min(trials, 5), dim, p):
        exact = capra_biconjugate(x, p)
        approx = biconjugate_by_sup(x, p, grid)
        good = approx <= exact + tol and approx <= l0(x) + tol
        near = p.regime != "mid" or np.abs(subdiff_witness(x, p)).max() <= radius
        if near:
            good = good and exact - approx <= 4 * grid.step
        passed += good
        failed += not good
    return SuiteResult("biconjugate_vs_box_sup", passed, failed)


def run_all(p, dim, trials, seed, step, tol=DEFAULT_TOL):
    """Run every suite and return their results in a fixed order."""
    p = PExponent.coerce(p)
    if dim < 1 or trials < 1 or not step > 0:
        raise ValueError("dim and trials must be positive and step > 0")
    rng = np.random.default_rng(seed)
    return [
        suite_conjugate_oracle(p, dim, trials, rng, step),
        suite_definitional(p, dim, trials, rng, tol),
        suite_admissible(p, dim, trials, rng, tol),
        suite_top_norm(p, dim, trials, rng),
        suite_witness(p, dim, trials, rng, tol),
        suite_domain(p, dim, trials, rng, tol),
        suite_biconjugate(p, dim, trials, rng, step, tol),
    ]
