import math

from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
import numpy as np
import pytest

from capra_l0 import (
    capra_conjugate,
    capra_coupling,
    capra_young_gap,
    in_subdiff_domain,
    l0,
    region_sweep,
    region_sweep_classes,
    subdiff_member,
    subdiff_member_mask,
    subdiff_witness,
)
from capra_l0.sampling import random_pairs, random_primal
from capra_l0.subdiff import lattice

P_VALUES = [1, 1.5, 2, 3, math.inf]
TOL = 1e-9


def definitional(x, y, p):
    return abs(capra_conjugate(y, p) - (capra_coupling(x, y, p) - l0(x))) <= TOL


class TestVerdictExamples:
    def test_colinear_member(self):
        v = subdiff_member([1, 0], [1, 0.5], 2)
        assert v.member and bool(v)
        assert [c.name for c in v.conditions] == ["normal_cone", "off_support", "lower_chain[0]", "upper"]

    def test_short_dual_fails_lower_chain(self):
        v = subdiff_member([1, 0], [0.5, 0], 2)
        assert not v.member
        (failed,) = v.failed
        assert failed.name == "lower_chain[0]"
        assert failed.lhs == pytest.approx(0.25) and failed.rhs == pytest.approx(1.0)
        # oracle side: conj(y) = 0 but coupling - l0 = -0.5
        assert not definitional([1, 0], [0.5, 0], 2)

    @pytest.mark.parametrize("p", P_VALUES)
    def test_origin_is_unit_ball(self, p):
        assert subdiff_member([0, 0], [1, 1], p).member
        assert subdiff_member([0, 0], [-1, 0.3], p).member
        assert not subdiff_member([0, 0], [1.01, 0], p).member

    def test_linf_full_support(self):
        v = subdiff_member([1, 1], [2, 1], "inf")
        assert v.member
        assert "upper" not in [c.name for c in v.conditions]

    @pytest.mark.parametrize("y", [[1, 1], [2, 1], [0, 0], [1, 0.5]])
    def test_linf_outside_domain(self, y):
        v = subdiff_member([2, 1], y, "inf")
        assert not v.member
        assert "domain" in [c.name for c in v.failed]

    def test_l1_domain_failure(self):
        v = subdiff_member([1, 2], [1, 1], 1)
        assert not v.member
        assert [c.name for c in v.failed] == ["domain"]

    def test_full_ledger_after_first_failure(self):
        v = subdiff_member([1, 0, 0], [0.1, 0.5, 0], 2)
        names = [c.name for c in v.conditions]
        assert names[0] == "normal_cone" and "upper" in names
        assert len(v.failed) >= 2

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            subdiff_member([1, 0], [1, 0, 0], 2)

    @settings(max_examples=200)
    @given(st.integers(0, 10**6), st.sampled_from(P_VALUES), st.integers(2, 5))
    def test_member_iff_all_conditions(self, seed, p, d):
        X, Y = random_pairs(np.random.default_rng(seed), 1, d, p)
        v = subdiff_member(X[0], Y[0], p)
        assert v.member == all(c.satisfied for c in v.conditions)
        assert v.member == (not v.failed)


class TestDomain:
    def test_examples(self):
        assert in_subdiff_domain([0, 3, 0], 1)
        assert not in_subdiff_domain([1, 2], 1)
        assert in_subdiff_domain([-2, 0, 2], "inf")
        assert not in_subdiff_domain([2, 1], "inf")
        assert in_subdiff_domain([2, 1, -7], 2)
        assert in_subdiff_domain([0, 0], "inf")


class TestWitness:
    def test_examples(self):
        np.testing.assert_array_equal(subdiff_witness([0, 0], 2), [0, 0])
        np.testing.assert_array_equal(subdiff_witness([1, 1], "inf"), [1, 1])
        np.testing.assert_allclose(subdiff_witness([1, 0], 2), [1, 0])
        np.testing.assert_array_equal(subdiff_witness([0, -3, 0], 1), [0, -1, 0])

    def test_rejects_out_of_domain(self):
        with pytest.raises(ValueError):
            subdiff_witness([1, 2], 1)

    def test_doubling_guard(self):
        with pytest.raises(RuntimeError):
            subdiff_witness([1, 1, 1], 2, max_doublings=0)

    @pytest.mark.parametrize("p", P_VALUES)
    def test_validity(self, p, rng):
        for x in random_primal(rng, 2000, 4, p):
            if in_subdiff_domain(x, p):
                y = subdiff_witness(x, p)
                assert subdiff_member(x, y, p).member, (x, y)
                assert abs(capra_young_gap(x, y, p, exact=True)) <= TOL


class TestInvariants:
    @pytest.mark.parametrize("p", P_VALUES)
    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_definitional_equivalence(self, p, d, rng):
        X, Y = random_pairs(rng, 4000, d, p)
        mask = subdiff_member_mask(X, Y, p)
        gap = capra_conjugate(Y, p) - (capra_coupling_rows(X, Y, p) - l0(X))
        np.testing.assert_array_equal(mask, np.abs(gap) <= TOL)
        assert mask.any() and not mask.all()

    @pytest.mark.parametrize("p", P_VALUES)
    def test_ray_invariance(self, p, rng):
        X, Y = random_pairs(rng, 2000, 3, p)
        base = subdiff_member_mask(X, Y, p)
        for alpha in (0.25, 3.0, 1e3):
            np.testing.assert_array_equal(subdiff_member_mask(alpha * X, Y, p), base)

    @pytest.mark.parametrize("p", [1.5, 2, 3, math.inf])
    def test_convexity_spot_check(self, p, rng):
        X, Y = random_pairs(rng, 3000, 3, p)
        checked = 0
        for x in np.unique(X, axis=0)[:200]:
            if not in_subdiff_domain(x, p):
                continue
            w = subdiff_witness(x, p)
            members = [w, 3 * w]
            members += [y for xx, y in zip(X, Y) if np.array_equal(xx, x) and subdiff_member(x, y, p)]
            for a in members:
                for b in members:
                    assert subdiff_member(x, (a + b) / 2, p).member
                    checked += 1
        assert checked > 0

    def test_mask_matches_scalar(self, rng):
        for p in P_VALUES:
            X, Y = random_pairs(rng, 300, 3, p)
            mask = subdiff_member_mask(X, Y, p)
            assert mask.tolist() == [subdiff_member(x, y, p).member for x, y in zip(X, Y)]

    def test_mask_broadcasts(self):
        Y = np.array([[1, 0.5], [0.5, 0], [3, 3]])
        assert subdiff_member_mask([1, 0], Y, 2).tolist() == [True, False, False]

    @pytest.mark.parametrize("p", [1, math.inf])
    def test_empty_outside_domain(self, p, rng):
        x = np.array([1.0, 2.0, 0.0]) if p == 1 else np.array([2.0, 1.0, 0.0])
        axis = np.linspace(-4, 4, 33)
        Y = np.stack(np.meshgrid(axis, axis, axis), axis=-1).reshape(-1, 3)
        assert not subdiff_member_mask(x, Y, p).any()
        gap = capra_conjugate(Y, p) - (capra_coupling_rows(np.broadcast_to(x, Y.shape), Y, p) - l0(x))
        assert not np.any(np.abs(gap) <= TOL)


def capra_coupling_rows(X, Y, p):
    return np.array([capra_coupling(x, y, p) for x, y in zip(X, Y)])


class TestLattice:
    def test_integer_multiples(self):
        ax = lattice(-12, 12, 0.05)
        assert ax.size == 481
        assert 0.0 in ax and 1.0 in ax and -1.0 in ax

    @pytest.mark.parametrize("lo, hi, step", [(1, 0, 0.1), (0, 1, 0), (0, 1, -1)])
    def test_rejects(self, lo, hi, step):
        with pytest.raises(ValueError):
            lattice(lo, hi, step)


class TestRegions:
    def test_origin_square(self):
        g = region_sweep([0, 0], 2, (-3, 3), 0.05)
        Y1, Y2 = np.meshgrid(g.y1, g.y2)
        expected = (np.abs(Y1) <= 1) & (np.abs(Y2) <= 1)
        np.testing.assert_array_equal(g.member, expected)

    def test_parabola_boundary(self):
        g = region_sweep([1, 0], 2, (-12, 12), 0.05)
        Y1, Y2 = np.meshgrid(g.y1, g.y2)
        right = Y1 >= 1 + math.sqrt(2)
        bound = np.sqrt(2 * np.maximum(Y1, 0) + 1)
        far = np.abs(np.abs(Y2) - bound) > g.step
        np.testing.assert_array_equal(g.member[right & far], (np.abs(Y2) <= bound)[right & far])
        # nothing with y_1 < 1 is a member at (1, 0)
        assert not g.member[Y1 < 1 - 1e-12].any()

    def test_boundary_flip(self):
        # membership flips within one step across y_2 = sqrt(2 y_1 + 1)
        for y1 in (3.0, 6.0, 11.0):
            b = math.sqrt(2 * y1 + 1)
            assert subdiff_member([1, 0], [y1, b - 0.01], 2).member
            assert not subdiff_member([1, 0], [y1, b + 0.01], 2).member

    def test_blue_ray(self):
        # at x = -(sqrt3/2, 1/2) the region is {lam x : lam >= 4 + 2 sqrt3};
        # the binding row is lam^2 / 4 >= sqrt3 lam + 1 at k = 1
        x = np.array([-math.sqrt(3) / 2, -0.5])
        start = 4 + 2 * math.sqrt(3)
        for lam in (start * 1.001, 9.0, 20.0):
            assert subdiff_member(x, lam * x, 2).member
        assert not subdiff_member(x, start * 0.999 * x, 2).member
        assert not subdiff_member(x, 10 * x + [0, 0.01], 2).member
        # a 1-D set: the lattice only catches the few cells that sit on the ray
        # up to the alignment tolerance, all beyond its starting point
        g = region_sweep(x, 2, (-12, 12), 0.05)
        i, j = np.nonzero(g.member)
        angle = np.arctan2(g.y2[i], g.y1[j]) - math.atan2(x[1], x[0])
        assert 0 < i.size <= 10
        assert np.all(np.abs(angle) < 1e-4)
        assert np.all(np.hypot(g.y1[j], g.y2[i]) >= start)

    def test_rejects_non_planar(self):
        with pytest.raises(ValueError):
            region_sweep([1, 0, 0], 2, (-1, 1), 0.5)

    def test_cells_row_major(self):
        g = region_sweep([0, 0], 2, (-1, 1), 1)
        cells = list(g.cells())
        assert cells[0] == (-1.0, -1.0, True)
        assert cells[1][:2] == (0.0, -1.0)
        assert len(cells) == 9

    @pytest.mark.parametrize("p", [1, 2, math.inf])
    def test_class_union(self, p):
        g = region_sweep_classes(p, (-4, 4), 0.25)
        Y1, Y2 = np.meshgrid(g.y1, g.y2)
        np.testing.assert_array_equal(g.classes & 1 > 0, (np.abs(Y1) <= 1) & (np.abs(Y2) <= 1))
        np.testing.assert_array_equal(g.member, g.classes > 0)
        # class 1 contains the sweep at (1, 0) and class 2 the sweep at (1, 1) for p = inf
        at_e1 = region_sweep([1, 0], p, (-4, 4), 0.25).member
        assert np.all(g.classes[at_e1] & 2)
        if p == math.inf:
            at_11 = region_sweep([1, 1], p, (-4, 4), 0.25).member
            assert np.all(g.classes[at_11] & 4)
        if p == 1:
            assert not np.any(g.classes & 4)

    def test_class_union_pointwise(self):
        # each flagged cell is a member at some x in its class, checked directly
        g = region_sweep_classes(2, (-4, 4), 0.5)
        for a, b, flag in g.cells():
            i, j = list(g.y2).index(b), list(g.y1).index(a)
            bits = g.classes[i, j]
            if bits & 2 and a != 0:
                assert subdiff_member([np.sign(a) * abs(a), 0], [a, b], 2).member or \
                    subdiff_member([0, np.sign(b) * abs(b)], [a, b], 2).member
