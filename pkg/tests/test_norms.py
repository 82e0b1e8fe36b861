from itertools import combinations
import math

from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
import numpy as np
import pytest

from capra_l0 import PExponent, lp_norm, normal_cone_member_lp, osm_falsify, sort_abs, top_norm
from capra_l0.norms import normal_cone_alignment, top_norm_prefix


def vectors(min_d=1, max_d=6, bound=5.0):
    return st.integers(min_d, max_d).flatmap(
        lambda d: arrays(np.float64, d, elements=st.floats(-bound, bound, allow_subnormal=False))
    )


finite_q = st.floats(1.0, 8.0)


def brute_top_norm(y, k, q):
    """max over |K| <= k of the lq norm of y_K, by enumeration."""
    best = 0.0
    for size in range(1, k + 1):
        for K in combinations(range(len(y)), size):
            vals = np.abs(np.asarray(y)[list(K)])
            best = max(best, vals.max() if math.isinf(q) else float(np.sum(vals**q) ** (1 / q)))
    return best


class TestPExponent:
    @pytest.mark.parametrize("p, q", [(1, math.inf), (2, 2.0), (3, 1.5), (math.inf, 1.0), (1.5, 3.0)])
    def test_conjugate_exponent(self, p, q):
        e = PExponent(p)
        assert e.q == pytest.approx(q)
        if math.isfinite(e.p) and math.isfinite(e.q):
            assert 1 / e.p + 1 / e.q == pytest.approx(1.0)

    def test_regimes(self):
        assert PExponent(1).regime == "one"
        assert PExponent(1.0001).regime == "mid"
        assert PExponent.parse("inf").regime == "inf"

    @pytest.mark.parametrize("bad", [0.5, -1, float("nan")])
    def test_rejects_below_one(self, bad):
        with pytest.raises(ValueError):
            PExponent(bad)

    def test_parse(self):
        assert PExponent.parse(" Inf ").p == math.inf
        assert PExponent.parse("1.5") == PExponent(1.5)
        with pytest.raises(ValueError, match="cannot read"):
            PExponent.parse("two")

    def test_str(self):
        assert str(PExponent(2)) == "2"
        assert str(PExponent(math.inf)) == "inf"


class TestLpNorm:
    def test_examples(self):
        assert lp_norm([3, 4], 2) == 5.0
        assert lp_norm([3, 4], "inf") == 4.0
        assert lp_norm([1, 1, 1], 1) == 3.0

    def test_rows(self):
        np.testing.assert_allclose(lp_norm([[3, 4], [6, 8]], 2), [5, 10])

    def test_extreme_scales(self):
        assert lp_norm([1e-300, 0], 2) == 1e-300
        assert lp_norm([3e200, 4e200], 2) == pytest.approx(5e200)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            lp_norm([1, np.nan], 2)


class TestSortAbs:
    @pytest.mark.parametrize(
        "y, expected", [([3, -1, 2], [0, 2, 1]), ([0, 0], [0, 1]), ([-5, 5], [0, 1])]
    )
    def test_examples(self, y, expected):
        assert sort_abs(y).tolist() == expected

    @given(vectors())
    def test_nonincreasing(self, y):
        a = np.abs(y)[sort_abs(y)]
        assert np.all(np.diff(a) <= 0)


class TestTopNorm:
    def test_examples(self):
        # subset oracle: best pair of (3, -1, 2) in l2 is {3, 2}
        assert top_norm([3, -1, 2], 2, 2) == pytest.approx(brute_top_norm([3, -1, 2], 2, 2.0))
        assert top_norm([3, -1, 2], 2, 2) == pytest.approx(math.sqrt(13))
        assert top_norm([3, -1, 2], 3, 2) == pytest.approx(math.sqrt(14))
        assert top_norm([3, -1, 2], 2, "inf") == 3.0

    def test_k_zero_convention(self):
        assert top_norm([3, -1, 2], 0, 2) == 0.0

    @pytest.mark.parametrize("k", [-1, 4])
    def test_k_out_of_range(self, k):
        with pytest.raises(ValueError):
            top_norm([3, -1, 2], k, 2)

    @settings(max_examples=200)
    @given(vectors(max_d=8), finite_q, st.data())
    def test_subset_oracle(self, y, q, data):
        k = data.draw(st.integers(0, y.size))
        assert top_norm(y, k, q) == pytest.approx(brute_top_norm(y, k, q), rel=1e-12, abs=1e-12)

    @given(vectors(), st.one_of(finite_q, st.just(math.inf)))
    def test_monotone_in_k_and_full_norm(self, y, q):
        T = top_norm_prefix(y, q)
        assert np.all(np.diff(T) >= -1e-12 * max(1.0, T[-1]))
        assert T[-1] == pytest.approx(lp_norm(y, q), rel=1e-12, abs=1e-300)

    @given(vectors(), finite_q, st.data())
    def test_unit_slack_propagates(self, y, q, data):
        # one unit-step of slack at k propagates to every larger level
        d = y.size
        k = data.draw(st.integers(0, d - 1))
        T = top_norm_prefix(y, q)
        if T[k + 1] - 1 <= T[k]:
            for j in range(1, d - k + 1):
                assert T[k + j] - j <= T[k] + 1e-9 * max(1.0, T[k])


class TestHolder:
    @given(st.integers(1, 6).flatmap(lambda d: st.tuples(
        arrays(np.float64, d, elements=st.floats(-5, 5)),
        arrays(np.float64, d, elements=st.floats(-5, 5)))),
        st.sampled_from([1, 1.5, 2, 3, math.inf]))
    def test_inequality(self, xy, p):
        x, y = xy
        e = PExponent(p)
        assert x @ y <= lp_norm(x, e) * lp_norm(y, e.q) * (1 + 1e-12) + 1e-12


class TestNormalCone:
    def test_examples(self):
        assert normal_cone_member_lp([1, 0], [2, 0], 2)
        assert not normal_cone_member_lp([1, 0], [0, 1], 2)
        # ||u||_inf ||y||_1 = 6 = <u, y>
        assert normal_cone_member_lp([1, 1], [3, 3], "inf")

    def test_zero_y_is_member(self):
        assert normal_cone_member_lp([1, 2], [0, 0], 3)

    def test_zero_base_rejected(self):
        with pytest.raises(ValueError):
            normal_cone_member_lp([0, 0], [1, 0], 2)

    def test_l1_vertex(self):
        # at the vertex e_1 of the l1 ball the cone is {y : y_1 = ||y||_inf}
        assert normal_cone_member_lp([2, 0], [1, 1], 1)
        assert normal_cone_member_lp([2, 0], [1, -0.5], 1)
        assert not normal_cone_member_lp([2, 0], [0.5, 1], 1)

    @given(
        st.integers(1, 5).flatmap(lambda d: st.tuples(
            arrays(np.float64, d, elements=st.floats(-4, 4)),
            arrays(np.float64, d, elements=st.floats(-4, 4)))),
        st.sampled_from([1, 1.5, 2, 3, math.inf]),
        st.floats(1e-3, 1e3), st.floats(1e-3, 1e3),
    )
    def test_scale_invariance(self, uy, p, a, b):
        u, y = uy
        if not np.any(u):
            return
        base = normal_cone_alignment(u, y, p)
        scaled = normal_cone_alignment(a * u, b * y, p)
        assert scaled == pytest.approx(base, abs=1e-12)


class TestOSM:
    def test_linf_counterexample_shape(self):
        pair = osm_falsify("inf", 2, 1000, 0)
        assert pair is not None
        x, xp = pair
        assert np.all(np.abs(x) <= np.abs(xp)) and np.any(np.abs(x) < np.abs(xp))
        assert np.all(x * xp >= 0)
        assert np.abs(x).max() >= np.abs(xp).max()

    def test_hand_counterexample(self):
        # x = (1, 0), x' = (1, 0.5): both sup norms are 1
        assert lp_norm([1, 0], "inf") == lp_norm([1, 0.5], "inf")

    @pytest.mark.parametrize("p", [1, 2, 4])
    def test_no_counterexample(self, p):
        assert osm_falsify(p, 3, 20_000, 3) is None

    def test_validation(self):
        with pytest.raises(ValueError):
            osm_falsify(2, 1, 10, 0)
        with pytest.raises(ValueError):
            osm_falsify(2, 2, 0, 0)

    def test_seeded(self):
        a = osm_falsify("inf", 4, 100, 11)
        b = osm_falsify("inf", 4, 100, 11)
        np.testing.assert_array_equal(a[0], b[0])
