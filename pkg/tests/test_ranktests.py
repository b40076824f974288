"""Rank-sum and signed-rank tests against literal enumeration and scipy."""

import random

import pytest
import scipy.stats as st
from hypothesis import given, settings
from hypothesis import strategies as st_h

from turfbbn.errors import AllZeroDifferences, EmptySample
from turfbbn.ranktests import EXACT_LIMIT, midranks, rank_sum, signed_rank

from oracles import enum_rank_sum_p, enum_signed_rank_p


class TestMidranks:
    def test_no_ties(self):
        assert midranks([10.0, 30.0, 20.0]) == [1.0, 3.0, 2.0]

    def test_ties_share_average_rank(self):
        assert midranks([1.0, 2.0, 2.0, 3.0]) == [1.0, 2.5, 2.5, 4.0]

    def test_matches_scipy_rankdata(self):
        rng = random.Random(1)
        for _ in range(100):
            vals = [float(rng.randint(0, 5)) for _ in range(rng.randint(1, 15))]
            assert midranks(vals) == pytest.approx(list(st.rankdata(vals)))


class TestRankSum:
    def test_separated_samples(self):
        r = rank_sum([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
        assert r.w == 6.0
        assert r.p == pytest.approx(0.1, abs=1e-12)
        assert r.exact

    def test_symmetric_in_sample_order(self):
        a, b = [3.0, 1.0, 4.0], [2.0, 5.0]
        assert rank_sum(a, b).p == pytest.approx(rank_sum(b, a).p, abs=1e-12)

    def test_exact_matches_enumeration_with_ties(self):
        rng = random.Random(7)
        for _ in range(60):
            n1 = rng.randint(1, 9)
            n2 = rng.randint(1, 10 - n1)
            a = [float(rng.randint(0, 6)) for _ in range(n1)]
            b = [float(rng.randint(0, 6)) for _ in range(n2)]
            r = rank_sum(a, b)
            assert r.exact
            assert r.p == pytest.approx(enum_rank_sum_p(a, b), abs=1e-12)

    def test_switches_to_approximation_above_limit(self):
        a = [float(i) for i in range(EXACT_LIMIT)]
        b = [float(i) + 0.5 for i in range(1)]
        assert not rank_sum(a, b).exact
        assert rank_sum(a[:-1], b).exact

    def test_forced_paths(self):
        a, b = [1.0, 2.0, 3.0, 9.0, 10.0, 11.0], [4.0, 5.0, 6.0, 7.0, 8.0, 12.0]
        auto = rank_sum(a, b)
        assert auto.exact
        forced = rank_sum(a, b, exact=False)
        assert not forced.exact
        assert forced.p == pytest.approx(auto.p, abs=0.01)

    def test_approximation_tracks_scipy(self):
        a = [12.0, 15.0, 11.0, 19.0, 22.0, 8.0, 14.0, 31.0]
        b = [25.0, 17.0, 21.0, 30.0, 16.0, 28.0, 9.5]
        got = rank_sum(a, b)
        ref = st.mannwhitneyu(a, b, alternative="two-sided",
                              method="asymptotic", use_continuity=True)
        assert not got.exact
        assert got.p == pytest.approx(ref.pvalue, abs=0.01)

    def test_identical_pooled_values_give_certainty(self):
        r = rank_sum([5.0] * 8, [5.0] * 7, exact=False)
        assert r.p == 1.0

    def test_empty_sample_rejected(self):
        with pytest.raises(EmptySample):
            rank_sum([], [1.0])
        with pytest.raises(EmptySample):
            rank_sum([1.0], [])

    @given(st_h.lists(st_h.integers(0, 8), min_size=1, max_size=5),
           st_h.lists(st_h.integers(0, 8), min_size=1, max_size=5))
    @settings(max_examples=60, deadline=None)
    def test_exact_p_matches_enumeration(self, a_raw, b_raw):
        a = [float(v) for v in a_raw]
        b = [float(v) for v in b_raw]
        r = rank_sum(a, b)
        assert 0.0 <= r.p <= 1.0
        assert r.p == pytest.approx(enum_rank_sum_p(a, b), abs=1e-12)


class TestSignedRank:
    def test_all_positive_differences(self):
        r = signed_rank([2.0, 3.0, 4.0], [1.0, 1.0, 1.0])
        assert r.w == 6.0
        assert r.p == pytest.approx(0.25, abs=1e-12)
        assert r.exact

    def test_zero_differences_dropped(self):
        with_zero = signed_rank([2.0, 3.0, 4.0, 7.0], [1.0, 1.0, 1.0, 7.0])
        without = signed_rank([2.0, 3.0, 4.0], [1.0, 1.0, 1.0])
        assert with_zero.p == pytest.approx(without.p, abs=1e-12)

    def test_all_zero_differences(self):
        with pytest.raises(AllZeroDifferences):
            signed_rank([1.0, 2.0], [1.0, 2.0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            signed_rank([1.0, 2.0], [1.0])

    def test_empty(self):
        with pytest.raises(EmptySample):
            signed_rank([], [])

    def test_exact_matches_enumeration_with_ties(self):
        rng = random.Random(3)
        for _ in range(60):
            m = rng.randint(1, 10)
            x = [float(rng.randint(0, 9)) for _ in range(m)]
            y = [float(rng.randint(0, 9)) for _ in range(m)]
            if all(p == q for p, q in zip(x, y)):
                continue
            r = signed_rank(x, y)
            assert r.exact
            assert r.p == pytest.approx(enum_signed_rank_p(x, y), abs=1e-12)

    def test_switches_to_approximation_above_limit(self):
        x = [float(i) for i in range(EXACT_LIMIT + 1)]
        y = [v + ((-1.0) ** i) * (i + 1) for i, v in enumerate(x)]
        assert not signed_rank(x, y).exact
        assert signed_rank(x[:-1], y[:-1]).exact

    def test_approximation_tracks_scipy(self):
        x = [30.0, 28.5, 31.0, 26.0, 33.0, 29.5, 27.0, 32.5, 30.5, 28.0,
             34.0, 26.5, 31.5]
        y = [27.0, 29.0, 28.5, 27.5, 30.0, 28.0, 28.0, 30.0, 29.5, 28.5,
             31.0, 27.0, 30.0]
        got = signed_rank(x, y)
        ref = st.wilcoxon(x, y, alternative="two-sided", correction=True,
                          method="approx")
        assert not got.exact
        assert got.p == pytest.approx(ref.pvalue, abs=0.01)

    def test_forced_exact_beyond_limit(self):
        x = [float(i) for i in range(13)]
        y = [v + (1.0 if i % 3 else -1.0) * (i + 1) for i, v in enumerate(x)]
        forced = signed_rank(x, y, exact=True)
        assert forced.exact
        assert forced.p == pytest.approx(enum_signed_rank_p(x, y), abs=1e-12)

    @given(st_h.lists(st_h.tuples(st_h.integers(0, 9), st_h.integers(0, 9)),
                      min_size=1, max_size=9))
    @settings(max_examples=60, deadline=None)
    def test_exact_p_matches_enumeration(self, pairs):
        x = [float(a) for a, _ in pairs]
        y = [float(b) for _, b in pairs]
        if all(a == b for a, b in pairs):
            with pytest.raises(AllZeroDifferences):
                signed_rank(x, y)
            return
        r = signed_rank(x, y)
        assert 0.0 <= r.p <= 1.0
        assert r.p == pytest.approx(enum_signed_rank_p(x, y), abs=1e-12)
