from collections import Counter, defaultdict
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cachekit import (
    all_demands,
    batch_placement,
    demand_stats,
    enumerate_types,
    expected_distinct,
    load_placement,
    make_database,
    ne_distribution,
    save_placement,
    type_size,
)
from cachekit.decentralized import random_placement
from cachekit.model import DemandStats, PlacementParseError, validate_demand


class TestDatabase:
    def test_deterministic_given_seed(self):
        a = make_database(1, 8, seed=7)
        b = make_database(1, 8, seed=7)
        assert np.array_equal(a.bits, b.bits)
        c = make_database(1, 8, seed=8)
        assert not np.array_equal(a.bits, c.bits)

    def test_shape(self):
        db = make_database(3, 15, seed=0)
        assert db.bits.shape == (3, 15)
        assert db.bits.dtype == np.uint8
        assert set(np.unique(db.bits)) <= {0, 1}

    def test_fair_coin_marginal(self):
        db = make_database(2, 10**5, seed=123)
        assert 0.49 <= db.bits.mean() <= 0.51

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            make_database(0, 10, seed=0)
        with pytest.raises(ValueError):
            make_database(2, 0, seed=0)


class TestDemandStats:
    def test_worked_example(self):
        st_ = demand_stats((1, 1, 2, 3), N=4)
        assert st_.counts == (2, 1, 1, 0)
        assert st_.distinct == 3

    def test_single_file(self):
        st_ = demand_stats((1,) * 5, N=3)
        assert st_.counts == (5, 0, 0)
        assert st_.distinct == 1

    def test_all_distinct(self):
        st_ = demand_stats((1, 2, 3), N=3)
        assert st_.counts == (1, 1, 1)
        assert st_.distinct == 3

    def test_validation(self):
        with pytest.raises(ValueError):
            demand_stats((0, 1), N=2)
        with pytest.raises(ValueError):
            demand_stats((1, 3), N=2)
        with pytest.raises(ValueError):
            validate_demand((), N=2)
        with pytest.raises(ValueError):
            DemandStats((1, 2, 0), 2)  # not sorted descending


class TestTypes:
    def test_four_by_four(self):
        got = [t.counts for t in enumerate_types(4, 4)]
        assert got == [
            (4, 0, 0, 0),
            (3, 1, 0, 0),
            (2, 2, 0, 0),
            (2, 1, 1, 0),
            (1, 1, 1, 1),
        ]

    def test_single_file(self):
        assert [t.counts for t in enumerate_types(1, 6)] == [(6,)]

    def test_three_files_two_users(self):
        assert [t.counts for t in enumerate_types(3, 2)] == [(2, 0, 0), (1, 1, 0)]

    @pytest.mark.parametrize("N,K", [(2, 2), (3, 2), (2, 4), (4, 3), (3, 5), (6, 6)])
    def test_grouping_demands_reproduces_types(self, N, K):
        groups = defaultdict(list)
        for d in all_demands(N, K):
            groups[demand_stats(d, N).counts].append(d)
        types = enumerate_types(N, K)
        assert set(groups) == {t.counts for t in types}
        for t in types:
            assert len(groups[t.counts]) == type_size(t, K)
        assert sum(map(len, groups.values())) == N**K


class TestNeDistribution:
    def test_examples(self):
        assert dict(ne_distribution(2, 2).entries) == {1: Fraction(1, 2), 2: Fraction(1, 2)}
        assert dict(ne_distribution(5, 1).entries) == {1: Fraction(1)}
        assert dict(ne_distribution(3, 2).entries) == {1: Fraction(1, 3), 2: Fraction(2, 3)}

    @pytest.mark.parametrize("N,K", [(2, 3), (3, 3), (4, 2), (2, 6), (5, 4), (6, 6)])
    def test_matches_exhaustive_histogram(self, N, K):
        hist = Counter(len(set(d)) for d in all_demands(N, K))
        dist = dict(ne_distribution(N, K).entries)
        total = N**K
        assert dist == {e: Fraction(c, total) for e, c in hist.items()}

    @given(st.integers(1, 8), st.integers(1, 8))
    def test_mean_matches_occupancy_identity(self, N, K):
        expected = N * (1 - Fraction(N - 1, N) ** K)
        assert expected_distinct(N, K) == expected  # exact, hence within 1e-12


class TestPlacementFile:
    def test_round_trip_batch(self, tmp_path):
        placement = batch_placement(N=3, K=4, t=2, F=12)
        path = tmp_path / "batch.placement"
        save_placement(path, placement, N=3, F=12, M=Fraction(3, 2))
        loaded, N, F, M = load_placement(path)
        assert (N, F, M) == (3, 12, Fraction(3, 2))
        assert loaded.K == 4
        assert np.array_equal(loaded.mask, placement.mask)

    def test_round_trip_random(self, tmp_path):
        placement = random_placement(N=2, K=3, M=1, F=40, seed=5)
        path = tmp_path / "random.placement"
        save_placement(path, placement, N=2, F=40, M=1)
        loaded, N, F, M = load_placement(path)
        assert np.array_equal(loaded.mask, placement.mask)
        assert M == 1

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "bad.placement"
        path.write_text("2 2 4 1\n1 1:0 1:3\n2 9:9\n")
        with pytest.raises(PlacementParseError) as err:
            load_placement(path)
        assert "line 3" in str(err.value)

    def test_budget_enforced(self, tmp_path):
        path = tmp_path / "greedy.placement"
        # M=1, F=4: budget is 4 bits, user 1 lists 5
        path.write_text("2 2 4 1\n1 1:0 1:1 1:2 1:3 2:0\n2\n")
        with pytest.raises(PlacementParseError) as err:
            load_placement(path)
        assert "more than" in str(err.value)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "short.placement"
        path.write_text("3 2\n")
        with pytest.raises(PlacementParseError) as err:
            load_placement(path)
        assert "line 1" in str(err.value)


def test_cached_pairs_sorted_and_consistent():
    placement = random_placement(N=2, K=2, M=1, F=16, seed=9)
    for k in (1, 2):
        pairs = placement.cached_pairs(k)
        assert pairs == sorted(pairs)
        assert len(pairs) == placement.cached_bits(k)
        for i, j in pairs:
            assert placement.mask[k - 1, i - 1, j]
