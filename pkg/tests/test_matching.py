"""Matcher primitives against exhaustive oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdcodec.errors import EmptyCandidates
from rdcodec.matching import longest_match, nearest_searcher, nearest_window
from rdcodec.model import DistortionSpec
from rdcodec.sampling import SymbolBlock

from conftest import oracle_longest, oracle_nearest


def blk(values, k=2):
    return SymbolBlock.from_list(values, k)


class TestNearestContract:
    def test_exact_match_wins(self, hamming2):
        db = blk([1, 0, 0, 1, 1, 0, 1, 0])
        res = nearest_window(blk([0, 1, 1, 0]), db, hamming2,
                             mode="sliding", count=3)
        assert res.position == 3
        assert res.distortion == 0.0

    def test_tie_takes_smallest_position(self, hamming2):
        db = blk([0, 0, 1, 0, 0, 1])
        res = nearest_window(blk([0, 1]), db, hamming2, mode="sliding", count=5)
        # positions 2 and 5 both achieve distortion 0; smallest wins
        assert res.position == 2
        assert res.distortion == 0.0

    def test_spec_example_sliding(self, hamming2):
        db = blk([0, 1, 1, 0, 1, 0])
        res = nearest_window(blk([1, 1, 1, 1]), db, hamming2,
                             mode="sliding", count=3)
        assert res == (2, 0.25)

    def test_strided_mode_indexes_codewords(self, hamming2):
        # codebook rows: (0,0), (0,1), (1,1)
        db = blk([0, 0, 0, 1, 1, 1])
        res = nearest_window(blk([1, 1]), db, hamming2, mode="strided", count=3)
        assert res.position == 3
        assert res.distortion == 0.0

    def test_strided_prefix_of_codeword(self, hamming2):
        db = blk([0, 0, 0, 1, 1, 1])
        res = nearest_window(blk([1]), db, hamming2, mode="strided",
                             count=3, stride=2)
        assert res.position == 3

    def test_empty_candidates(self, hamming2):
        with pytest.raises(EmptyCandidates):
            nearest_window(blk([0]), blk([0, 1]), hamming2,
                           mode="sliding", count=0)

    def test_database_too_short(self, hamming2):
        with pytest.raises(ValueError):
            nearest_window(blk([0, 1, 0]), blk([0, 1]), hamming2,
                           mode="sliding", count=1)


class TestLongestContract:
    def test_everything_matches_with_big_budget(self, hamming2):
        db = blk([0, 1, 1, 0, 1, 0])
        res = longest_match(blk([1, 1, 1, 1]), db, hamming2, budget=1.0, cap=4)
        assert res.length == 4
        assert res.position == 1

    def test_cap_limits_length(self, hamming2):
        db = blk([0] * 10)
        res = longest_match(blk([0] * 8), db, hamming2, budget=1.0, cap=5)
        assert res.length == 5

    def test_non_monotone_admissibility(self, hamming2):
        # the spec's own definition: largest k wins even when smaller k fail;
        # window (1,1,0,1) at position 2 has sum 1 <= 4*0.25
        db = blk([0, 1, 1, 0, 1, 0])
        res = longest_match(blk([1, 1, 1, 1]), db, hamming2, budget=0.25, cap=4)
        assert res.length == 4
        assert res.position == 2
        assert res.distortion == 0.25

    def test_zero_budget_absent_symbol(self, hamming2):
        db = blk([0, 0, 0, 0])
        res = longest_match(blk([1, 1]), db, hamming2, budget=0.0, cap=2)
        assert res.length == 0
        assert res.position == 0

    def test_suffix_shorter_than_cap(self, hamming2):
        db = blk([1, 1, 1, 1, 1, 1])
        res = longest_match(blk([1, 1]), db, hamming2, budget=0.0, cap=5)
        assert res.length == 2


NEAREST_CASES = 400
LONGEST_CASES = 400


class TestOracleEquivalence:
    @pytest.mark.parametrize("alphabet", [2, 4])
    def test_nearest_sliding(self, alphabet):
        rng = np.random.default_rng(1000 + alphabet)
        dist = DistortionSpec.hamming(alphabet)
        rho = dist.matrix
        for _ in range(NEAREST_CASES):
            m = int(rng.integers(4, 201))
            b = int(rng.integers(1, 17))
            if b > m:
                continue
            db = blk(rng.integers(0, alphabet, m), alphabet)
            block = blk(rng.integers(0, alphabet, b), alphabet)
            count = m - b + 1
            got = nearest_window(block, db, dist, mode="sliding", count=count)
            want_pos, want_dist = oracle_nearest(
                block.symbols, db.symbols, rho, "sliding", count)
            assert got.position == want_pos
            assert got.distortion == pytest.approx(want_dist, abs=1e-12)

    @pytest.mark.parametrize("alphabet", [2, 4])
    def test_nearest_strided(self, alphabet):
        rng = np.random.default_rng(2000 + alphabet)
        dist = DistortionSpec.hamming(alphabet)
        for _ in range(NEAREST_CASES // 2):
            b = int(rng.integers(1, 13))
            count = int(rng.integers(1, 33))
            db = blk(rng.integers(0, alphabet, b * count), alphabet)
            block = blk(rng.integers(0, alphabet, b), alphabet)
            got = nearest_window(block, db, dist, mode="strided", count=count)
            want_pos, want_dist = oracle_nearest(
                block.symbols, db.symbols, dist.matrix, "strided", count, b)
            assert (got.position, got.distortion) == (
                want_pos, pytest.approx(want_dist, abs=1e-12))

    @pytest.mark.parametrize("alphabet", [2, 4])
    def test_longest(self, alphabet):
        rng = np.random.default_rng(3000 + alphabet)
        dist = DistortionSpec.hamming(alphabet)
        for _ in range(LONGEST_CASES):
            m = int(rng.integers(4, 201))
            cap = int(rng.integers(1, 17))
            nsuf = int(rng.integers(1, 25))
            budget = float(rng.choice([0.0, 0.1, 0.25, 0.4, 0.6]))
            db = blk(rng.integers(0, alphabet, m), alphabet)
            suffix = blk(rng.integers(0, alphabet, nsuf), alphabet)
            got = longest_match(suffix, db, dist, budget, cap)
            want_k, want_pos = oracle_longest(
                suffix.symbols, db.symbols, dist.matrix, budget, cap)
            assert (got.length, got.position) == (want_k, want_pos)

    def test_float_valued_matrix(self):
        rng = np.random.default_rng(99)
        dist = DistortionSpec([[0.0, 0.3, 1.7], [0.4, 0.0, 0.9], [1.1, 0.2, 0.0]])
        for _ in range(100):
            m = int(rng.integers(4, 101))
            b = int(rng.integers(1, min(9, m) + 1))
            db = blk(rng.integers(0, 3, m), 3)
            block = blk(rng.integers(0, 3, b), 3)
            got = nearest_window(block, db, dist, mode="sliding", count=m - b + 1)
            want_pos, want_dist = oracle_nearest(
                block.symbols, db.symbols, dist.matrix, "sliding", m - b + 1)
            assert got.position == want_pos
            assert got.distortion == pytest.approx(want_dist, rel=1e-12)

            cap = int(rng.integers(1, 9))
            budget = float(rng.uniform(0, 1))
            gotl = longest_match(block, db, dist, budget, cap)
            want_k, want_posl = oracle_longest(
                block.symbols, db.symbols, dist.matrix, budget, cap,
                integer_valued=False)
            assert (gotl.length, gotl.position) == (want_k, want_posl)


class TestWorkInvariance:
    @pytest.mark.parametrize("workers", [1, 2, 8])
    def test_worker_count_irrelevant(self, hamming2, workers):
        rng = np.random.default_rng(7)
        db = blk(rng.integers(0, 2, 500))
        block = blk(rng.integers(0, 2, 12))
        base_n = nearest_window(block, db, hamming2, mode="sliding", count=489)
        base_l = longest_match(block, db, hamming2, budget=0.2, cap=12)
        assert nearest_window(block, db, hamming2, mode="sliding", count=489,
                              workers=workers) == base_n
        assert longest_match(block, db, hamming2, budget=0.2, cap=12,
                             workers=workers) == base_l

    def test_early_abandon_toggle(self, hamming2):
        rng = np.random.default_rng(8)
        for trial in range(30):
            m = int(rng.integers(10, 200))
            b = int(rng.integers(1, 10))
            db = blk(rng.integers(0, 2, m))
            block = blk(rng.integers(0, 2, b))
            on = nearest_window(block, db, hamming2, mode="sliding",
                                count=m - b + 1, early_abandon=True)
            off = nearest_window(block, db, hamming2, mode="sliding",
                                 count=m - b + 1, early_abandon=False)
            assert on == off
            lon = longest_match(block, db, hamming2, 0.3, b, early_abandon=True)
            loff = longest_match(block, db, hamming2, 0.3, b, early_abandon=False)
            assert lon == loff

    def test_nearest_beats_every_candidate(self, hamming2):
        rng = np.random.default_rng(9)
        db = blk(rng.integers(0, 2, 60))
        block = blk(rng.integers(0, 2, 5))
        count = 56
        res = nearest_window(block, db, hamming2, mode="sliding", count=count)
        for i in range(count):
            window = db.symbols[i:i + 5]
            d = (window != block.symbols).mean()
            assert res.distortion <= d + 1e-12


class TestPackedSearcher:
    """The packed binary table must be indistinguishable from the scan."""

    @pytest.mark.parametrize("mode", ["sliding", "strided"])
    def test_matches_scan_kernel(self, hamming2, mode):
        rng = np.random.default_rng(770)
        for trial in range(60):
            l = int(rng.integers(1, 150))
            count = int(rng.integers(2, 400))
            need = count * l if mode == "strided" else count + l - 1
            db = blk(rng.integers(0, 2, need))
            search = nearest_searcher(db, hamming2, mode, count, l)
            b = l if trial % 3 else int(rng.integers(1, l + 1))
            block = blk(rng.integers(0, 2, b))
            got = search(block)
            want = nearest_window(block, db, hamming2, mode=mode, count=count,
                                  stride=l if mode == "strided" else None)
            assert got.position == want.position, (trial, l, count, b)
            assert got.distortion == pytest.approx(want.distortion, abs=1e-12)

    def test_tie_break_matches(self, hamming2):
        db = blk([0, 0, 1, 0, 0, 1, 0, 0])
        search = nearest_searcher(db, hamming2, "sliding", 7, 2)
        got = search(blk([0, 1]))
        assert got == nearest_window(blk([0, 1]), db, hamming2,
                                     mode="sliding", count=7)
        assert got.position == 2

    def test_long_rows_multiword(self, hamming2):
        rng = np.random.default_rng(771)
        l, count = 212, 64
        db = blk(rng.integers(0, 2, count + l - 1))
        search = nearest_searcher(db, hamming2, "sliding", count, l)
        block = blk(rng.integers(0, 2, l))
        got = search(block)
        want = nearest_window(block, db, hamming2, mode="sliding", count=count)
        assert got == (want.position, pytest.approx(want.distortion))

    def test_non_binary_falls_back(self, hamming4):
        rng = np.random.default_rng(772)
        db = SymbolBlock(rng.integers(0, 4, 50).astype(np.uint8), 4)
        search = nearest_searcher(db, hamming4, "sliding", 40, 5)
        block = SymbolBlock(rng.integers(0, 4, 5).astype(np.uint8), 4)
        assert search(block) == nearest_window(block, db, hamming4,
                                               mode="sliding", count=40)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_nearest_hypothesis(data):
    ham = DistortionSpec.hamming(2)
    m = data.draw(st.integers(2, 60))
    b = data.draw(st.integers(1, min(8, m)))
    db_vals = data.draw(st.lists(st.integers(0, 1), min_size=m, max_size=m))
    blk_vals = data.draw(st.lists(st.integers(0, 1), min_size=b, max_size=b))
    db = blk(db_vals)
    block = blk(blk_vals)
    res = nearest_window(block, db, ham, mode="sliding", count=m - b + 1)
    want = oracle_nearest(block.symbols, db.symbols, ham.matrix,
                          "sliding", m - b + 1)
    assert (res.position, res.distortion) == (want[0], pytest.approx(want[1]))
