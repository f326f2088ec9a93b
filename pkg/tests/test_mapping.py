import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from egim.mapping import (
    EGIM_4QAM,
    EGIM_8PSK,
    GroupSpec,
    classical_im_map,
    combination_rank,
    combination_unrank,
    destuff,
    map_codewords,
    psk_table,
    stuff,
)


def bits(s):
    return np.array([int(c) for c in s], dtype=np.uint8)


def words(cw):
    return ["".join(map(str, row)) for row in np.asarray(cw).tolist()]


def step_through(stream, m, count):
    """Independent reference: read the stream one symbol decision at a time."""
    out, queue = [], list(stream)
    for _ in range(count):
        b = queue.pop(0) if queue else 0
        if b == 0:
            out.append("0" * (m + 1))
        else:
            payload = [queue.pop(0) if queue else 0 for _ in range(m)]
            out.append("1" + "".join(map(str, payload)))
    return out


class TestStuff:
    def test_worked_example_qpsk(self):
        res = stuff(bits("1101010111100"), 4, 5)
        assert words(res.codewords) == ["110", "101", "000", "111", "100"]
        assert res.consumed == 13
        assert res.padded == 0

    def test_all_zero(self):
        assert words(stuff(bits("000"), 4, 3).codewords) == ["000"] * 3

    def test_8psk_example_matches_step_through(self):
        expected = step_through([1, 0, 1, 1, 0, 0], 3, 3)
        assert expected == ["1011", "0000", "0000"]
        assert words(stuff(bits("101100"), 8, 3).codewords) == expected

    def test_padding_reported(self):
        res = stuff(bits("11"), 4, 2)
        assert words(res.codewords) == ["110", "000"]
        assert res.consumed == 2
        assert res.padded == 2

    def test_rejects_other_orders(self):
        with pytest.raises(ValueError):
            stuff(bits("1"), 16, 1)

    @pytest.mark.parametrize("m_order", [4, 8])
    def test_matches_step_through_random(self, m_order):
        rng = np.random.default_rng(3)
        m = int(np.log2(m_order))
        for _ in range(50):
            stream = rng.integers(0, 2, 40).tolist()
            assert words(stuff(stream, m_order, 20).codewords) == step_through(stream, m, 20)

    @pytest.mark.parametrize("m_order", [4, 8])
    def test_consumed_counts_active_payload(self, m_order):
        rng = np.random.default_rng(7)
        m = int(np.log2(m_order))
        res = stuff(rng.integers(0, 2, 64 * (m + 1)), m_order, 64)
        assert res.consumed == 64 + res.codewords[:, 0].sum() * m

    @pytest.mark.parametrize("m_order", [4, 8])
    def test_active_fraction_is_half(self, m_order):
        rng = np.random.default_rng(11)
        m = int(np.log2(m_order))
        stream = rng.integers(0, 2, 10_000 * 64 * (m + 1), dtype=np.uint8)
        pos, active = 0, 0
        for _ in range(10_000):
            res = stuff(stream[pos:pos + 64 * (m + 1)], m_order, 64)
            pos += res.consumed
            active += int(res.codewords[:, 0].sum())
        assert abs(active / (10_000 * 64) - 0.5) < 0.01


class TestDestuff:
    def test_worked_example_inverted(self):
        cw = [bits(w) for w in ["110", "101", "000", "111", "100"]]
        assert "".join(map(str, destuff(cw, 4))) == "1101010111100"

    def test_single_off(self):
        assert destuff([bits("000")], 4).tolist() == [0]

    def test_8psk_inverse(self):
        cw = [bits(w) for w in ["1011", "0000", "0000"]]
        assert "".join(map(str, destuff(cw, 8))) == "101100"

    def test_rejects_invalid_off_codeword(self):
        with pytest.raises(ValueError, match="invalid codeword"):
            destuff([bits("010")], 4)

    @pytest.mark.parametrize("m_order", [4, 8])
    def test_round_trip_million_bits(self, m_order):
        rng = np.random.default_rng(m_order)
        stream = rng.integers(0, 2, 1_000_000, dtype=np.uint8)
        # enough codewords to swallow the whole stream
        res = stuff(stream, m_order, stream.size)
        out = destuff(res.codewords, m_order)
        assert np.array_equal(out[:stream.size], stream)
        assert not out[stream.size:].any()
        assert res.consumed == stream.size

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=300), st.sampled_from([4, 8]))
    def test_round_trip_property(self, stream, m_order):
        res = stuff(stream, m_order, len(stream))
        out = destuff(res.codewords, m_order)
        assert out[:len(stream)].tolist() == stream


class TestMapCodewords:
    def test_table_entries(self):
        assert map_codewords([bits("110")], EGIM_4QAM)[0] == pytest.approx((-1 + 1j) / np.sqrt(2))
        assert map_codewords([bits("0000")], EGIM_8PSK)[0] == 0
        assert map_codewords([bits("1011")], EGIM_8PSK)[0] == pytest.approx(-1j)

    @pytest.mark.parametrize("table", [EGIM_4QAM, EGIM_8PSK])
    def test_table_invariants(self, table):
        pts = table.points
        assert np.count_nonzero(pts == 0) == 1
        assert np.allclose(np.abs(pts[pts != 0]), 1.0)
        assert len(set(np.round(pts, 12).tolist())) == len(pts)
        # off codeword is the all-zero word
        assert words(table.codewords[pts == 0]) == ["0" * table.width]

    def test_unknown_codeword(self):
        with pytest.raises(ValueError):
            map_codewords([bits("010")], EGIM_4QAM)

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            map_codewords([bits("1000")], EGIM_4QAM)


class TestCombinadic:
    def test_first_subset(self):
        assert combination_unrank(0, 4, 2) == (0, 1)

    def test_matches_lexicographic_enumeration(self):
        subsets = list(itertools.combinations(range(4), 2))
        assert combination_unrank(3, 4, 2) == subsets[3] == (1, 2)
        for n, k in [(4, 2), (6, 3), (8, 4), (5, 1)]:
            ordered = list(itertools.combinations(range(n), k))
            limit = 1 << (len(ordered).bit_length() - 1)
            for r in range(limit):
                assert combination_unrank(r, n, k) == ordered[r]
                assert combination_rank(ordered[r], n) == r

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            combination_unrank(4, 4, 2)
        with pytest.raises(ValueError):
            combination_unrank(-1, 4, 2)


class TestClassical:
    def test_bit_budget(self):
        spec = GroupSpec(4, 2, 4)
        assert (spec.p1, spec.p2) == (2, 4)
        assert spec.p * 16 == 96
        assert GroupSpec(4, 2, 2).p == 4

    def test_consumes_exact_bits(self):
        rng = np.random.default_rng(0)
        frame = classical_im_map(rng.integers(0, 2, 100), GroupSpec(4, 2, 4), 16)
        assert frame.shape == (64,)

    def test_insufficient_bits(self):
        with pytest.raises(ValueError):
            classical_im_map(np.zeros(95, dtype=np.uint8), GroupSpec(4, 2, 4), 16)

    def test_zero_payload_points(self):
        spec = GroupSpec(4, 2, 4)
        frame = classical_im_map(np.zeros(spec.p * 16, dtype=np.uint8), spec, 16)
        active = frame[frame != 0]
        assert np.allclose(active, psk_table(4).points[0])

    @pytest.mark.parametrize("n,k,m_order", [(4, 2, 4), (4, 1, 2), (8, 3, 8), (4, 2, 2)])
    def test_exactly_k_active_per_group(self, n, k, m_order):
        spec = GroupSpec(n, k, m_order)
        rng = np.random.default_rng(1)
        for _ in range(100):
            frame = classical_im_map(rng.integers(0, 2, spec.p * 8), spec, 8).reshape(8, n)
            assert (np.count_nonzero(frame, axis=1) == k).all()
