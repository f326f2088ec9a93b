import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from egim.detection import (
    approx_llr,
    default_radius,
    detect_codewords,
    llr_matrix,
    ml_detect,
    ook_decide,
    subblock_candidate_vectors,
    subblock_ml_detect,
)
from egim.mapping import EGIM_4QAM, EGIM_8PSK, GroupSpec, classical_im_map

TABLES = [EGIM_4QAM, EGIM_8PSK]


def noisy_symbols(table, count, sigma, seed):
    rng = np.random.default_rng(seed)
    s = table.points[rng.integers(len(table.points), size=count)]
    return s + sigma * (rng.standard_normal(count) + 1j * rng.standard_normal(count))


class TestMlDetect:
    @pytest.mark.parametrize("table", TABLES)
    def test_origin_is_off(self, table):
        assert ml_detect(0j, table) == (0,) * table.width

    def test_hand_distances(self):
        y = 0.9 + 0.9j
        d = np.abs(y - EGIM_4QAM.points)
        assert d[1] == pytest.approx(0.2728, abs=1e-4)
        assert d[0] == pytest.approx(1.2728, abs=1e-4)
        assert ml_detect(y, EGIM_4QAM) == (1, 0, 0)

    @pytest.mark.parametrize("table", TABLES)
    def test_fixed_points(self, table):
        for s, cw in zip(table.points, table.codewords):
            assert ml_detect(s, table) == tuple(cw)

    @pytest.mark.parametrize("table", TABLES)
    def test_matches_brute_force(self, table):
        y = noisy_symbols(table, 2000, 0.5, 0)
        got = detect_codewords(y, table)
        for yi, cw in zip(y, got):
            best = min(range(len(table.points)), key=lambda i: (abs(yi - table.points[i]), i))
            assert tuple(cw) == tuple(table.codewords[best])

    def test_tie_goes_to_lowest_index(self):
        # equidistant from the off point S0 and S1
        y = (1 + 1j) / np.sqrt(2) / 2
        assert ml_detect(y, EGIM_4QAM) == (0, 0, 0)

    @pytest.mark.parametrize("table", TABLES)
    def test_always_valid_codeword(self, table):
        valid = {tuple(c) for c in table.codewords}
        cws = detect_codewords(noisy_symbols(table, 5000, 2.0, 1), table)
        assert {tuple(c) for c in cws} <= valid

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.01, 100), st.sampled_from(TABLES))
    def test_scale_invariance(self, re, im, c, table):
        y = complex(re, im)
        assert ml_detect(c * y, table.scaled(c)) == ml_detect(y, table)


class TestOok:
    def test_radius(self):
        assert default_radius(EGIM_4QAM) == 0.5
        assert default_radius(EGIM_8PSK) == 0.5

    def test_decisions(self):
        assert ook_decide(0j, 0.5) is False
        assert ook_decide(0.3 + 0j, 0.5) is False
        assert ook_decide(0.6 + 0j, 0.5) is True

    def test_bad_radius(self):
        with pytest.raises(ValueError):
            ook_decide(1.0, 0.0)

    @pytest.mark.parametrize("table", TABLES)
    def test_inside_circle_implies_ml_off(self, table):
        y = noisy_symbols(table, 100_000, 0.4, 2)
        inside = ~ook_decide(y, default_radius(table))
        ml_on = detect_codewords(y, table)[:, 0].astype(bool)
        assert not (inside & ml_on).any()

    @pytest.mark.xfail(strict=True, reason="the ML off region is a polygon larger than the circle")
    @pytest.mark.parametrize("table", TABLES)
    def test_exact_agreement_with_ml(self, table):
        y = noisy_symbols(table, 100_000, 0.4, 3)
        ml_on = detect_codewords(y, table)[:, 0].astype(bool)
        assert np.array_equal(ook_decide(y, default_radius(table)), ml_on)

    def test_disagreement_example(self):
        # |y| = 0.6 is outside the circle, but every unit QPSK point is farther than the origin
        assert ook_decide(0.6 + 0j, 0.5) is True
        assert ml_detect(0.6 + 0j, EGIM_4QAM) == (0, 0, 0)


class TestLlr:
    def test_hand_value(self):
        assert approx_llr((1 + 1j) / np.sqrt(2), 1.0, EGIM_4QAM, 0) == pytest.approx(-1.0)

    def test_equidistant_is_zero(self):
        y = (1 + 1j) / np.sqrt(2) / 2
        assert approx_llr(y, 0.7, EGIM_4QAM, 0) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("table", TABLES)
    def test_on_active_point_index_bit_negative(self, table):
        for s in table.active_points:
            assert approx_llr(s, 0.1, table, 0) < 0

    def test_matches_direct_formula(self):
        y = noisy_symbols(EGIM_8PSK, 200, 0.6, 4)
        sigma2 = 0.36
        got = llr_matrix(y, sigma2, EGIM_8PSK)
        for yi, row in zip(y, got):
            for i in range(EGIM_8PSK.width):
                d0 = min(abs(yi - s) ** 2 for s, c in zip(EGIM_8PSK.points, EGIM_8PSK.codewords) if c[i] == 0)
                d1 = min(abs(yi - s) ** 2 for s, c in zip(EGIM_8PSK.points, EGIM_8PSK.codewords) if c[i] == 1)
                assert row[i] == pytest.approx(-(d0 - d1) / sigma2)

    def test_gains_scale_reference(self):
        y = noisy_symbols(EGIM_4QAM, 50, 0.3, 5)
        h = 0.7 - 0.2j
        direct = llr_matrix(y, 0.2, EGIM_4QAM.scaled(h))
        assert np.allclose(llr_matrix(y, 0.2, EGIM_4QAM, gains=np.full(50, h)), direct)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            approx_llr(0j, 0.0, EGIM_4QAM, 0)
        with pytest.raises(ValueError):
            approx_llr(0j, 1.0, EGIM_4QAM, 3)


class TestSubblock:
    def test_noiseless_exhaustive(self):
        spec = GroupSpec(4, 2, 2)
        for bits in itertools.product((0, 1), repeat=spec.p):
            x = classical_im_map(np.array(bits), spec, 1)
            assert tuple(subblock_ml_detect(x, spec)) == bits

    def test_only_legal_patterns(self):
        spec = GroupSpec(4, 2, 4)
        assert (np.count_nonzero(subblock_candidate_vectors(spec), axis=1) == 2).all()
        rng = np.random.default_rng(6)
        y = rng.standard_normal((500, 4)) + 1j * rng.standard_normal((500, 4))
        for bits in subblock_ml_detect(y, spec):
            assert np.count_nonzero(classical_im_map(bits, spec, 1)) == 2

    def test_hand_enumeration(self):
        spec = GroupSpec(2, 1, 2)
        bits = subblock_ml_detect(np.array([0.9, 0.1]), spec)
        x = classical_im_map(bits, spec, 1)
        assert x[0] != 0 and x[1] == 0

    def test_wrong_size(self):
        with pytest.raises(ValueError):
            subblock_ml_detect(np.zeros(3), GroupSpec(4, 2, 4))
