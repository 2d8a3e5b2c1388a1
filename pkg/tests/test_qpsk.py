"""Tests for QPSK mapping, quadrant decisions and error counting."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from duolink import (
    DemapDiagnostics,
    SYMBOLS,
    count_errors,
    demap_symbols,
    map_symbols,
    quadrant_indices,
)

ISQ2 = 1 / np.sqrt(2)


class TestMapSymbols:
    def test_convention_anchor_quadrant_one(self):
        """Bits 00 map to the quadrant-I center (1+i)/sqrt(2)."""
        np.testing.assert_allclose(map_symbols([0, 0]), [ISQ2 + 1j * ISQ2], atol=1e-12)

    def test_gray_neighbor_quadrant_two(self):
        """Bits 01 map to the quadrant-II center (-1+i)/sqrt(2)."""
        np.testing.assert_allclose(map_symbols([0, 1]), [-ISQ2 + 1j * ISQ2], atol=1e-12)

    def test_gray_mapping_quadrant_three(self):
        """Bits 11 map to the quadrant-III center (-1-i)/sqrt(2)."""
        np.testing.assert_allclose(map_symbols([1, 1]), [-ISQ2 - 1j * ISQ2], atol=1e-12)

    def test_unit_magnitude(self):
        symbols = map_symbols([0, 0, 0, 1, 1, 1, 1, 0])
        np.testing.assert_allclose(np.abs(symbols), 1.0, atol=1e-12)

    def test_phases_are_odd_quarter_pi_multiples(self):
        symbols = map_symbols([0, 0, 0, 1, 1, 1, 1, 0])
        ratio = np.angle(symbols) / (np.pi / 4)
        np.testing.assert_allclose(ratio, np.round(ratio), atol=1e-12)
        assert np.all(np.round(ratio).astype(int) % 2 == 1)

    def test_odd_bit_count_rejected(self):
        with pytest.raises(ValueError, match="even"):
            map_symbols([0, 1, 0])

    def test_non_binary_rejected(self):
        with pytest.raises(ValueError):
            map_symbols([0, 2])

    def test_bijection_on_bit_pairs(self):
        """The four bit pairs map onto the four distinct quadrant centers."""
        symbols = map_symbols([0, 0, 0, 1, 1, 1, 1, 0])
        assert len(np.unique(np.round(symbols, 9))) == 4
        np.testing.assert_allclose(sorted(np.angle(symbols)),
                                   sorted(np.angle(SYMBOLS)), atol=1e-12)

    def test_gray_property_adjacent_quadrants(self):
        """Adjacent quadrants differ in exactly one bit, checked exhaustively."""
        pair_for_k = {}
        for b0 in (0, 1):
            for b1 in (0, 1):
                k = int(quadrant_indices(map_symbols([b0, b1]))[0])
                pair_for_k[k] = (b0, b1)
        for k in range(4):
            a = pair_for_k[k]
            b = pair_for_k[(k + 1) % 4]
            assert (a[0] != b[0]) + (a[1] != b[1]) == 1


class TestDemapSymbols:
    def test_quadrant_one_interior(self):
        np.testing.assert_array_equal(demap_symbols([0.9 + 0.1j]), [0, 0])

    def test_quadrant_three_interior(self):
        np.testing.assert_array_equal(demap_symbols([-0.3 - 0.7j]), [1, 1])

    def test_round_trip_all_symbols(self):
        bits = np.array([0, 0, 0, 1, 1, 1, 1, 0])
        np.testing.assert_array_equal(demap_symbols(map_symbols(bits)), bits)

    @given(st.lists(st.integers(0, 1), min_size=2, max_size=200).filter(
        lambda b: len(b) % 2 == 0))
    def test_round_trip_random_streams(self, bits):
        bits = np.array(bits)
        np.testing.assert_array_equal(demap_symbols(map_symbols(bits)), bits)

    def test_axis_ties_toward_smaller_k(self):
        """Boundary samples decide for the adjacent quadrant with smaller k."""
        ties = {1.0 + 0j: 0, 1j: 0, -1.0 + 0j: 1, -1j: 2}
        for z, k in ties.items():
            assert quadrant_indices([z])[0] == k

    def test_zero_sample_flagged(self):
        diag = DemapDiagnostics()
        bits = demap_symbols([0j, 0.5 + 0.5j], diagnostics=diag)
        np.testing.assert_array_equal(bits, [0, 0, 0, 0])
        assert diag.zero_samples == 1


class TestCountErrors:
    def test_identical_streams(self):
        errors, ber = count_errors([0, 1, 1, 0], [0, 1, 1, 0])
        assert errors == 0 and ber == 0.0

    def test_one_flip_in_thousand(self):
        tx = np.zeros(1000, dtype=int)
        rx = tx.copy()
        rx[123] = 1
        errors, ber = count_errors(tx, rx)
        assert errors == 1
        assert ber == pytest.approx(0.001)

    def test_complemented_stream(self):
        tx = np.array([0, 1, 0, 1])
        errors, ber = count_errors(tx, 1 - tx)
        assert errors == 4 and ber == 1.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="differ"):
            count_errors([0, 1], [0, 1, 0])
