"""QPSK bit mapping, quadrant decisions and bit-error counting.

Symbols sit at the quadrant centers exp(i(pi/4 + k*pi/2)), k = 0..3 counted
counterclockwise from quadrant I, so each complex-plane quadrant is one
decision region.  Gray convention: k=0 -> 00, k=1 -> 01, k=2 -> 11, k=3 -> 10
(adjacent quadrants differ in exactly one bit).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Quadrant centers, index = Gray symbol index k.
SYMBOLS = np.exp(1j * (np.pi / 4 + np.arange(4) * np.pi / 2))


@dataclass
class DemapDiagnostics:
    """Counters updated by demap_symbols when fed degenerate samples."""

    zero_samples: int = 0


def map_symbols(bits: np.ndarray) -> np.ndarray:
    """Map a {0,1} bit stream (even length) to unit-energy QPSK symbols.

    Bit pairs are consumed in order (b0, b1) per symbol; the Gray index is
    k = 2*b0 + (b0 xor b1).
    """
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size % 2 != 0:
        raise ValueError(f"bit stream length must be even, got {bits.size}")
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ValueError("bit stream may only contain 0 and 1")
    b0 = bits[0::2].astype(np.int64)
    b1 = bits[1::2].astype(np.int64)
    k = 2 * b0 + (b0 ^ b1)
    return SYMBOLS[k]


def quadrant_indices(samples: np.ndarray) -> np.ndarray:
    """Quadrant index (Gray symbol index k) of each complex sample.

    Ties on the axes go to the adjacent quadrant with the smaller k; the
    origin maps to k=0.
    """
    z = np.asarray(samples)
    re, im = z.real, z.imag
    return np.where(
        im > 0,
        np.where(re >= 0, 0, 1),
        np.where(
            im < 0,
            np.where(re <= 0, 2, 3),
            # im == 0: real axis or origin
            np.where(re > 0, 0, np.where(re < 0, 1, 0)),
        ),
    ).astype(np.int64)


def bits_from_quadrants(k: np.ndarray) -> np.ndarray:
    """Interleaved (b0, b1) bit stream for a vector of quadrant indices."""
    k = np.asarray(k, dtype=np.int64)
    b0 = k // 2
    b1 = b0 ^ (k & 1)
    bits = np.empty(2 * k.size, dtype=np.int64)
    bits[0::2] = b0
    bits[1::2] = b1
    return bits


def demap_symbols(
    samples: np.ndarray, diagnostics: DemapDiagnostics | None = None
) -> np.ndarray:
    """Hard-decide each sample to the bits of the quadrant containing it."""
    z = np.asarray(samples)
    if diagnostics is not None:
        diagnostics.zero_samples += int(np.count_nonzero(z == 0))
    return bits_from_quadrants(quadrant_indices(z))


def count_errors(tx: np.ndarray, rx: np.ndarray) -> tuple[int, float]:
    """Return (bit error count, BER) between two equal-length bit streams."""
    tx = np.asarray(tx)
    rx = np.asarray(rx)
    if tx.shape != rx.shape:
        raise ValueError(f"bit stream lengths differ: {tx.size} vs {rx.size}")
    if tx.size == 0:
        return 0, 0.0
    errors = int(np.count_nonzero(tx != rx))
    return errors, errors / tx.size
