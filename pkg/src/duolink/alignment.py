"""Inter-channel delay recovery, stream alignment and kappa tuning.

The joint compensator needs both channels observed at the same symbol index.
The integer clock offset between them shows up as a shift between their
extracted phase traces and is recovered by normalized cross-correlation; the
faster channel is then buffered (shifted) into alignment. The estimator's
weighting factor kappa is tuned by a golden-section control loop on measured
BER, assumed unimodal in kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

# Peak correlation at or above this is considered a reliable delay estimate.
CONFIDENCE_THRESHOLD = 0.5

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class AlignmentResult:
    """lag > 0 means trace2 leads trace1 by `lag` symbols (trace2[n] matches
    trace1[n + lag]); align(rx2, lag) buffers it back into alignment."""

    lag: int
    peak_correlation: float
    confident: bool


@dataclass
class AlignedStream:
    """Shifted stream plus validity mask; overhang symbols are invalid and
    must be excluded from error counting."""

    samples: np.ndarray
    valid: np.ndarray


@dataclass
class KappaSearchResult:
    kappa_opt: float
    ber_at_opt: float
    evaluations: int
    improving: bool = True
    bracket_warning: bool = False


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    # constant traces carry no alignment information (and mean subtraction
    # would leave only rounding dust that self-correlates)
    if x.max() == x.min() or y.max() == y.min():
        return 0.0
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(np.dot(dx, dx)) * float(np.dot(dy, dy)))
    if denom == 0:
        return 0.0
    return float(np.dot(dx, dy)) / denom


def estimate_delay(
    trace1: np.ndarray, trace2: np.ndarray, max_lag: int
) -> AlignmentResult:
    """Lag in [-max_lag, max_lag] maximizing the normalized cross-correlation
    of the two phase traces. Ties resolve to the smaller |lag| (negative
    before positive); constant traces correlate as 0.
    """
    t1 = np.asarray(trace1, dtype=float)
    t2 = np.asarray(trace2, dtype=float)
    if t1.size != t2.size:
        raise ValueError(f"trace lengths differ: {t1.size} vs {t2.size}")
    if not isinstance(max_lag, (int, np.integer)) or max_lag < 0:
        raise ValueError("max_lag must be a nonnegative integer")
    n = t1.size
    if n <= 2 * max_lag:
        raise ValueError(f"traces of length {n} too short for max_lag={max_lag}")
    best_lag = 0
    best_corr = -np.inf
    for lag in sorted(range(-max_lag, max_lag + 1), key=lambda s: (abs(s), s)):
        if lag >= 0:
            r = _pearson(t1[lag:], t2[: n - lag])
        else:
            r = _pearson(t1[: n + lag], t2[-lag:])
        if r > best_corr:
            best_corr = r
            best_lag = lag
    return AlignmentResult(best_lag, best_corr, best_corr >= CONFIDENCE_THRESHOLD)


def align(samples: np.ndarray, lag: int) -> AlignedStream:
    """Shift a stream by `lag` symbols (circularly), marking the |lag|
    wrapped-in overhang symbols invalid."""
    s = np.asarray(samples)
    if not isinstance(lag, (int, np.integer)):
        raise ValueError("lag must be an integer")
    if abs(lag) >= s.size:
        raise ValueError(f"|lag|={abs(lag)} must be smaller than length {s.size}")
    out = np.roll(s, lag)
    valid = np.ones(s.size, dtype=bool)
    if lag > 0:
        valid[:lag] = False
    elif lag < 0:
        valid[lag:] = False
    return AlignedStream(out, valid)


def adapt_kappa(
    evaluate: Callable[[float], float], lo: float, hi: float, tol: float
) -> KappaSearchResult:
    """Golden-section search for the kappa minimizing a BER objective.

    Assumes BER(kappa) unimodal on [lo, hi]; returns the final bracket
    midpoint once the bracket is narrower than tol. Never evaluates outside
    [lo, hi]. Equal probe values shrink the lower side (a degenerate constant
    objective therefore slides the bracket toward hi). `bracket_warning` is
    set when the evaluated points, ordered by kappa, do not form a single
    descent-then-ascent pattern (unimodality violated or Monte Carlo noise);
    `improving` is False when the objective never varied over the
    evaluations.
    """
    if not (hi > lo):
        raise ValueError("need hi > lo")
    if not (tol > 0):
        raise ValueError("tol must be > 0")
    history: list[tuple[float, float]] = []

    def f(kappa: float) -> float:
        value = float(evaluate(kappa))
        if not math.isfinite(value):
            raise ValueError(f"objective returned non-finite BER {value} at kappa={kappa}")
        history.append((kappa, value))
        return value

    a, b = float(lo), float(hi)
    if b - a < tol:
        mid = (a + b) / 2
        return KappaSearchResult(mid, f(mid), 1)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    yc = f(c)
    yd = f(d)
    while b - a >= tol:
        if yc < yd:
            b, d, yd = d, c, yc
            c = b - _INV_PHI * (b - a)
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            d = a + _INV_PHI * (b - a)
            yd = f(d)
    values = [v for _, v in history]
    by_kappa = sorted(history)
    lowest = min(range(len(by_kappa)), key=lambda i: by_kappa[i][1])
    descent_ok = all(
        by_kappa[i][1] >= by_kappa[i + 1][1] for i in range(lowest)
    )
    ascent_ok = all(
        by_kappa[i][1] <= by_kappa[i + 1][1] for i in range(lowest, len(by_kappa) - 1)
    )
    return KappaSearchResult(
        kappa_opt=(a + b) / 2,
        ber_at_opt=min(values),
        evaluations=len(history),
        improving=max(values) > min(values),
        bracket_warning=not (descent_ok and ascent_ok),
    )
