"""Joint estimation and removal of the phase shift shared by two channels.

Each channel provides a per-symbol phase observation phi_j (offset from its
quadrant center). Because the physical rotation is common while the additive
noise is not, a weighted average favoring the observation of smaller
magnitude estimates the common rotation better than either channel alone:

    w_j      = exp(-kappa * |phi_j|)
    phi_est  = (w1*phi1 + w2*phi2) / (w1 + w2)

kappa = 0 gives the plain mean; as kappa grows the estimate approaches the
observation of minimum magnitude, available exactly (and without overflow)
as the `kappa_infinite` mode. The estimate is removed from both channels by
complex rotation, which preserves sample magnitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cpe import HALF_PI, VVConfig, extract_phase, wrap_quarter

PIPELINES = ("cascaded", "combined")


@dataclass
class EstimatorConfig:
    """Weighting factor and pipeline selection for the joint compensator.

    kappa             weighting factor >= 0 (0 = arithmetic mean)
    kappa_infinite    use the minimum-magnitude border case, ignoring kappa
    subtract_half_pi  subtract pi/2 from every estimate (for axis-aligned
                      symbol conventions; unused with quadrant-center symbols)
    pipeline          "cascaded": per-channel mean-phase removal first, then
                      joint estimation on the residual traces;
                      "combined": one joint stage on the raw traces
    """

    kappa: float = 0.0
    kappa_infinite: bool = False
    subtract_half_pi: bool = False
    pipeline: str = "cascaded"

    def __post_init__(self) -> None:
        if not math.isfinite(self.kappa) or self.kappa < 0:
            raise ValueError("kappa must be finite and >= 0")
        if self.pipeline not in PIPELINES:
            raise ValueError(f"pipeline must be one of {PIPELINES}")


@dataclass
class CommonPhaseEstimate:
    """Joint estimate plus the weights that produced it.

    For finite kappa the weights are normalized so the larger one is exactly 1
    (same estimate as the raw exp(-kappa*|phi|) weights, but immune to
    underflow); in kappa_infinite mode they are the 0/1 selection indicators.
    """

    value: float | np.ndarray
    weights: tuple[float, float] | tuple[np.ndarray, np.ndarray]


def estimate_common_phase(phi1, phi2, cfg: EstimatorConfig) -> CommonPhaseEstimate:
    """Weighted joint estimate of the common phase from two observations.

    Accepts scalars or equal-length arrays (per-symbol estimation).
    """
    scalar = np.ndim(phi1) == 0 and np.ndim(phi2) == 0
    p1 = np.asarray(phi1, dtype=float)
    p2 = np.asarray(phi2, dtype=float)
    if p1.shape != p2.shape:
        raise ValueError("phase inputs must have identical shape")
    if not (np.isfinite(p1).all() and np.isfinite(p2).all()):
        raise ValueError("phase inputs must be finite")
    a1 = np.abs(p1)
    a2 = np.abs(p2)
    if cfg.kappa_infinite:
        pick2 = a2 < a1  # tie -> channel 1
        value = np.where(pick2, p2, p1)
        w2 = pick2.astype(float)
        w1 = 1.0 - w2
    else:
        floor = np.minimum(a1, a2)
        w1 = np.exp(-cfg.kappa * (a1 - floor))
        w2 = np.exp(-cfg.kappa * (a2 - floor))
        value = (w1 * p1 + w2 * p2) / (w1 + w2)
    if cfg.subtract_half_pi:
        value = value - HALF_PI
    if scalar:
        return CommonPhaseEstimate(float(value), (float(w1), float(w2)))
    return CommonPhaseEstimate(value, (w1, w2))


def apply_compensation(rx: np.ndarray, estimates: np.ndarray) -> np.ndarray:
    """Rotate each sample by minus its estimated common phase."""
    rx = np.asarray(rx)
    est = np.asarray(estimates, dtype=float)
    if est.size != rx.size:
        raise ValueError(f"estimate length {est.size} != stream length {rx.size}")
    return rx * np.exp(-1j * est)


def compensate_pair(
    rx1: np.ndarray,
    rx2: np.ndarray,
    vv: VVConfig,
    cfg: EstimatorConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Jointly compensate two received streams observed at the same symbol index.

    cascaded pipeline with vv.remove_mean: each channel's block-mean phase is
    removed first (samples rotated, traces re-centered), then the per-symbol
    joint estimate of the residual is removed from both channels.

    combined pipeline: one stage, joint per-symbol estimate straight from the
    raw extracted traces (vv.remove_mean has no separable meaning here and is
    ignored). Both pipelines are identical for window=1, remove_mean=False.
    """
    rx1 = np.asarray(rx1)
    rx2 = np.asarray(rx2)
    if rx1.shape != rx2.shape:
        raise ValueError(f"stream lengths differ: {rx1.size} vs {rx2.size}")
    t1 = extract_phase(rx1, vv)
    t2 = extract_phase(rx2, vv)
    if cfg.pipeline == "cascaded" and vv.remove_mean:
        m1 = t1.mean()
        m2 = t2.mean()
        t1 = wrap_quarter(t1 - m1)
        t2 = wrap_quarter(t2 - m2)
        rx1 = rx1 * np.exp(-1j * m1)
        rx2 = rx2 * np.exp(-1j * m2)
    est = estimate_common_phase(t1, t2, cfg)
    return apply_compensation(rx1, est.value), apply_compensation(rx2, est.value)
