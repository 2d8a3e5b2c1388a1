"""Independent reference implementations used as test oracles.

Everything here is deliberately written without touching the package
internals so that an implementation bug cannot hide in its own oracle.
"""

import math

from duolink import Case

# Hand-written truth table for the four compensation-outcome cases, keyed by
# (rx1 correct, rx2 correct, post1 correct, post2 correct). Derived from the
# constellation walk-through: both received correct -> nothing to do; at
# least one received wrong but everything correct afterwards -> successful
# correction; a channel that was correct got broken -> additional errors;
# everything else is an uncorrectable failure.
CASE_TRUTH_TABLE = {
    (True, True, True, True): Case.NO_CORRECTION_REQUIRED,
    (True, True, True, False): Case.NO_CORRECTION_REQUIRED,
    (True, True, False, True): Case.NO_CORRECTION_REQUIRED,
    (True, True, False, False): Case.NO_CORRECTION_REQUIRED,
    (True, False, True, True): Case.CORRECTION_SUCCESSFUL,
    (True, False, True, False): Case.NO_CORRECTION_POSSIBLE,
    (True, False, False, True): Case.ADDITIONAL_ERRORS,
    (True, False, False, False): Case.ADDITIONAL_ERRORS,
    (False, True, True, True): Case.CORRECTION_SUCCESSFUL,
    (False, True, True, False): Case.ADDITIONAL_ERRORS,
    (False, True, False, True): Case.NO_CORRECTION_POSSIBLE,
    (False, True, False, False): Case.ADDITIONAL_ERRORS,
    (False, False, True, True): Case.CORRECTION_SUCCESSFUL,
    (False, False, True, False): Case.NO_CORRECTION_POSSIBLE,
    (False, False, False, True): Case.NO_CORRECTION_POSSIBLE,
    (False, False, False, False): Case.NO_CORRECTION_POSSIBLE,
}


def weighted_phase_reference(phi1: float, phi2: float, kappa: float) -> float:
    """Direct scalar evaluation of the weighted common-phase estimate."""
    w1 = math.exp(-kappa * abs(phi1))
    w2 = math.exp(-kappa * abs(phi2))
    return (w1 * phi1 + w2 * phi2) / (w1 + w2)


def wilson_reference(errors: int, trials: int) -> tuple[float, float]:
    """Scalar Wilson 95% interval (cross-checked against statsmodels)."""
    z = 1.959963984540054
    p = errors / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return center - half, center + half
