"""Dual-channel coherent QPSK link simulator and DSP library.

Simulates two copropagating QPSK channels distorted by a shared per-symbol
phase process plus independent additive noise, and implements the joint
common-phase compensation that exploits the shared rotation, together with a
reproducible Monte Carlo harness quantifying the bit-error-ratio gain.
"""

from .alignment import (
    AlignedStream,
    AlignmentResult,
    KappaSearchResult,
    adapt_kappa,
    align,
    estimate_delay,
)
from .channel import (
    ChannelParams,
    apply_channel,
    conversion_efficiency,
    export_efficiency_csv,
    gen_common_phase,
    shaped_filter_gain,
    stream_rng,
)
from .compensation import (
    CommonPhaseEstimate,
    EstimatorConfig,
    apply_compensation,
    compensate_pair,
    estimate_common_phase,
)
from .cpe import (
    CpeDiagnostics,
    VVConfig,
    extract_phase,
    remove_mean_phase,
    wrap_quarter,
)
from .harness import (
    BERReport,
    Case,
    ConfigError,
    SweepPoint,
    TrialConfig,
    classify_case,
    classify_cases,
    emit,
    load_trial_config,
    run_sweep,
    run_trial,
    sweep_configs,
    trial_config_from_dict,
    trial_config_to_dict,
    wilson_interval,
)
from .qpsk import (
    DemapDiagnostics,
    SYMBOLS,
    bits_from_quadrants,
    count_errors,
    demap_symbols,
    map_symbols,
    quadrant_indices,
)

__version__ = "0.1.0"
