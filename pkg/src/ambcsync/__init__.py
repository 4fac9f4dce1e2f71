"""Link-level simulation of symbol timing recovery for ambient backscatter receivers.

The package covers the full pilot-aided pipeline: block-fading channel and
signal generation, frame construction with an alternating-bit pilot,
injection of a sampling-clock offset, maximum-likelihood estimation of the
offset from the received pilot matrix, clock compensation, and per-symbol
energy detection.  Seeded Monte Carlo runners reproduce the estimation
accuracy and bit-error-rate experiments as CSV files.
"""

from .detector import (
    DecisionRecord,
    DegenerateChannelError,
    DetectorParams,
    compensate,
    decide,
    detect_frame,
    ed_threshold,
    energy_statistic,
)
from .estimator import (
    DegenerateSegmentError,
    LikelihoodTrace,
    StoEstimate,
    collect_windows,
    estimate_sto,
    estimation_error,
    log_likelihood_reduced,
    variance_estimates,
)
from .frame import (
    FrameConfig,
    Waveform,
    apply_sto,
    build_bit_sequence,
    synthesize_received,
)
from .harness import (
    BerResult,
    ErrorHistResult,
    ExperimentConfig,
    MaeResult,
    resolve_threads,
    run_ber,
    run_error_hist,
    run_experiment,
    run_mae,
    write_csv,
)
from .signal_model import (
    ChannelState,
    NoisePowers,
    draw_channel,
    gen_cgn_block,
    symbol_variances,
    trial_rng,
)

__version__ = "0.1.0"

__all__ = [
    "BerResult",
    "ChannelState",
    "DecisionRecord",
    "DegenerateChannelError",
    "DegenerateSegmentError",
    "DetectorParams",
    "ErrorHistResult",
    "ExperimentConfig",
    "FrameConfig",
    "LikelihoodTrace",
    "MaeResult",
    "NoisePowers",
    "StoEstimate",
    "Waveform",
    "apply_sto",
    "build_bit_sequence",
    "collect_windows",
    "compensate",
    "decide",
    "detect_frame",
    "draw_channel",
    "ed_threshold",
    "energy_statistic",
    "estimate_sto",
    "estimation_error",
    "gen_cgn_block",
    "log_likelihood_reduced",
    "resolve_threads",
    "run_ber",
    "run_error_hist",
    "run_experiment",
    "run_mae",
    "symbol_variances",
    "synthesize_received",
    "trial_rng",
    "variance_estimates",
    "write_csv",
]
