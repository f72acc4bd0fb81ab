"""Local Hurst exponent of price series by windowed DFA, with crash-warning rules."""

from .dfa import (
    Coverage,
    DfaConfig,
    FluctuationCurve,
    HurstEstimate,
    ObservationWindow,
    default_tau_grid,
    detrended_variance,
    estimate_hurst,
    fluctuation_function,
    fluctuations_at,
    hurst_dfa,
    partition_boxes,
)
from .signals import (
    CorrectionModel,
    CrashEvent,
    SignalThresholds,
    SignalVerdict,
    TrendFit,
    Verdict,
    evaluate_signal,
    extrapolate_trend,
    fit_hloc_trend,
    measure_correction,
    signal_timeline,
    slope_correction_regression,
)
from .synth import FbmSpec, fbm_price_series, generate_crash_series, generate_fbm, generate_fgn
from .track import HurstTrack, PriceSeries, moving_average, sliding_hurst

__version__ = "0.1.0"
