"""Energy detection performance over Weibull fading channels."""

from .channel import WeibullChannel, db_to_linear
from .detector import (
    AvgPdResult,
    DetectorConfig,
    avg_pd,
    avg_pd_weibull_quadrature,
    avg_pd_weibull_series,
    prob_detection_awgn,
    prob_false_alarm,
    prob_missed,
    threshold_for_pf,
)
from .errors import AccuracyError, ConvergenceError, DomainError
from .montecarlo import SimReport, SimSpec, estimate_detection
from .specfun import SeriesControl
from .sweep import RocPoint, SweepSpec, run_comp_roc, run_pd_vs_snr

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "AvgPdResult",
    "ConvergenceError",
    "DetectorConfig",
    "DomainError",
    "RocPoint",
    "SeriesControl",
    "SimReport",
    "SimSpec",
    "SweepSpec",
    "WeibullChannel",
    "avg_pd",
    "avg_pd_weibull_quadrature",
    "avg_pd_weibull_series",
    "db_to_linear",
    "estimate_detection",
    "prob_detection_awgn",
    "prob_false_alarm",
    "prob_missed",
    "run_comp_roc",
    "run_pd_vs_snr",
    "threshold_for_pf",
]
