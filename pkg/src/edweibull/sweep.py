"""Curve generation: detection probability vs average SNR and complementary ROC.

Rows are emitted with the fixed column set :data:`COLUMNS`. Floats are
written with 12 significant digits, so the same configuration always
regenerates byte-identical CSV or JSON.
"""

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .channel import WeibullChannel
from .detector import DetectorConfig, avg_pd, threshold_for_pf
from .errors import DomainError
from .montecarlo import SimSpec, estimate_detection

__all__ = [
    "COLUMNS",
    "SweepSpec",
    "RocPoint",
    "snr_grid",
    "log_pf_grid",
    "run_pd_vs_snr",
    "run_comp_roc",
    "run_sweep",
    "write_csv",
    "write_json",
]

COLUMNS = ("kind", "u", "a", "snr_db", "pf", "lambda", "pd", "pm", "method", "est_error")
PD_VS_SNR = "pd_vs_snr"
COMP_ROC = "comp_roc"


def log_pf_grid(lo=1e-3, hi=0.999, n=50):
    return tuple(float(x) for x in np.geomspace(lo, hi, n))


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    u: int = 5
    a_values: Tuple[float, ...] = (0.5, 1.0, 1.5, 2.0)
    pf_fixed: float = 0.1
    snr_db_range: Tuple[float, float, float] = (-10.0, 30.0, 0.5)
    snr_db_fixed: float = 10.0
    pf_grid: Tuple[float, ...] = field(default_factory=log_pf_grid)
    engine: str = "analytic"
    method: str = "auto"
    trials: int = 100000
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (PD_VS_SNR, COMP_ROC):
            raise DomainError(f"kind must be {PD_VS_SNR!r} or {COMP_ROC!r}, got {self.kind!r}")
        if isinstance(self.u, bool) or int(self.u) != self.u or self.u < 1:
            raise DomainError(f"u must be a positive integer, got {self.u!r}")
        if not self.a_values or any(not (a > 0.0 and math.isfinite(a)) for a in self.a_values):
            raise DomainError("a_values must be a nonempty list of positive numbers")
        if self.engine not in ("analytic", "simulate"):
            raise DomainError(f"engine must be 'analytic' or 'simulate', got {self.engine!r}")
        if self.method not in ("auto", "series", "quadrature"):
            raise DomainError(f"method must be auto, series or quadrature, got {self.method!r}")
        if self.kind == PD_VS_SNR:
            if not 0.0 < self.pf_fixed < 1.0:
                raise DomainError(f"pf_fixed must lie in (0, 1), got {self.pf_fixed!r}")
            start, stop, step = self.snr_db_range
            if not step > 0.0 or stop < start:
                raise DomainError("snr_db_range needs step > 0 and stop >= start")
        else:
            if not self.pf_grid or any(not 0.0 < p < 1.0 for p in self.pf_grid):
                raise DomainError("pf_grid must be a nonempty list of values in (0, 1)")
            if not math.isfinite(self.snr_db_fixed):
                raise DomainError("snr_db_fixed must be finite")


@dataclass(frozen=True)
class RocPoint:
    kind: str
    u: int
    a: float
    snr_db: float
    pf: float
    lam: float
    pd: float
    pm: float
    method: str
    est_error: float

    def record(self):
        """Row as a dict keyed by :data:`COLUMNS`."""
        row = asdict(self)
        row["lambda"] = row.pop("lam")
        return {k: row[k] for k in COLUMNS}


def snr_grid(start, stop, step):
    """Inclusive grid ``start, start + step, ..., <= stop``."""
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(n)]


def _point_seed(seed, index):
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def _evaluate(spec, index, a, snr_db, pf):
    lam = threshold_for_pf(spec.u, pf)
    cfg = DetectorConfig(spec.u, lam)
    ch = WeibullChannel.from_db(a, snr_db)
    if spec.engine == "simulate":
        rep = estimate_detection(
            SimSpec(cfg, spec.trials, _point_seed(spec.seed, index), "H1", ch), threads=1
        )
        pd, method, err = rep.estimate, "simulate", rep.half_width_95
    else:
        res = avg_pd(cfg, ch, method=spec.method)
        pd, method, err = res.value, res.method, res.est_error
    return RocPoint(spec.kind, spec.u, a, snr_db, pf, lam, pd, 1.0 - pd, method, err)


def _run(spec, grid, threads):
    jobs = [(i, a, snr, pf) for i, (a, snr, pf) in enumerate(grid)]
    if threads <= 1:
        return [_evaluate(spec, *job) for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: _evaluate(spec, *job), jobs))


def run_pd_vs_snr(spec, threads=1):
    """Average detection probability against average SNR at fixed false-alarm rate.

    Points come out in (a, snr) lexicographic order.
    """
    if spec.kind != PD_VS_SNR:
        raise DomainError("run_pd_vs_snr needs a pd_vs_snr spec")
    snrs = snr_grid(*spec.snr_db_range)
    grid = [(a, s, spec.pf_fixed) for a in spec.a_values for s in snrs]
    return _run(spec, grid, threads)


def run_comp_roc(spec, threads=1):
    """Missed-detection probability against false-alarm probability at fixed SNR."""
    if spec.kind != COMP_ROC:
        raise DomainError("run_comp_roc needs a comp_roc spec")
    grid = [(a, spec.snr_db_fixed, pf) for a in spec.a_values for pf in spec.pf_grid]
    return _run(spec, grid, threads)


def run_sweep(spec, threads=1):
    if spec.kind == PD_VS_SNR:
        return run_pd_vs_snr(spec, threads)
    return run_comp_roc(spec, threads)


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_csv(points: Sequence[RocPoint], stream, header=True):
    writer = csv.writer(stream, lineterminator="\n")
    if header:
        writer.writerow(COLUMNS)
    for p in points:
        writer.writerow([_fmt(v) for v in p.record().values()])


def _json_value(value):
    if isinstance(value, str) or isinstance(value, int):
        return value
    return float(format(float(value), ".12g"))


def write_json(points: Sequence[RocPoint], stream):
    rows = [{k: _json_value(v) for k, v in p.record().items()} for p in points]
    json.dump(rows, stream, indent=1)
    stream.write("\n")
