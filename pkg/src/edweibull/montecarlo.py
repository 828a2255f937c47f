"""Monte Carlo estimates of false-alarm and detection probabilities.

The energy statistic is drawn directly from its chi-square law. Under H1,
2u standard normals are drawn and one of them is shifted by
``sqrt(2 * gamma)``. This gives the same law as integrating a sampled
waveform, at a fraction of the cost.

Random numbers come from numpy's counter-based Philox4x32 bit generator.
The trials are cut into fixed chunks of ``CHUNK_TRIALS``. Chunk ``i`` draws
from ``Philox(SeedSequence(seed, spawn_key=(i,)))``. Chunk results are
integer counts, so any number of worker threads gives bit-identical output.
The default worker count is read from the ``EDWEIBULL_THREADS`` environment
variable.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import WeibullChannel, sample_snr
from .detector import DetectorConfig
from .errors import DomainError

__all__ = [
    "CHUNK_TRIALS",
    "THREADS_ENV",
    "SimSpec",
    "SimReport",
    "chunk_generator",
    "sample_test_statistic",
    "estimate_detection",
]

CHUNK_TRIALS = 65536
THREADS_ENV = "EDWEIBULL_THREADS"
H0 = "H0"
H1 = "H1"


@dataclass(frozen=True)
class SimSpec:
    """What to simulate.

    ``channel`` set means H1 over Weibull fading. Without a channel, H1 uses
    the fixed AWGN SNR ``snr`` (linear). H0 ignores both.
    """

    cfg: DetectorConfig
    trials: int
    seed: int
    hypothesis: str = H1
    channel: Optional[WeibullChannel] = None
    snr: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.trials, bool) or int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.hypothesis not in (H0, H1):
            raise DomainError(f"hypothesis must be 'H0' or 'H1', got {self.hypothesis!r}")
        if self.hypothesis == H1 and self.channel is None and self.snr is None:
            raise DomainError("H1 needs either a fading channel or a fixed snr")
        if self.snr is not None and not (math.isfinite(self.snr) and self.snr >= 0.0):
            raise DomainError(f"snr must be >= 0, got {self.snr!r}")


@dataclass(frozen=True)
class SimReport:
    estimate: float
    trials: int
    seed: int
    half_width_95: float
    hypothesis: str
    detections: int


def chunk_generator(seed, chunk):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def sample_test_statistic(u, gamma, rng, size=None):
    """Draw the energy statistic for SNR ``gamma`` (scalar or array).

    Sum of squares of ``2u`` standard normals, the first one shifted by
    ``sqrt(2 gamma)``; central chi-square with ``2u`` degrees of freedom
    when ``gamma == 0``.
    """
    if isinstance(u, bool) or int(u) != u or u < 1:
        raise DomainError(f"u must be a positive integer, got {u!r}")
    gamma = np.asarray(gamma, dtype=float)
    if np.any(~(gamma >= 0.0)):
        raise DomainError("gamma must be >= 0")
    n = size if size is not None else (gamma.shape[0] if gamma.ndim else None)
    shape = (2 * int(u),) if n is None else (n, 2 * int(u))
    z = rng.standard_normal(shape)
    z[..., 0] += np.sqrt(2.0 * gamma)
    y = np.einsum("...i,...i->...", z, z)
    return float(y) if n is None else y


def _count_chunk(spec, chunk):
    start = chunk * CHUNK_TRIALS
    n = min(CHUNK_TRIALS, spec.trials - start)
    rng = chunk_generator(spec.seed, chunk)
    if spec.hypothesis == H0:
        gamma = np.zeros(n)
    elif spec.channel is not None:
        gamma = sample_snr(spec.channel, rng, n)
    else:
        gamma = np.full(n, spec.snr)
    y = sample_test_statistic(spec.cfg.u, gamma, rng)
    return int(np.count_nonzero(y > spec.cfg.threshold))


def default_threads():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if threads < 1:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return threads


def estimate_detection(spec, threads=None):
    """Empirical probability that the statistic exceeds the threshold.

    Under H0 this estimates the false-alarm probability, under H1 the
    (fading-averaged) detection probability.
    """
    threads = default_threads() if threads is None else threads
    chunks = range(math.ceil(spec.trials / CHUNK_TRIALS))
    if threads <= 1:
        counts = [_count_chunk(spec, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(lambda c: _count_chunk(spec, c), chunks))
    hits = sum(counts)
    p = hits / spec.trials
    return SimReport(
        estimate=p,
        trials=spec.trials,
        seed=spec.seed,
        half_width_95=1.96 * math.sqrt(p * (1.0 - p) / spec.trials),
        hypothesis=spec.hypothesis,
        detections=hits,
    )
