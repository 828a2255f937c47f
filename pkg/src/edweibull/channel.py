"""Weibull fading channel: envelope and SNR statistics, and SNR sampling.

The SNR-domain functions need only the fading severity ``a`` and the average
SNR ``gamma_bar``. The envelope-domain functions additionally need the mean
power ``omega``.

``envelope_moment`` returns ``Gamma(1 + n/a)``, the moment of a unit-scale
envelope. It carries no ``omega`` scale factor.

All density and distribution functions accept scalars or numpy arrays.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError

__all__ = [
    "WeibullChannel",
    "db_to_linear",
    "pdf_envelope",
    "pdf_snr",
    "cdf_snr",
    "cdf_envelope",
    "envelope_moment",
    "weibull_constant_A",
    "snr_scale",
    "snr_from_uniform",
    "sample_snr",
]


def db_to_linear(db):
    """Power ratio from decibels, ``10 ** (db / 10)``."""
    return _scalar(10.0 ** (np.asarray(db, dtype=float) / 10.0))


@dataclass(frozen=True)
class WeibullChannel:
    """Fading severity ``a``, average SNR ``gamma_bar`` (linear), optional ``omega``."""

    a: float
    gamma_bar: float
    omega: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise DomainError(f"fading severity a must be positive, got {self.a!r}")
        if not (math.isfinite(self.gamma_bar) and self.gamma_bar > 0.0):
            raise DomainError(f"gamma_bar must be positive, got {self.gamma_bar!r}")
        if self.omega is not None and not (math.isfinite(self.omega) and self.omega > 0.0):
            raise DomainError(f"omega must be positive when set, got {self.omega!r}")

    @classmethod
    def from_db(cls, a, snr_db, omega=None):
        return cls(a=a, gamma_bar=db_to_linear(snr_db), omega=omega)


def weibull_constant_A(a):
    """``[Gamma(1 + 2/a)] ** (a/2)``, evaluated through the log."""
    if not a > 0.0:
        raise DomainError(f"a must be positive, got {a!r}")
    return math.exp(0.5 * a * math.lgamma(1.0 + 2.0 / a))


def snr_scale(ch):
    """Weibull scale of the SNR: ``gamma_bar / Gamma(1 + 2/a)``."""
    return ch.gamma_bar / math.gamma(1.0 + 2.0 / ch.a)


def _require_omega(ch):
    if ch.omega is None:
        raise DomainError("envelope-domain operation needs WeibullChannel.omega")
    return ch.omega


def _nonneg(name, x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 0.0)):
        raise DomainError(f"{name} must be >= 0")
    return x


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def pdf_envelope(ch, r):
    """Envelope density ``p_R(r)``."""
    omega = _require_omega(ch)
    r = _nonneg("r", r)
    a = ch.a
    g = math.gamma(1.0 + 2.0 / a)
    with np.errstate(divide="ignore"):
        out = a * (g / omega) ** (a / 2) * r ** (a - 1.0) * np.exp(-((r * r * g / omega) ** (a / 2)))
    return _scalar(out)


def cdf_envelope(ch, r):
    """Envelope distribution function ``P_R(r)``."""
    omega = _require_omega(ch)
    r = _nonneg("r", r)
    g = math.gamma(1.0 + 2.0 / ch.a)
    return _scalar(-np.expm1(-((r * r * g / omega) ** (ch.a / 2))))


def pdf_snr(ch, gamma):
    """Density of the instantaneous SNR. Diverges at 0 when ``a < 2``."""
    gamma = _nonneg("gamma", gamma)
    a = ch.a
    g = math.gamma(1.0 + 2.0 / a)
    with np.errstate(divide="ignore"):
        out = (
            0.5 * a * (g / ch.gamma_bar) ** (a / 2) * gamma ** (a / 2 - 1.0)
            * np.exp(-((gamma * g / ch.gamma_bar) ** (a / 2)))
        )
    return _scalar(out)


def cdf_snr(ch, gamma):
    """Distribution function of the instantaneous SNR."""
    gamma = _nonneg("gamma", gamma)
    g = math.gamma(1.0 + 2.0 / ch.a)
    return _scalar(-np.expm1(-((gamma * g / ch.gamma_bar) ** (ch.a / 2))))


def envelope_moment(ch, n):
    """``E[R^n] = Gamma(1 + n/a)`` for the unit-scale envelope."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"moment order must be a positive integer, got {n!r}")
    return math.gamma(1.0 + n / ch.a)


def snr_from_uniform(ch, uniform):
    """Inverse of ``1 - cdf_snr``: maps U in (0, 1) to an SNR draw."""
    uniform = np.asarray(uniform, dtype=float)
    return _scalar(snr_scale(ch) * (-np.log(uniform)) ** (2.0 / ch.a))


def sample_snr(ch, rng, size=None):
    """Draw instantaneous SNR values by inverse-CDF sampling.

    ``rng`` is a :class:`numpy.random.Generator` owned by the caller.
    Uniforms come from [0, 1 - 2**-53]; an exact 0 is replaced by half a
    grid step so the log never sees an endpoint of (0, 1).
    """
    uniform = rng.random(size)
    uniform = np.where(uniform == 0.0, 2.0**-54, uniform)
    return snr_from_uniform(ch, uniform)
