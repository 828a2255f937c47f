"""Energy-detector performance in AWGN and averaged over Weibull fading.

Two independent routes to the fading-averaged detection probability:

* :func:`avg_pd_weibull_series` sums the closed-form series in incomplete
  gamma / Kummer terms;
* :func:`avg_pd_weibull_quadrature` integrates the AWGN detection
  probability against the SNR density numerically.

:func:`avg_pd` tries the series and falls back to quadrature whenever the
series cannot deliver a trustworthy value.
"""

import math
from dataclasses import dataclass

from scipy import integrate

from . import specfun
from .channel import snr_scale, weibull_constant_A
from .errors import ConvergenceError, DomainError
from .specfun import DEFAULT_CONTROL, SeriesControl, clamp_probability

__all__ = [
    "DetectorConfig",
    "AvgPdResult",
    "prob_false_alarm",
    "threshold_for_pf",
    "prob_detection_awgn",
    "avg_pd_weibull_series",
    "avg_pd_weibull_quadrature",
    "avg_pd",
    "prob_missed",
]

_EPS = 2.0**-52
# 1F1 factors inside the alternating sum are taken to full precision
_KUMMER_CONTROL = SeriesControl(rel_tol=_EPS / 2, max_terms=100000, consecutive_small=2)
_MAX_QUAD_EVALS = 10**6
_LOG_MAX = math.log(1e300)


@dataclass(frozen=True)
class DetectorConfig:
    """Radiometer with time-bandwidth product ``u`` and decision ``threshold``.

    Detection is declared when the energy statistic strictly exceeds
    ``threshold``.
    """

    u: int
    threshold: float

    def __post_init__(self):
        if isinstance(self.u, bool) or int(self.u) != self.u or self.u < 1:
            raise DomainError(f"u must be a positive integer, got {self.u!r}")
        object.__setattr__(self, "u", int(self.u))
        if not (math.isfinite(self.threshold) and self.threshold > 0.0):
            raise DomainError(f"threshold must be positive, got {self.threshold!r}")

    @classmethod
    def from_pf(cls, u, pf):
        return cls(u, threshold_for_pf(u, pf))


@dataclass(frozen=True)
class AvgPdResult:
    value: float
    terms_used: int
    method: str  # "series" or "quadrature"
    est_error: float

    @property
    def pm(self):
        return prob_missed(self.value)


def prob_false_alarm(cfg):
    """``Gamma(u, threshold/2) / Gamma(u)``."""
    return specfun.reg_upper_gamma(cfg.u, 0.5 * cfg.threshold)


def threshold_for_pf(u, pf_target):
    """Threshold that yields false-alarm probability ``pf_target``."""
    if math.isnan(pf_target) or not 0.0 < pf_target < 1.0:
        raise DomainError(f"pf_target must lie in (0, 1), got {pf_target!r}")
    if isinstance(u, bool) or int(u) != u or u < 1:
        raise DomainError(f"u must be a positive integer, got {u!r}")
    return 2.0 * specfun.inv_reg_upper_gamma(int(u), pf_target)


def prob_detection_awgn(cfg, gamma):
    """AWGN detection probability ``Q_u(sqrt(2 gamma), sqrt(threshold))``."""
    if math.isnan(gamma) or gamma < 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma!r}")
    return specfun.marcum_q(cfg.u, math.sqrt(2.0 * gamma), math.sqrt(cfg.threshold))


def prob_missed(pd):
    if math.isnan(pd) or not 0.0 <= pd <= 1.0:
        raise DomainError(f"pd must lie in [0, 1], got {pd!r}")
    return 1.0 - pd


def _zero_snr_sum(u, lam):
    """``exp(-lam/2) * sum_{l<u} (lam/2)^l / l!`` as an explicit finite sum."""
    half = 0.5 * lam
    log_half = math.log(half)
    return math.fsum(math.exp(l * log_half - half - math.lgamma(l + 1.0)) for l in range(u))


def _series_term(l, log_c0, log_a_const, log_gbar, a, u, half_lam):
    """Log-magnitude of the l-th alternating term and a rounding-error weight.

    The weight is the sum of magnitudes of the pieces added in the log domain;
    ``eps * weight`` bounds the relative error of ``exp(log_mag)``.
    """
    p = 0.5 * l * a + 1.0
    lg_p = math.lgamma(p)
    lg_l = math.lgamma(l + 1.0)
    log_f = specfun.kummer_1f1(p, u + 1.0, half_lam, _KUMMER_CONTROL, log=True)
    pieces = (log_c0, l * log_a_const, lg_p, -lg_l, -(p - 1.0) * log_gbar, log_f)
    log_mag = math.fsum(pieces)
    weight = sum(abs(x) for x in pieces) + 8.0
    return log_mag, weight


def avg_pd_weibull_series(cfg, ch, ctrl=DEFAULT_CONTROL):
    """Average detection probability from the closed-form alternating series.

    ``est_error`` is the magnitude of the first omitted term, a heuristic
    rather than a bound. Raises :class:`ConvergenceError` when the sum runs
    into ``ctrl.max_terms``, when cancellation between terms would push the
    estimated rounding error above ``ctrl.rounding_budget``, or when the
    terms turn around and grow again before the tolerance is met (the series
    is only asymptotic for ``a > 2``).
    """
    if ctrl.max_terms < 10:
        raise DomainError("avg_pd_weibull_series needs ctrl.max_terms >= 10")
    u = cfg.u
    lam = cfg.threshold
    a = ch.a
    half_lam = 0.5 * lam

    head = _zero_snr_sum(u, lam)
    log_c0 = u * math.log(lam) - math.lgamma(u + 1.0) - u * math.log(2.0) - half_lam
    log_a_const = math.log(weibull_constant_A(a))
    log_gbar = math.log(ch.gamma_bar)
    log_budget = math.log(ctrl.rounding_budget)

    terms = [head]
    rounding = head * _EPS
    max_mag = 0.0
    prev_mag = math.inf
    decreasing = False
    small = 0

    def failure(reason, l):
        return ConvergenceError(
            f"Weibull detection series: {reason}",
            terms=l, largest_term=max_mag, rounding_error=rounding,
            partial_sum=math.fsum(terms),
        )

    for l in range(ctrl.max_terms):
        log_mag, weight = _series_term(l, log_c0, log_a_const, log_gbar, a, u, half_lam)
        if log_mag + math.log(_EPS * weight) > log_budget:
            raise failure("cancellation exceeds the rounding budget", l)
        if log_mag > _LOG_MAX:
            raise failure("term overflows double precision", l)
        mag = math.exp(log_mag)
        if decreasing and mag > prev_mag:
            raise failure("terms grow again before converging (asymptotic series)", l)
        if l > 0 and mag < prev_mag:
            decreasing = True
        max_mag = max(max_mag, mag)
        rounding += mag * _EPS * weight
        if rounding > ctrl.rounding_budget:
            raise failure("cancellation exceeds the rounding budget", l)
        terms.append(-mag if l % 2 else mag)
        prev_mag = mag

        partial = math.fsum(terms)
        if decreasing and mag <= ctrl.rel_tol * abs(partial):
            small += 1
            if small >= ctrl.consecutive_small:
                next_mag = math.exp(
                    _series_term(l + 1, log_c0, log_a_const, log_gbar, a, u, half_lam)[0]
                )
                return AvgPdResult(
                    value=clamp_probability(partial),
                    terms_used=l + 1,
                    method="series",
                    est_error=next_mag,
                )
        else:
            small = 0
    raise failure("max_terms reached", ctrl.max_terms)


def avg_pd_weibull_quadrature(cfg, ch, abs_tol=1e-10):
    """Average detection probability by adaptive numerical integration.

    The substitution ``gamma = scale * t ** (2/a)`` turns the Weibull SNR
    density into the weight ``exp(-t)``, so the integrand
    ``Q_u(sqrt(2 gamma), sqrt(threshold)) * exp(-t)`` is bounded for every
    ``a``. For ``a > 2`` a second substitution ``t = v ** (a/2)`` removes the
    fractional power at the origin. The range is cut where ``exp(-t)`` drops
    below ``abs_tol / 10``; the tail beyond is approximated by
    ``Q(T) * exp(-T)``.
    """
    if not abs_tol > 0.0:
        raise DomainError(f"abs_tol must be positive, got {abs_tol!r}")
    u = cfg.u
    beta = math.sqrt(cfg.threshold)
    scale = snr_scale(ch)
    k = max(1.0, 0.5 * ch.a)
    power = 2.0 * k / ch.a  # gamma = scale * v ** power
    t_max = math.log(10.0 / abs_tol)
    v_max = t_max ** (1.0 / k)
    evals = 0

    def q_of_v(v):
        nonlocal evals
        evals += 1
        if evals > _MAX_QUAD_EVALS:
            raise ConvergenceError("quadrature evaluation budget exhausted", evals=evals)
        return specfun.marcum_q(u, math.sqrt(2.0 * scale * v**power), beta)

    def integrand(v):
        t = v**k
        return q_of_v(v) * math.exp(-t) * k * v ** (k - 1.0)

    # detection probability switches on around gamma ~ threshold / 2
    v_mid = (0.5 * cfg.threshold / scale) ** (1.0 / power)
    points = [v_mid] if 0.0 < v_mid < v_max else None
    value, abserr, info = integrate.quad(
        integrand, 0.0, v_max, epsabs=0.5 * abs_tol, epsrel=0.0, limit=2000,
        points=points, full_output=True,
    )[:3]
    if abserr > abs_tol:
        raise ConvergenceError(
            "adaptive quadrature did not reach abs_tol", abserr=abserr, evals=info["neval"]
        )
    tail = q_of_v(v_max) * math.exp(-t_max)
    return AvgPdResult(
        value=clamp_probability(value + tail),
        terms_used=int(info["neval"]),
        method="quadrature",
        est_error=abserr + math.exp(-t_max),
    )


def avg_pd(cfg, ch, ctrl=DEFAULT_CONTROL, method="auto", abs_tol=1e-10):
    """Average detection probability, series first with quadrature fallback.

    ``method`` may force ``"series"`` or ``"quadrature"``.
    """
    if method == "series":
        return avg_pd_weibull_series(cfg, ch, ctrl)
    if method == "quadrature":
        return avg_pd_weibull_quadrature(cfg, ch, abs_tol)
    if method != "auto":
        raise DomainError(f"unknown method {method!r}")
    try:
        return avg_pd_weibull_series(cfg, ch, ctrl)
    except ConvergenceError:
        return avg_pd_weibull_quadrature(cfg, ch, abs_tol)
