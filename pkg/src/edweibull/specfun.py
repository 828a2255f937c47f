"""Special functions needed by the energy-detector formulas.

Everything here is scalar, pure Python and dependency-free apart from
``math`` (and ``scipy.optimize.brentq`` for the incomplete-gamma inverse).
Accuracy targets:

==========================  ==================================
``log_gamma``               exp(result) relative error <= 1e-13
``reg_upper_gamma``         absolute error <= 1e-12
``inv_reg_upper_gamma``     round trip ``|dq|`` <= 1e-12
``bessel_i_scaled``         relative error <= 1e-12, x <= 700
``marcum_q``                absolute error <= 1e-10
``kummer_1f1``              relative error <= 1e-10
==========================  ==================================
"""

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import AccuracyError, ConvergenceError, DomainError

__all__ = [
    "SeriesControl",
    "log_gamma",
    "reg_upper_gamma",
    "inv_reg_upper_gamma",
    "bessel_i_scaled",
    "marcum_q",
    "kummer_1f1",
    "pochhammer_log",
    "clamp_probability",
]

_EPS = 2.0**-52
_TINY = 1e-300
_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the infinite series in this package.

    A series stops once ``consecutive_small`` successive terms are below
    ``rel_tol`` times the running sum. ``rounding_budget`` is the largest
    estimated absolute rounding error an alternating sum may accumulate
    before it is declared numerically meaningless.
    """

    rel_tol: float = 1e-12
    max_terms: int = 10000
    consecutive_small: int = 3
    rounding_budget: float = 1e-10

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise DomainError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise DomainError(f"max_terms must be a positive integer, got {self.max_terms!r}")
        if int(self.consecutive_small) != self.consecutive_small or self.consecutive_small < 1:
            raise DomainError(
                f"consecutive_small must be a positive integer, got {self.consecutive_small!r}"
            )
        if not self.rounding_budget > 0.0:
            raise DomainError(f"rounding_budget must be positive, got {self.rounding_budget!r}")


DEFAULT_CONTROL = SeriesControl()
# incomplete gamma is cheap, so it always runs to machine precision
_GAMMA_CONTROL = SeriesControl(rel_tol=_EPS / 4, max_terms=100000, consecutive_small=1)


def _check_finite(name, value):
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


def _check_int(name, value, minimum):
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def clamp_probability(value, slack=1e-9):
    """Clamp ``value`` to [0, 1], refusing excursions larger than ``slack``."""
    if math.isnan(value) or value < -slack or value > 1.0 + slack:
        raise AccuracyError(f"probability {value!r} is outside [0, 1] beyond rounding slack")
    return min(1.0, max(0.0, value))


def log_gamma(x):
    """Natural log of the Euler gamma function for ``x > 0``."""
    _check_finite("x", x)
    if x <= 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    # lgamma drifts to ~3 ulp for large x; log of the (finite) gamma value
    # keeps exp(result) within rounding of the true gamma
    if 2.0 < x <= 171.0:
        return math.log(math.gamma(x))
    return math.lgamma(x)


_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _log1pmx(t):
    """``log(1 + t) - t`` without cancellation for small ``|t|``."""
    if abs(t) > 0.25:
        return math.log1p(t) - t
    total = 0.0
    power = t
    for k in range(2, 200):
        power *= -t
        term = power / k
        total += term
        if abs(term) <= _EPS * abs(total):
            break
    return total


def _stirling_tail(u):
    """``lgamma(u + 1) - [(u + 1/2) ln u - u + ln(2 pi)/2]`` for u >= 20."""
    r = 1.0 / u
    r2 = r * r
    return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 * (1.0 / 1680 - r2 / 1188))))


def _log_gamma_kernel(u, x):
    """``ln[x^u e^{-x} / Gamma(u + 1)]``, accurate for large u near x = u."""
    if u < 20.0:
        return u * math.log(x) - x - math.lgamma(u + 1.0)
    t = (x - u) / u
    if t < -0.5:
        # log1p(t) loses x entirely once x / u drops below eps
        core = u * (math.log(x) - math.log(u)) - (x - u)
    else:
        core = u * _log1pmx(t)
    return core - 0.5 * math.log(u) - _HALF_LOG_2PI - _stirling_tail(u)


def _gamma_pq(u, x):
    """Return the regularized pair (P(u, x), Q(u, x)).

    The series branch (x < u + 1) computes P directly and the continued
    fraction branch computes Q directly, so whichever of the two is small is
    accurate in a relative sense.
    """
    if x == 0.0:
        return 0.0, 1.0
    ctrl = _GAMMA_CONTROL
    log_kernel = _log_gamma_kernel(u, x)
    if x < u + 1.0:
        log_pref = log_kernel
        if log_pref < -745.0:
            return 0.0, 1.0
        term = 1.0
        total = 1.0
        ap = u
        for _ in range(ctrl.max_terms):
            ap += 1.0
            term *= x / ap
            total += term
            if term < total * ctrl.rel_tol:
                p = total * math.exp(log_pref)
                p = min(p, 1.0)
                return p, 1.0 - p
        raise ConvergenceError(
            "incomplete gamma series did not converge", u=u, x=x, terms=ctrl.max_terms
        )

    # modified Lentz evaluation of the Legendre continued fraction
    log_pref = log_kernel + math.log(u)
    if log_pref < -745.0:
        return 1.0, 0.0
    b = x + 1.0 - u
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, ctrl.max_terms + 1):
        an = -i * (i - u)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < ctrl.rel_tol:
            q = min(h * math.exp(log_pref), 1.0)
            return 1.0 - q, q
    raise ConvergenceError(
        "incomplete gamma continued fraction did not converge", u=u, x=x, terms=ctrl.max_terms
    )


def reg_upper_gamma(u, x):
    """Regularized upper incomplete gamma ``Q(u, x) = Gamma(u, x) / Gamma(u)``.

    Series for ``x < u + 1``, continued fraction otherwise.
    """
    _check_finite("u", u)
    if u <= 0.0:
        raise DomainError(f"reg_upper_gamma requires u > 0, got {u!r}")
    if math.isnan(x) or x < 0.0:
        raise DomainError(f"reg_upper_gamma requires x >= 0, got {x!r}")
    if math.isinf(x):
        return 0.0
    return _gamma_pq(u, x)[1]


def inv_reg_upper_gamma(u, q):
    """Solve ``reg_upper_gamma(u, x) = q`` for ``x >= 0``.

    The root is bracketed by doubling and then refined with Brent's method
    (bisection safeguarded secant/inverse-quadratic steps).
    """
    _check_finite("u", u)
    if u <= 0.0:
        raise DomainError(f"inv_reg_upper_gamma requires u > 0, got {u!r}")
    if math.isnan(q) or not 0.0 < q <= 1.0:
        raise DomainError(f"inv_reg_upper_gamma requires 0 < q <= 1, got {q!r}")
    if q == 1.0:
        return 0.0

    def f(x):
        p, qx = _gamma_pq(u, x)
        # difference taken on the accurate side of the pair
        return qx - q if qx <= 0.5 else (1.0 - q) - p

    hi = u + 1.0
    while f(hi) > 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise ConvergenceError("could not bracket incomplete gamma inverse", u=u, q=q)
    return brentq(f, 0.0, hi, xtol=1e-300, rtol=4 * _EPS, maxiter=500)


def bessel_i_scaled(n, x):
    """Exponentially scaled modified Bessel function ``exp(-x) * I_n(x)``.

    Integer order only. Miller's backward recurrence, normalized with the
    generating-function identity ``exp(x) = I_0(x) + 2 * sum_k I_k(x)``.
    """
    n = _check_int("n", n, 0)
    _check_finite("x", x)
    if x < 0.0:
        raise DomainError(f"bessel_i_scaled requires x >= 0, got {x!r}")
    if x == 0.0:
        return 1.0 if n == 0 else 0.0

    # start far enough above both n and the width ~sqrt(x) of the order profile
    start = n + int(math.sqrt(80.0 * (x + 1.0))) + 30
    two_over_x = 2.0 / x
    i_next = 0.0
    i_cur = 1.0
    total = 2.0 * i_cur
    result = i_cur if start == n else 0.0
    for k in range(start, 0, -1):
        i_prev = i_next + k * two_over_x * i_cur
        i_next, i_cur = i_cur, i_prev
        if i_cur > _RESCALE:
            i_cur /= _RESCALE
            i_next /= _RESCALE
            total /= _RESCALE
            result /= _RESCALE
        if k - 1 == n:
            result = i_cur
        if k - 1 > 0:
            total += 2.0 * i_cur
    total += i_cur
    return result / total


def _log_poisson_pmf(k, mu):
    return k * math.log(mu) - mu - math.lgamma(k + 1.0)


def _poisson_lower_cut(mu, log_tol):
    """Largest k whose Chernoff bound on Pr(K < k) is below exp(log_tol)."""
    k = math.floor(mu)
    step = max(1, int(math.sqrt(mu)))
    while k > 0:
        t = k / mu
        if -mu * (t * math.log(t) - t + 1.0) <= log_tol:
            break
        k -= step
    return max(k, 0)


def marcum_q(u, alpha, beta, ctrl=DEFAULT_CONTROL):
    """Generalized Marcum Q-function ``Q_u(alpha, beta)`` for integer ``u``.

    Evaluated as the Poisson mixture

        Q_u(alpha, beta) = sum_k Pois(k; alpha^2/2) * Q(u + k, beta^2/2)

    summed over the window of k where the Poisson weights matter. When the
    incomplete-gamma factor is close to one the complementary sum
    ``1 - sum_k Pois(k) * P(u + k, beta^2/2)`` is used instead, which
    terminates as soon as P becomes negligible.
    """
    u = _check_int("u", u, 1)
    for name, v in (("alpha", alpha), ("beta", beta)):
        if math.isnan(v) or v < 0.0:
            raise DomainError(f"marcum_q requires {name} >= 0, got {v!r}")
    if math.isinf(beta):
        return 0.0
    if math.isinf(alpha):
        return 1.0
    x = 0.5 * beta * beta
    mu = 0.5 * alpha * alpha
    if x == 0.0:
        return 1.0
    if mu == 0.0:
        return reg_upper_gamma(u, x)

    tol = ctrl.rel_tol
    k = _poisson_lower_cut(mu, math.log(tol) - 7.0)
    p_k, q_k = _gamma_pq(u + k, x)
    complement = p_k <= 0.5
    if complement and p_k < tol * 1e-3:
        return 1.0

    total = 0.0
    small = 0
    for _ in range(ctrl.max_terms):
        w = math.exp(_log_poisson_pmf(k, mu))
        a = u + k
        d = math.exp(_log_gamma_kernel(a, x))
        if complement:
            total += w * p_k
            r = mu / (k + 1.0)
            tail = w * r / (1.0 - r) if r < 1.0 else math.inf
            done = p_k < tol or tail < tol
            p_k = max(p_k - d, 0.0)
        else:
            total += w * q_k
            r = mu / (k + 1.0)
            done = r < 1.0 and w * r / (1.0 - r) < tol
            q_k = min(q_k + d, 1.0)
        small = small + 1 if done else 0
        if small >= ctrl.consecutive_small:
            value = 1.0 - total if complement else total
            return clamp_probability(value)
        k += 1
    raise ConvergenceError(
        "Marcum Q Poisson series did not converge",
        u=u, alpha=alpha, beta=beta, terms=ctrl.max_terms,
    )


def _check_kummer_args(b_param, x):
    _check_finite("b_param", b_param)
    _check_finite("x", x)
    if b_param <= 0.0:
        raise DomainError(f"kummer_1f1 requires b > 0, got {b_param!r}")
    if x < 0.0:
        raise DomainError(f"kummer_1f1 requires x >= 0, got {x!r}")


def kummer_1f1(a_param, b_param, x, ctrl=DEFAULT_CONTROL, log=False):
    """Kummer's confluent hypergeometric function ``1F1(a; b; x)``.

    Forward term recursion ``t_{l+1} = t_l (a + l) x / ((b + l)(l + 1))``.
    With ``log=True`` (requires ``a > 0``) the natural log of the value is
    returned and the running sum is rescaled as it grows, so arguments whose
    value would overflow a double are fine.
    """
    _check_finite("a_param", a_param)
    _check_kummer_args(b_param, x)
    if log and a_param <= 0.0:
        raise DomainError("log-domain kummer_1f1 requires a > 0")
    if x == 0.0 or a_param == 0.0:
        return 0.0 if log else 1.0

    term = 1.0
    total = 1.0
    comp = 0.0
    log_scale = 0.0
    small = 0
    for ell in range(ctrl.max_terms):
        ratio = (a_param + ell) * x / ((b_param + ell) * (ell + 1.0))
        term *= ratio
        # Kahan-compensated accumulation
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(total) > _RESCALE:
            if not log:
                raise ConvergenceError(
                    "kummer_1f1 overflows; request log=True", a=a_param, b=b_param, x=x
                )
            total /= _RESCALE
            term /= _RESCALE
            comp /= _RESCALE
            log_scale += _LOG_RESCALE
        if term == 0.0:
            break
        if abs(ratio) < 1.0 and abs(term) <= ctrl.rel_tol * abs(total):
            small += 1
            if small >= ctrl.consecutive_small:
                break
        else:
            small = 0
    else:
        raise ConvergenceError(
            "kummer_1f1 series did not converge", a=a_param, b=b_param, x=x, terms=ctrl.max_terms
        )
    if log:
        return log_scale + math.log(total)
    return total


def pochhammer_log(a, n):
    """``ln (a)_n`` with ``(a)_n = Gamma(a + n) / Gamma(a)``."""
    _check_finite("a", a)
    if a <= 0.0:
        raise DomainError(f"pochhammer_log requires a > 0, got {a!r}")
    n = _check_int("n", n, 0)
    if n == 0:
        return 0.0
    return log_gamma(a + n) - log_gamma(a)
