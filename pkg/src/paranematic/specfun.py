"""Special functions for screened two-dimensional exterior fields.

All functions are pure, real-valued and safe to call from multiple threads.
Modified Bessel functions of the second kind enter only through
exponentially scaled values, so ratios at arguments of order 1/eps^2
(eps down to 0.1 and below) never underflow.
"""

import math

from scipy.special import kve as _kve

MAX_BESSEL_ORDER = 64
POLYLOG_X_MAX = 0.999

# Truncation control for the series below. Terms are positive and
# eventually decay geometrically, so a relative floor is enough.
_SERIES_RTOL = 1e-17
_SERIES_MAX_TERMS = 400_000


def _check_order(m, allow_negative=False):
    if m != int(m):
        raise ValueError(f"Bessel order must be an integer, got {m!r}")
    m = int(m)
    if allow_negative:
        m = abs(m)
    elif m < 0:
        raise ValueError(f"Bessel order must be >= 0, got {m}")
    if m > MAX_BESSEL_ORDER:
        raise ValueError(f"Bessel order {m} exceeds supported maximum {MAX_BESSEL_ORDER}")
    return m


def bessel_k_scaled(m: int, t: float) -> float:
    """Exponentially scaled modified Bessel function e^t K_m(t).

    Parameters
    ----------
    m : int
        Order, 0 <= m <= 64.
    t : float
        Positive argument. Stable up to t = 1e4 and beyond; for very
        small t at high order the unscaled value exceeds the double
        range and the result is inf.

    Returns
    -------
    float
        e^t K_m(t), relative accuracy ~1e-13.
    """
    m = _check_order(m)
    if not t > 0.0:
        raise ValueError(f"bessel_k_scaled needs t > 0, got {t}")
    return float(_kve(m, t))


def bessel_ratio(m: int, t: float, R: float) -> float:
    """Ratio K_m(t)/K_m(R), evaluated in scaled form.

    Computed as (e^t K_m(t))/(e^R K_m(R)) * e^{-(t-R)} so that only the
    explicit exponential carries the decay. For t - R > ~745 the true
    ratio is below the double floor and 0.0 is returned. Negative
    orders are folded with K_{-m} = K_m.
    """
    m = _check_order(m, allow_negative=True)
    if not (t > 0.0 and R > 0.0):
        raise ValueError(f"bessel_ratio needs positive arguments, got t={t}, R={R}")
    if t == R:
        return 1.0
    delta = t - R
    if delta > 745.0:
        return 0.0
    return float(_kve(m, t)) / float(_kve(m, R)) * math.exp(-delta)


def erfc(x: float) -> float:
    """Complementary error function, erfc(x) = 1 - erf(x)."""
    return math.erfc(x)


def polylog_half(x: float) -> float:
    """Polylogarithm of order 1/2, Li_{1/2}(x) = sum_{n>=1} x^n / sqrt(n).

    The series is summed directly with exact accumulation (math.fsum).
    The domain is capped at POLYLOG_X_MAX = 0.999: closer to 1 the
    series needs a singular-part split that nothing downstream requires
    (the energy formulas evaluate it at e^{-4b} <= e^{-2}).
    """
    if not 0.0 <= x <= POLYLOG_X_MAX:
        raise ValueError(f"polylog_half defined on [0, {POLYLOG_X_MAX}], got {x}")
    if x == 0.0:
        return 0.0
    terms = []
    power = 1.0
    for n in range(1, _SERIES_MAX_TERMS + 1):
        power *= x
        term = power / math.sqrt(n)
        terms.append(term)
        # geometric tail bound: remainder < term * x / (1 - x)
        if term * x / (1.0 - x) < _SERIES_RTOL * terms[0]:
            break
    return math.fsum(terms)


def theta_k(k: int, x: float) -> float:
    """Theta series of index k.

    Defined by the even integral
        Theta_k(x) = sqrt(2/pi) * Int_{-inf}^{inf} x^k e^{-k t^2}
                                     / (1 - x^2 e^{-2 t^2}) dt
    and evaluated here through its exact series form
        Theta_k(x) = sqrt(2) * sum_{n>=0} x^{k+2n} / sqrt(k+2n),
    obtained by geometric expansion of the integrand (each term is a
    Gaussian integral). Satisfies Theta_2(x) = Li_{1/2}(x^2) and
    Theta_k(x)/x^k -> sqrt(2/k) as x -> 0.
    """
    if k != int(k) or int(k) < 1:
        raise ValueError(f"theta_k needs an integer index k >= 1, got {k!r}")
    k = int(k)
    if not 0.0 < x < 1.0:
        raise ValueError(f"theta_k defined on 0 < x < 1, got {x}")
    terms = []
    xsq = x * x
    power = x ** k
    for n in range(_SERIES_MAX_TERMS):
        q = k + 2 * n
        term = power / math.sqrt(q)
        terms.append(term)
        if term * xsq / (1.0 - xsq) < _SERIES_RTOL * terms[0]:
            break
        power *= xsq
    return math.sqrt(2.0) * math.fsum(terms)


def interaction_coefficient(k: int) -> int:
    """Mode-coupling coefficient c_k = 2 cos(k pi / 2), exactly.

    Couples boundary Fourier modes m and n with k = m + n in the
    cross-particle energy blocks. Integer-valued, period 4, even in k.
    """
    if k != int(k):
        raise ValueError(f"interaction_coefficient needs an integer, got {k!r}")
    return (2, 0, -2, 0)[int(k) % 4]
