"""Areas of 2M-dimensional Moyal spheres.

The area is the classical one, ``2 pi^(M+1/2) A^(2M) / Gamma(M+1/2)``, times a
dimensionless factor of ``lam = A^2 / theta``:

    gamma_M(lam) = 2^(M-1) lam^M Gamma(M+1/2) / sqrt(pi)
                   * sum_{k>=0} C(k+M-1, M-1) / (k + lam/2 + M/2)^(2M).

``gamma_M`` rises from 0 (``lam -> 0``) to 1 (``lam -> infinity``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ParameterWindowError, ToleranceNotReached
from .params import SphereParams
from .special import _BERNOULLI_EVEN, gamma_half_integer, polygamma

__all__ = [
    "AreaResult",
    "classical_area",
    "deformed_area",
    "gamma1_closed",
    "gamma2_closed",
    "gamma_m_series",
    "polygamma",
    "sphere_area",
]

# Euler-Maclaurin correction terms used for the tail (B_2 .. B_10)
_EM_TERMS = 5
_K_MAX = 1 << 22


def _prefactor(M, lam):
    return 2.0 ** (M - 1) * lam ** M * gamma_half_integer(M) / math.sqrt(math.pi)


def _numerator_poly(M, a):
    """``C(k+M-1, M-1)`` as a polynomial in ``x = k + a`` (ascending coefficients)."""
    c = np.array([1.0])
    for j in range(1, M):
        c = P.polymul(c, [j - a, 1.0])
    return c / math.factorial(M - 1)


def _monomial_tail(c, s0, x0):
    """Euler-Maclaurin tail ``sum_{k>=0} f(x0 + k)`` for ``f(x) = sum_j c_j x^(j - s0)``.

    Returns ``(tail, err)`` where ``err`` is the size of the first omitted term.
    """
    integral = 0.0
    half = 0.0
    corr = [0.0] * (_EM_TERMS + 1)
    for j, cj in enumerate(c):
        s = s0 - j  # f contains cj * x^-s with s >= 2
        integral += cj * x0 ** (1 - s) / (s - 1)
        half += cj * x0 ** -s / 2
        for i in range(1, _EM_TERMS + 2):
            # d^(2i-1)/dx^(2i-1) x^-s = -s (s+1) ... (s+2i-2) x^-(s+2i-1)
            rising = math.prod(range(s, s + 2 * i - 1))
            corr[i - 1] += cj * -rising * x0 ** -(s + 2 * i - 1)
    tail = integral + half
    for i in range(1, _EM_TERMS + 1):
        tail -= _BERNOULLI_EVEN[i - 1] / math.factorial(2 * i) * corr[i - 1]
    err = abs(_BERNOULLI_EVEN[_EM_TERMS] / math.factorial(2 * _EM_TERMS + 2) * corr[_EM_TERMS])
    return tail, err


def gamma_m_series(M: int, lam: float, tol: float = 1e-13) -> float:
    """``gamma_M(lam)`` from its defining series.

    The first ``K`` terms are summed directly and the rest by Euler-Maclaurin
    in the variable ``x = k + lam/2 + M/2``. ``K`` starts at ``max(64, 2x)``
    (so that the polynomial form of the tail does not cancel) and doubles
    until the omitted Euler-Maclaurin term, scaled by the prefactor, is below
    ``tol``.

    Raises
    ------
    ToleranceNotReached
        ``tol`` not met with ``K <= 2**22``.
    """
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    if not (lam > 0 and math.isfinite(lam)):
        raise ValueError(f"lam must be positive and finite, got {lam}")
    M = int(M)
    a = lam / 2 + M / 2
    pref = _prefactor(M, lam)
    c = _numerator_poly(M, a)
    K = max(64, 2 * math.ceil(a))
    while K <= _K_MAX:
        k = np.arange(K, dtype=float)
        x = k + a
        ratio = np.ones_like(x)
        for j in range(1, M):
            ratio *= (k + j) / x
        terms = ratio * x ** -(M + 1) / math.factorial(M - 1)
        head = math.fsum(terms)
        tail, err = _monomial_tail(c, 2 * M, K + a)
        if pref * err <= tol:
            return pref * (head + tail)
        K *= 2
    raise ToleranceNotReached(f"gamma_{M}({lam}) did not reach tol={tol}")


def gamma1_closed(lam):
    """``(lam/2) psi'((lam+1)/2)``."""
    lam = np.asarray(lam, dtype=float)
    return lam / 2 * polygamma(1, (lam + 1) / 2)


def gamma2_closed(lam):
    """``(lam^2/8) [-6 psi''(1+lam/2) - lam psi'''(1+lam/2)]``."""
    lam = np.asarray(lam, dtype=float)
    x = 1 + lam / 2
    return lam * lam / 8 * (-6 * polygamma(2, x) - lam * polygamma(3, x))


_CLOSED = {1: gamma1_closed, 2: gamma2_closed}


def classical_area(M: int, A: float) -> float:
    """Area ``2 pi^(M+1/2) A^(2M) / Gamma(M+1/2)`` of the round ``2M``-sphere of radius ``A``."""
    return 2 * math.pi ** (M + 0.5) * A ** (2 * M) / gamma_half_integer(M)


@dataclass(frozen=True)
class AreaResult:
    area: float
    gamma_factor: float
    classical_area: float
    lam: float
    series_check: float = float("nan")  # |closed - series| when both were computed


def sphere_area(params: SphereParams, tol: float = 1e-13, cross_check: float = 1e-10) -> AreaResult:
    """Area of the Moyal sphere of radius ``params.A`` in ``2 * params.half_dim`` dimensions.

    For ``M <= 2`` the polygamma closed form is used and compared with the
    series; a disagreement above ``cross_check`` raises ``ToleranceNotReached``.
    Larger ``M`` uses the series alone.
    """
    if not params.in_window and not params.allow_out_of_window:
        raise ParameterWindowError(f"theta={params.theta_eff} outside (0, A^2/2)")
    M, lam = params.half_dim, params.lam
    series = gamma_m_series(M, lam, tol)
    if M in _CLOSED:
        g = float(_CLOSED[M](lam))
        diff = float(abs(g - series))
        if diff > cross_check:
            raise ToleranceNotReached(f"closed form and series differ by {diff:.3e} at lam={lam}")
    else:
        g, diff = series, float("nan")
    ca = classical_area(M, params.A)
    return AreaResult(ca * g, g, ca, lam, diff)


def deformed_area(n: int, A: float, theta: float, mu: float, **kw) -> AreaResult:
    """Area of the ``4n``-dimensional deformed sphere.

    The deformed product depends on ``(theta, mu)`` only through
    ``theta' = hypot(theta, mu)``, so this is ``sphere_area`` with
    ``M = 2n`` and ``theta = theta'``.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    allow = kw.pop("allow_out_of_window", False)
    p = SphereParams(A, math.hypot(theta, mu), 0.0, 2 * int(n), allow)
    return sphere_area(p, **kw)
