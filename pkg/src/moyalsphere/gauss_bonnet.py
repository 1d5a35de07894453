"""Total curvature of the 2D Moyal sphere, three ways.

The integrand ``S * h^-2`` is diagonal with level terms

    t(m) = 8 (2 t A^2 m + A^4 - 2 t^2 + t A^2)
           / ((2tm + A^2 + t) (2tm + A^2 - t) (2tm + A^2 + 3t)),

and the integral is ``2 pi theta sum_m t(m)``. With ``B_m = 1/(2 m t + A^2 - t)``
each term splits as ``(theta/2) t(m) = (A^2-t) B_m + 2t B_{m+1} - (A^2+t) B_{m+2}``,
which telescopes to ``4 pi [(A^2-t) B_0 + (A^2+t) B_1] = 8 pi``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterWindowError
from .params import SphereParams

EIGHT_PI = 8.0 * math.pi


class NearSingularWarning(RuntimeWarning):
    """Parameters sit close to the edge of the allowed theta window."""


def _check(params: SphereParams):
    if params.half_dim != 1:
        raise ParameterWindowError("Gauss-Bonnet integral is implemented for the 2D sphere only")
    if not params.in_window and not params.allow_out_of_window:
        raise ParameterWindowError(f"theta={params.theta} outside (0, A^2/2)")


def b_level(params: SphereParams, m):
    """``B_m = 1 / (2 m theta + A^2 - theta)``."""
    t, A2 = params.theta_eff, params.A ** 2
    return 1.0 / (2 * np.asarray(m, dtype=float) * t + A2 - t)


def gb_summand(params: SphereParams, m):
    """Level term ``t(m)`` of the curvature integrand (without the ``2 pi theta``)."""
    t, A2 = params.theta_eff, params.A ** 2
    m = np.asarray(m, dtype=float)
    u = 2 * t * m + A2
    return 8 * (2 * t * A2 * m + A2 * A2 - 2 * t * t + t * A2) / ((u + t) * (u - t) * (u + 3 * t))


@dataclass(frozen=True)
class GBTerm:
    m: int
    value: float
    B: float

    def partial_fraction(self, params: SphereParams) -> float:
        """``(2/theta) [(A^2-t) B_m + 2t B_{m+1} - (A^2+t) B_{m+2}]``; equals ``value``."""
        t, A2 = params.theta_eff, params.A ** 2
        b0, b1, b2 = (float(b_level(params, self.m + j)) for j in range(3))
        return (2.0 / t) * ((A2 - t) * b0 + 2 * t * b1 - (A2 + t) * b2)


def gb_term(params: SphereParams, m: int) -> GBTerm:
    return GBTerm(int(m), float(gb_summand(params, m)), float(b_level(params, m)))


@dataclass(frozen=True)
class GBResult:
    """Truncated direct sum with a bracketed tail.

    ``partial`` is ``2 pi theta sum_{m<N} t(m)``. The tail ``sum_{m>=N}`` lies in
    ``[tail_low, tail_high]``. ``value`` is the midpoint estimate
    ``partial + (tail_low + tail_high)/2`` and ``tail_bound`` its half-width,
    so ``|value - exact| <= tail_bound``.
    """

    n_terms: int
    partial: float
    tail_low: float
    tail_high: float

    @property
    def value(self) -> float:
        return self.partial + 0.5 * (self.tail_low + self.tail_high)

    @property
    def tail_bound(self) -> float:
        return 0.5 * (self.tail_high - self.tail_low)

    def brackets(self, x) -> bool:
        return self.partial + self.tail_low <= x <= self.partial + self.tail_high


def _compensated_sum(x):
    # exactly rounded sum in the given (ascending-m) order
    return math.fsum(x)


def gb_direct(params: SphereParams, n_terms: int) -> GBResult:
    """Direct level sum of the curvature integral with an integral-comparison tail.

    For ``m >= 1`` the scaled term ``m^2 t(m)`` rises monotonically to
    ``c_inf = 2 A^2 / theta^2``. The last computed term fixes the lower
    constant ``c_lo = (N-1)^2 t(N-1)``, so for ``m >= N``
    ``c_lo / m^2 <= t(m) <= c_inf / m^2``, and integral comparison gives
    ``c_lo / N <= tail <= c_inf / (N - 1)``.
    """
    _check(params)
    if n_terms < 0:
        raise ValueError("n_terms must be nonnegative")
    t, A = params.theta_eff, params.A
    scale = 2 * math.pi * t
    c_inf = 2 * A * A / (t * t)
    m = np.arange(n_terms)
    partial = scale * _compensated_sum(gb_summand(params, m)) if n_terms else 0.0
    if n_terms >= 2:
        last = n_terms - 1
        c_lo = min(last * last * float(gb_summand(params, last)), c_inf)
        low = c_lo / n_terms
        high = c_inf / (n_terms - 1)
    else:
        # t(0) explicitly, then sum_{m>=1} c/m^2 <= c (1 + 1) for the rest
        head = float(gb_summand(params, 0)) if n_terms == 0 else 0.0
        low = head
        high = head + 2.0 * c_inf
    return GBResult(n_terms, partial, scale * low, scale * high)


def gb_telescoped(params: SphereParams, m: int) -> float:
    """Partial sum over levels ``0..m`` in telescoped form:
    ``4 pi [(A^2-t)(B_0 - B_{m+1}) + (A^2+t)(B_1 - B_{m+2})]``.
    """
    _check(params)
    t, A2 = params.theta_eff, params.A ** 2
    b = lambda j: float(b_level(params, j))
    return 4 * math.pi * ((A2 - t) * (b(0) - b(m + 1)) + (A2 + t) * (b(1) - b(m + 2)))


def gb_limit(params: SphereParams, near_tol=1e-3) -> float:
    """``4 pi [(A^2 - t) B_0 + (A^2 + t) B_1]``, which is ``8 pi`` for every admissible theta.

    Warns with :class:`NearSingularWarning` when theta is within a relative
    ``near_tol`` of the window edge ``A^2/2``.
    """
    _check(params)
    t, A2 = params.theta_eff, params.A ** 2
    if abs(t - A2 / 2) <= near_tol * A2 / 2:
        warnings.warn(f"theta={t} is near the window edge A^2/2={A2 / 2}", NearSingularWarning)
    return 4 * math.pi * ((A2 - t) / (A2 - t) + (A2 + t) / (A2 + t))
