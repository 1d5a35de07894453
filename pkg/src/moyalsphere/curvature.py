"""Closed-form scalar curvature of the 2D and 4D Moyal spheres.

The spheres carry the conformal factor ``h = (r**2 + A**2) / (2 A**2)``, whose
curvature is diagonal in the matrix basis. Coefficients are given per level:
``m`` in 2D and ``k = m + n`` in 4D. The functions ``eta`` and
``lambda_big`` are the order-theta**2 profiles obtained by replacing star
inverses with ordinary ones, normalized so that 1 is the classical sphere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .diag_series import DiagSeries
from .errors import ParameterWindowError, PoleError
from .params import SphereParams


@dataclass(frozen=True)
class CurvatureSeries:
    """Scalar-curvature coefficients ``S(k)`` on the diagonal basis."""

    params: SphereParams
    rule: Callable

    def coeff(self, k):
        scalar = np.ndim(k) == 0
        out = np.asarray(self.rule(np.asarray(k, dtype=float)), dtype=float)
        return float(out) if scalar else out

    __call__ = coeff

    @property
    def classical(self) -> float:
        n = self.params.dim
        return n * (n - 1) / self.params.A ** 2

    def as_diag_series(self, trunc=4096) -> DiagSeries:
        return DiagSeries.from_rule(self.rule, self.params.theta_eff, self.params.half_dim, trunc)


def _require(params: SphereParams, half_dim: int):
    if params.half_dim != half_dim:
        raise ParameterWindowError(f"expected half_dim={half_dim}, got {params.half_dim}")


def s2_coeffs(params: SphereParams) -> CurvatureSeries:
    """2D Moyal sphere:
    ``2/A^2 - 2t(A^2+t)/(A^4 (2tm+A^2+3t)) + 2t(A^2-t)/(A^4 (2tm+A^2-t))``, ``t = theta``.
    """
    _require(params, 1)
    A2, t = params.A ** 2, params.theta_eff

    def rule(m):
        return (
            2.0 / A2
            - 2 * t * (A2 + t) / (A2 * A2 * (2 * t * m + A2 + 3 * t))
            + 2 * t * (A2 - t) / (A2 * A2 * (2 * t * m + A2 - t))
        )

    return CurvatureSeries(params, rule)


def s4_coeffs(params: SphereParams) -> CurvatureSeries:
    """4D Moyal sphere at level ``k = m + n``:
    ``12/A^2 + 6t/(A^2 (A^2 + 2tk)) - 6t/(A^2 (A^2 + 4t + 2tk))``.
    """
    _require(params, 2)
    A2, t = params.A ** 2, params.theta_eff

    def rule(k):
        return 12.0 / A2 + 6 * t / (A2 * (A2 + 2 * t * k)) - 6 * t / (A2 * (A2 + 4 * t + 2 * t * k))

    return CurvatureSeries(params, rule)


def sphere_phi(params: SphereParams, exact=False):
    """Per-plane coefficient ``(4 t m + 2 t + A^2) / (4 A^2)`` of the 4D conformal factor.

    With ``exact=True`` the coefficients are :class:`fractions.Fraction` built
    from the binary values of ``A`` and ``theta``.
    """
    A2, t = params.A ** 2, params.theta_eff
    if exact:
        A2, t = Fraction(params.A) ** 2, Fraction(t)
    return lambda m: (4 * t * m + 2 * t + A2) / (4 * A2)


def s4_coeff_exact(params: SphereParams, k) -> Fraction:
    """:func:`s4_coeffs` at one level in rational arithmetic."""
    A2, t = Fraction(params.A) ** 2, Fraction(params.theta_eff)
    return 12 / A2 + 6 * t / (A2 * (A2 + 2 * t * k)) - 6 * t / (A2 * (A2 + 4 * t + 2 * t * k))


def s4_separable_oracle(phi, psi, params: SphereParams, exact=False):
    """Curvature coefficient at ``(m, n)`` for ``h = sum (phi_m + psi_n) f_mm g_nn``.

    Evaluates the unreduced double-sum expression term by term, with
    ``phi(-1)`` and ``psi(-1)`` entering only through factors that vanish.
    Returns a function ``(m, n) -> S(m, n)``. The expression cancels its
    leading parts against each other (relative error grows like ``m + n`` in
    floating point); with ``exact=True`` and rational ``phi``/``psi`` the
    result is an exact :class:`fractions.Fraction`.
    """
    t = Fraction(params.theta_eff) if exact else params.theta_eff
    six = 6 if exact else 6.0

    def one_plane(a, b, m, n):
        # a: the plane being differentiated, b: the spectator plane
        am, am1, ap1 = a(m), a(m - 1) if m > 0 else 0, a(m + 1)
        s = a(m) + b(n)
        if s == 0:
            raise ZeroDivisionError(f"phi+psi vanishes at ({m}, {n})")
        # -(4m+2) a_m + 2m a_{m-1} + 2(m+1) a_{m+1}, grouped to avoid cancellation
        lap = 2 * (m + 1) * (ap1 - am) - 2 * m * (am - am1)
        grad = (m + 1) * (ap1 - am) ** 2 * (1 / s + 1 / (ap1 + b(n)))
        if m > 0:
            grad += m * (am - am1) ** 2 * (1 / s + 1 / (am1 + b(n)))
        return (six / t) * s * (lap - grad)

    def value(m, n):
        m, n = int(m), int(n)
        return one_plane(phi, psi, m, n) + one_plane(psi, phi, n, m)

    return value


def eta(r, lam, theta):
    """2D profile ``1 - (lam+1)/(lam (r^2/t + lam + 2)) + (lam-1)/(lam (r^2/t + lam - 2))``.

    Raises :class:`PoleError` where ``r^2/theta + lam - 2 == 0``.
    """
    r = np.asarray(r, dtype=float)
    x = r * r / theta
    d_plus, d_minus = x + lam + 2, x + lam - 2
    if np.any(d_minus == 0) or np.any(d_plus == 0):
        raise PoleError("eta evaluated on its pole r^2/theta + lam - 2 = 0")
    out = 1 - (lam + 1) / (lam * d_plus) + (lam - 1) / (lam * d_minus)
    return float(out) if out.ndim == 0 else out


def lambda_big(r, lam, theta):
    """4D profile ``1 + t/(2(r^2 + lam t - 2t)) - t/(2(r^2 + lam t + 2t))``."""
    r = np.asarray(r, dtype=float)
    r2 = r * r
    d_minus, d_plus = r2 + lam * theta - 2 * theta, r2 + lam * theta + 2 * theta
    if np.any(d_minus == 0) or np.any(d_plus == 0):
        raise PoleError("Lambda evaluated on its pole r^2 + (lam - 2) theta = 0")
    out = 1 + theta / (2 * d_minus) - theta / (2 * d_plus)
    return float(out) if out.ndim == 0 else out


def nearest_level(r, theta, half_dim):
    """Level whose ``r**2`` coefficient ``theta (2k + M)`` is closest to ``r**2``."""
    r = np.asarray(r, dtype=float)
    k = np.rint((r * r / theta - half_dim) / 2.0)
    return np.maximum(k, 0).astype(int)
