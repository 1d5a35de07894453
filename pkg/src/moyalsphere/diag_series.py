"""Radial functions as diagonal matrix-basis series.

A radial function on the ``2M``-dimensional Moyal space is a sum
``sum_k a(k) F_k`` where ``F_k`` is the sum of the products
``f_{m1 m1} ... f_{mM mM}`` with ``m1 + ... + mM = k``. The star product of two
such functions multiplies the coefficients level by level, so the whole
algebra reduces to arithmetic on the coefficient sequence ``a``.

Coefficients are held either as a closed-form rule ``k -> a(k)`` (exact for
every level) or as a stored array (exact up to its length). Affine rules
``alpha * k + beta`` are tagged so that the Laplacian and the inverse can
reason about them symbolically. Only :func:`ds_integrate` and
:func:`ds_eval` truncate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import Divergent, ParameterMismatch, ToleranceNotReached, ZeroCoefficient
from .params import SphereParams
from .special import scaled_laguerre

DEFAULT_TRUNC = 4096


@dataclass(frozen=True)
class DiagSeries:
    """Coefficient sequence of a radial function in the diagonal matrix basis.

    Exactly one of ``rule`` and ``values`` is set. ``trunc`` is the number of
    levels that count as "stored": operations that need a window (the inverse
    check, integration, pointwise evaluation) look at ``k < trunc``.
    """

    theta: float
    half_dim: int = 1
    trunc: int = DEFAULT_TRUNC
    rule: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False, compare=False)
    values: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    affine: Optional[tuple] = None

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.trunc < 1:
            raise ValueError("trunc must be >= 1")
        if (self.rule is None) == (self.values is None):
            raise ValueError("exactly one of rule / values must be given")
        if self.values is not None:
            vals = np.asarray(self.values, dtype=float)
            if vals.ndim != 1 or len(vals) < self.trunc:
                raise ValueError("values must be 1-d with at least trunc entries")
            if not np.all(np.isfinite(vals[: self.trunc])):
                raise ValueError("coefficients must be finite")
            vals.setflags(write=False)
            object.__setattr__(self, "values", vals)

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_rule(cls, rule, theta, half_dim=1, trunc=DEFAULT_TRUNC):
        return cls(theta, half_dim, trunc, rule=rule)

    @classmethod
    def from_values(cls, values, theta, half_dim=1):
        values = np.asarray(values, dtype=float)
        return cls(theta, half_dim, len(values), values=values)

    @classmethod
    def affine_form(cls, alpha, beta, theta, half_dim=1, trunc=DEFAULT_TRUNC):
        """Series with ``a(k) = alpha * k + beta``."""
        alpha, beta = float(alpha), float(beta)
        return cls(theta, half_dim, trunc, rule=lambda k: alpha * k + beta, affine=(alpha, beta))

    @classmethod
    def unit(cls, theta, half_dim=1, trunc=DEFAULT_TRUNC):
        return cls.affine_form(0.0, 1.0, theta, half_dim, trunc)

    @classmethod
    def zero(cls, theta, half_dim=1, trunc=DEFAULT_TRUNC):
        return cls.affine_form(0.0, 0.0, theta, half_dim, trunc)

    # -- access ---------------------------------------------------------------

    @property
    def is_closed_form(self) -> bool:
        return self.rule is not None

    def coeff(self, k):
        """Coefficient(s) at integer level(s) ``k``."""
        scalar = np.ndim(k) == 0
        k = np.atleast_1d(np.asarray(k))
        if np.any(k < 0):
            raise IndexError("levels are nonnegative")
        if self.rule is not None:
            out = np.broadcast_to(np.asarray(self.rule(k.astype(float)), dtype=float), k.shape)
        else:
            if np.any(k >= len(self.values)):
                raise IndexError(f"level beyond stored window {len(self.values)}")
            out = self.values[k]
        return float(out[0]) if scalar else np.array(out)

    def window(self, n=None):
        """Coefficients for levels ``0 .. n-1`` (default ``trunc``)."""
        return self.coeff(np.arange(self.trunc if n is None else n))

    def __call__(self, k):
        return self.coeff(k)

    def _like(self, rule=None, values=None, affine=None, trunc=None):
        trunc = self.trunc if trunc is None else trunc
        if values is not None:
            return DiagSeries(self.theta, self.half_dim, trunc, values=values)
        return DiagSeries(self.theta, self.half_dim, trunc, rule=rule, affine=affine)


def _check_compatible(a: DiagSeries, b: DiagSeries):
    if a.theta != b.theta or a.half_dim != b.half_dim:
        raise ParameterMismatch(
            f"theta/half_dim differ: ({a.theta}, {a.half_dim}) vs ({b.theta}, {b.half_dim})"
        )


def ds_from_r2_affine(c2, c0, params: SphereParams, trunc=DEFAULT_TRUNC) -> DiagSeries:
    """Series of ``c2 * r**2 + c0``.

    In ``2M`` dimensions ``r**2`` has coefficient ``2*theta*k + M*theta`` at
    level ``k``, so the result is the affine rule
    ``c2 * (2*theta*k + M*theta) + c0``.
    """
    th, M = params.theta_eff, params.half_dim
    return DiagSeries.affine_form(2 * th * c2, c2 * M * th + c0, th, M, trunc)


def ds_star_mul(a: DiagSeries, b: DiagSeries) -> DiagSeries:
    """Star product: levelwise product of coefficients."""
    _check_compatible(a, b)
    if a.is_closed_form and b.is_closed_form:
        ra, rb = a.rule, b.rule
        return a._like(rule=lambda k: ra(k) * rb(k), trunc=max(a.trunc, b.trunc))
    n = min(len(s.values) for s in (a, b) if s.values is not None)
    k = np.arange(n)
    return a._like(values=a.coeff(k) * b.coeff(k), trunc=n)


def _first_zero_level(a: DiagSeries):
    if a.affine is not None:
        alpha, beta = a.affine
        if alpha == 0:
            return 0 if beta == 0 else None
        root = -beta / alpha
        if root >= 0 and float(root).is_integer():
            return int(root)
        return None
    vals = a.window()
    hits = np.flatnonzero((vals == 0) | ~np.isfinite(1.0 / np.where(vals == 0, 1.0, vals)))
    return int(hits[0]) if hits.size else None


def ds_star_inv(a: DiagSeries) -> DiagSeries:
    """Star inverse: levelwise reciprocal.

    Raises
    ------
    ZeroCoefficient
        If some level vanishes (for affine forms: any level ``k >= 0``; otherwise
        within the stored window).
    """
    k0 = _first_zero_level(a)
    if k0 is not None:
        raise ZeroCoefficient(k0)
    if a.is_closed_form:
        ra = a.rule
        return a._like(rule=lambda k: 1.0 / ra(k))
    return a._like(values=1.0 / a.values[: a.trunc], trunc=a.trunc)


def ds_laplacian(a: DiagSeries) -> DiagSeries:
    """Flat Laplacian of a 2D radial series.

    ``(2/theta) * [-(2m+1) a(m) + m a(m-1) + (m+1) a(m+1)]``. Affine input gives
    the constant ``2*alpha/theta`` exactly; array input loses its last level.
    """
    if a.half_dim != 1:
        raise ValueError("ds_laplacian is defined for half_dim == 1 only")
    th = a.theta
    if a.affine is not None:
        alpha, _ = a.affine
        return DiagSeries.affine_form(0.0, 2.0 * alpha / th, th, 1, a.trunc)

    def lap(m, c):
        prev = np.where(m > 0, c(np.maximum(m - 1, 0)), 0.0)
        return (2.0 / th) * (-(2 * m + 1) * c(m) + m * prev + (m + 1) * c(m + 1))

    if a.is_closed_form:
        ra = a.rule
        return a._like(rule=lambda m: lap(m, ra))
    n = len(a.values) - 1
    if n < 1:
        raise ValueError("need at least two stored levels")
    vals = a.values
    m = np.arange(n)
    return a._like(values=lap(m, lambda j: vals[j.astype(int)]), trunc=min(a.trunc, n))


def level_multiplicity(k, M):
    """Number of multi-indices with ``m1 + ... + mM = k``: ``C(k+M-1, M-1)``."""
    k = np.asarray(k, dtype=float)
    out = np.ones_like(k)
    for j in range(1, M):
        out = out * (k + j) / j
    return out


@dataclass(frozen=True)
class IntegralResult:
    """Value of a truncated sum with its tail bound."""

    value: float
    error: float
    levels: int
    decay_exponent: float

    def __float__(self):
        return self.value


def ds_integrate(a: DiagSeries, tol=1e-8, check_decay=True) -> IntegralResult:
    """Integral over ``R^{2M}``: ``(2 pi theta)^M sum_k C(k+M-1, M-1) a(k)``.

    The sum runs over the stored window in ascending ``k`` with exactly
    rounded accumulation (:func:`math.fsum`). The tail past the window is bounded
    by an integral comparison on a power law ``c k**-p`` fitted to the last
    decade of levels.

    Raises
    ------
    Divergent
        When the fitted exponent ``p`` is not above 1, i.e. the coefficients do not
        decay faster than ``k**-M``.
    ToleranceNotReached
        When the tail bound exceeds ``tol``.
    """
    M, th = a.half_dim, a.theta
    n = a.trunc
    k = np.arange(n)
    terms = level_multiplicity(k, M) * a.coeff(k)
    scale = (2 * math.pi * th) ** M
    partial = math.fsum(terms) * scale
    if not np.any(terms):
        return IntegralResult(0.0, 0.0, n, math.inf)
    if n < 20:
        raise ToleranceNotReached("window too short for a tail estimate")
    lo, hi = n // 10, n - 1
    t_lo, t_hi = abs(terms[lo]), abs(terms[hi])
    tail_max = np.max(np.abs(terms[lo:]))
    if t_hi == 0 and tail_max == 0:
        return IntegralResult(partial, 0.0, n, math.inf)
    if t_hi == 0 or t_lo == 0:
        p = math.inf if t_hi == 0 else 0.0
    else:
        p = -math.log(t_hi / t_lo) / math.log(hi / lo)
    if check_decay and not p > 1.0 + 1e-3:
        raise Divergent(f"level terms decay like k^-{p:.3g}; need an exponent above 1")
    # sum_{k>hi} c k^-p <= int_hi^inf, with c pinned by the largest late term
    c = max(t_hi * hi ** p, tail_max * lo ** p) if math.isfinite(p) else 0.0
    bound = scale * c * hi ** (1 - p) / (p - 1) if math.isfinite(p) else 0.0
    if bound > tol:
        raise ToleranceNotReached(f"tail bound {bound:.3e} exceeds tol {tol:.3e} at trunc {n}")
    return IntegralResult(partial, bound, n, p)


def basis_diag(n_levels, r, theta):
    """Values ``f_mm(r) = 2 (-1)^m L_m(2 r^2/theta) exp(-r^2/theta)`` for ``m < n_levels``."""
    r = np.asarray(r, dtype=float)
    x = 2.0 * r * r / theta
    sign = np.where(np.arange(n_levels) % 2 == 0, 2.0, -2.0)
    return sign.reshape((-1,) + (1,) * r.ndim) * scaled_laguerre(n_levels, x)


def _binomial_taper(n, width):
    # weight of level m in the Euler mean of partial sums S_{n-1-width} .. S_{n-1}
    w = np.ones(n)
    if width == 0:
        return w
    j = np.arange(width + 1)
    pmf = np.array([math.comb(width, int(i)) for i in j], dtype=float) / 2.0 ** width
    cdf = np.cumsum(pmf)
    # level m = n-1-i survives in S_{n-1-j} for j <= i
    w[n - 1 - j] = cdf
    return w


def ds_eval(a: DiagSeries, r, n_levels=None, euler_width=32, return_error=False):
    """Pointwise reconstruction ``sum_m a(m) f_mm(r)`` of a 2D series.

    The terms alternate in sign and shrink only like ``m**-1/4``, so plain
    partial sums converge very slowly. The returned value is the Euler
    (binomial) mean of the last ``euler_width + 1`` partial sums, which removes
    the oscillation geometrically. The error estimate compares the means of
    widths ``euler_width`` and ``euler_width // 2``; accuracy is reported, not
    enforced. ``n_levels`` defaults to ``a.trunc``.
    """
    if a.half_dim != 1:
        raise ValueError("ds_eval is defined for half_dim == 1 only")
    n = a.trunc if n_levels is None else n_levels
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    width = max(0, min(euler_width, n - 1))
    terms = a.coeff(np.arange(n))[:, None] * basis_diag(n, r, a.theta)
    out = _binomial_taper(n, width) @ terms
    err = np.abs(out - _binomial_taper(n, width // 2) @ terms)
    if scalar:
        out, err = float(out[0]), float(err[0])
    return (out, err) if return_error else out
