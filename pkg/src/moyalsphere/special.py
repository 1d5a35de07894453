"""Self-contained special functions: polygamma, Gamma at half integers, Laguerre.

Nothing here calls into :mod:`scipy.special`; the test suite uses scipy and
brute-force sums as independent references.
"""

from __future__ import annotations

import math

import numpy as np

# B_2, B_4, ..., B_20
_BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
)

# arguments below this are lifted by the recurrence before the asymptotic series
_ASYMPTOTIC_MIN = 14.0


def _asymptotic_coeffs(n):
    # c_k = B_2k (2k+n-1)! / (2k)!  multiplying y**-(2k+n)
    return [
        b * math.factorial(2 * k + n - 1) / math.factorial(2 * k)
        for k, b in enumerate(_BERNOULLI_EVEN, start=1)
    ]


def polygamma(n, x):
    r"""Polygamma function :math:`\psi^{(n)}(x)` for integer ``n >= 1`` and ``x > 0``.

    Lifts ``x`` with :math:`\psi^{(n)}(x) = \psi^{(n)}(x+1) - (-1)^n n!/x^{n+1}`
    until it exceeds 14, then sums the Bernoulli asymptotic expansion.
    Relative accuracy is about 1e-15 for ``n <= 3``.

    Parameters
    ----------
    n : int
        Derivative order of the digamma function, ``n >= 1``.
    x : float or array_like
        Strictly positive argument(s).

    Returns
    -------
    float or ndarray
    """
    if int(n) != n or n < 1:
        raise ValueError(f"polygamma order must be an integer >= 1, got {n}")
    n = int(n)
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(x > 0)) or np.any(~np.isfinite(x)):
        raise ValueError("polygamma needs finite x > 0")

    shifts = np.maximum(0, np.ceil(_ASYMPTOTIC_MIN - x)).astype(int)
    y = x + shifts
    inv = 1.0 / y
    inv2 = inv * inv
    series = np.zeros_like(y)
    for c in reversed(_asymptotic_coeffs(n)):
        series = series * inv2 + c
    series *= inv2
    nf = math.factorial(n)
    body = math.factorial(n - 1) + nf * inv / 2.0 + series
    out = body * inv ** n

    # lifted terms, smallest first
    low = np.zeros_like(y)
    for j in range(int(shifts.max()) - 1, -1, -1):
        mask = j < shifts
        low[mask] += (x[mask] + j) ** -(n + 1)
    out = out + nf * low
    if n % 2 == 0:
        out = -out
    return float(out[0]) if scalar else out


def trigamma(x):
    return polygamma(1, x)


def gamma_half_integer(M: int) -> float:
    """``Gamma(M + 1/2)`` from ``(2M)! / (4**M M!) * sqrt(pi)``."""
    if int(M) != M or M < 0:
        raise ValueError(f"need a nonnegative integer, got {M}")
    M = int(M)
    return math.factorial(2 * M) / (4 ** M * math.factorial(M)) * math.sqrt(math.pi)


def scaled_laguerre(n_max, x):
    """Rows ``exp(-x/2) * L_k(x)`` for ``k = 0 .. n_max-1``.

    Uses the three-term recurrence on the already damped values, so nothing
    overflows for large ``x``. Returns an array of shape ``(n_max,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max,) + x.shape)
    if n_max == 0:
        return out
    out[0] = np.exp(-x / 2.0)
    if n_max > 1:
        out[1] = (1.0 - x) * out[0]
    for k in range(1, n_max - 1):
        out[k + 1] = ((2 * k + 1 - x) * out[k] - k * out[k - 1]) / (k + 1)
    return out
