"""Order-theta**2 star calculus for radial functions and the constant-curvature equation.

Radial functions are handled as functions of ``u = r**2``. With ``D = 2 d/du``
(so that ``f'(r) = r Df``) the second-order Moyal product in ``2m``
dimensions reads

    f * g = f g - (theta^2/8) [2m Df Dg + u (D^2 f Dg + Df D^2 g)],

and the inverse

    f^-1 = 1/f + (theta^2/4) [u (Df)^3 / f^4 - m (Df)^2 / f^3 - u Df D^2 f / f^3].

In ``u`` every term is a polynomial in the derivatives, so nothing is
singular at the origin and no small-``r`` special casing is needed.
Derivatives are carried exactly by Taylor jets (:mod:`.jets`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ParameterWindowError, PoleError, ResidualTooLarge, StepFailure
from .jets import Jet, log1p_jet
from .tables import CurveTable

# jet order used when a RadialFn is evaluated; deep compositions lose one
# order per D, the constant-curvature operator needs about seven
DEFAULT_ORDER = 10


class RadialFn:
    """Radial function ``f(r)`` represented through its Taylor jets in ``u = r**2``.

    Parameters
    ----------
    fn : callable
        Maps a :class:`Jet` of the variable ``u`` to the jet of ``f``.
    """

    __slots__ = ("fn", "_memo")

    def __init__(self, fn: Callable[[Jet], Jet]):
        self.fn = fn
        self._memo = (None, None)

    def jet(self, x: Jet) -> Jet:
        if self._memo[0] is x:
            return self._memo[1]
        out = self.fn(x)
        if not isinstance(out, Jet):
            out = Jet.const(out, x)
        self._memo = (x, out)
        return out

    def u_jet(self, u, order=DEFAULT_ORDER, need=0) -> Jet:
        out = self.jet(Jet.variable(u, order))
        if out.order < need:
            raise ValueError(f"composition too deep for jet order {order}; pass a larger order")
        return out

    # evaluators in r -----------------------------------------------------
    def f(self, r):
        r = np.asarray(r, dtype=float)
        return self.u_jet(r * r).value()

    __call__ = f

    def f1(self, r):
        """``df/dr = 2 r f_u``."""
        r = np.asarray(r, dtype=float)
        j = self.u_jet(r * r, need=1)
        return 2 * r * j.deriv(1)

    def f2(self, r):
        """``d2f/dr2 = 2 f_u + 4 r^2 f_uu``."""
        r = np.asarray(r, dtype=float)
        j = self.u_jet(r * r, need=2)
        return 2 * j.deriv(1) + 4 * r * r * j.deriv(2)

    # algebra -------------------------------------------------------------
    @classmethod
    def constant(cls, c):
        return cls(lambda x: Jet.const(c, x))

    @classmethod
    def u_polynomial(cls, coeffs):
        """``sum_j coeffs[j] u**j``."""
        coeffs = list(coeffs)

        def fn(x):
            out = Jet.const(0.0, x)
            for c in reversed(coeffs):
                out = out * x + c
            return out

        return cls(fn)

    def D(self) -> "RadialFn":
        """``2 d/du``; equals ``f'(r)/r``."""
        return RadialFn(lambda x: self.jet(x).d() * 2.0)

    def __add__(self, other):
        o = _lift(other)
        return RadialFn(lambda x: self.jet(x) + o.jet(x))

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift(other)
        return RadialFn(lambda x: self.jet(x) - o.jet(x))

    def __rsub__(self, other):
        return _lift(other) - self

    def __neg__(self):
        return RadialFn(lambda x: -self.jet(x))

    def __mul__(self, other):
        o = _lift(other)
        return RadialFn(lambda x: self.jet(x) * o.jet(x))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _lift(other)
        return RadialFn(lambda x: self.jet(x) / o.jet(x))


def _lift(v) -> RadialFn:
    return v if isinstance(v, RadialFn) else RadialFn.constant(float(v))


U = RadialFn(lambda x: x)


def conformal_h0(A) -> RadialFn:
    """Classical conformal factor ``(A^2 + r^2) / (2 A^2)``."""
    return RadialFn.u_polynomial([0.5, 0.5 / (A * A)])


# star calculus ---------------------------------------------------------------


def star_mul_radial(f: RadialFn, g: RadialFn, theta: float, m: int) -> RadialFn:
    """Second-order star product of radial functions in ``2m`` dimensions."""
    if m < 1:
        raise ValueError("m must be >= 1")
    t2 = theta * theta
    Df, Dg = f.D(), g.D()
    D2f, D2g = Df.D(), Dg.D()

    def fn(x):
        fx, gx = f.jet(x), g.jet(x)
        if t2 == 0:
            return fx * gx
        a, b, a2, b2 = Df.jet(x), Dg.jet(x), D2f.jet(x), D2g.jet(x)
        corr = 2 * m * a * b + x * (a2 * b + a * b2)
        return fx * gx - corr * (t2 / 8)

    return RadialFn(fn)


def star_inv_radial(f: RadialFn, theta: float, m: int) -> RadialFn:
    """Second-order star inverse of a radial function in ``2m`` dimensions.

    Raises :class:`PoleError` where ``f`` vanishes.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    t2 = theta * theta
    Df = f.D()
    D2f = Df.D()

    def fn(x):
        fx = f.jet(x)
        if np.any(fx.value() == 0):
            raise PoleError("star inverse of a function with a zero")
        inv = fx.reciprocal()
        if t2 == 0:
            return inv
        a, a2 = Df.jet(x), D2f.jet(x)
        inv3 = inv * inv * inv
        corr = x * a * a * a * inv3 * inv - m * a * a * inv3 - x * a * a2 * inv3
        return inv + corr * (t2 / 4)

    return RadialFn(fn)


def deformed_star_mul_radial(f, g, theta, mu, n) -> RadialFn:
    """Product on the ``4n``-dimensional deformed space: the ``2m`` rule with
    ``theta -> hypot(theta, mu)`` and ``m -> 2n``."""
    return star_mul_radial(f, g, math.hypot(theta, mu), 2 * n)


def deformed_star_inv_radial(f, theta, mu, n) -> RadialFn:
    return star_inv_radial(f, math.hypot(theta, mu), 2 * n)


# constant-curvature operator ---------------------------------------------------


def gradient_square(h: RadialFn, theta: float, m: int) -> RadialFn:
    """``sum_i d_i h * d_i h`` to order theta**2."""
    n = 2 * m
    H = h.D()
    H1 = H.D()
    H11 = H1.D()

    def fn(x):
        a, a1, a11 = H.jet(x), H1.jet(x), H11.jet(x)
        s1 = (n + 2) * x * a1 * a1 + 2 * x * x * a1 * a11
        return x * a * a - s1 * (theta * theta / 8)

    return RadialFn(fn)


def gradient_sandwich(h: RadialFn, g: RadialFn, theta: float, m: int) -> RadialFn:
    """``sum_i d_i h * g * d_i h`` to order theta**2."""
    n = 2 * m
    t2 = theta * theta
    H = h.D()
    H1 = H.D()
    H11 = H1.D()
    G1 = g.D()
    G11 = G1.D()

    def fn(x):
        a, a1, a11 = H.jet(x), H1.jet(x), H11.jet(x)
        gx, g1, g11 = g.jet(x), G1.jet(x), G11.jet(x)
        x2 = x * x
        s1 = (n + 2) * x * a1 * a1 + 2 * x2 * a1 * a11
        inner = 2 * a * (g1 * ((n + 2) * x * a1 + x2 * a11) + g11 * x2 * a1) + gx * s1 + 2 * g1 * a1 * a1 * x2
        outer = x * (2 * a * a1 * g1 + a * a * g11) + n * a * a * g1
        return gx * x * a * a - inner * (t2 / 8) + outer * (t2 / 4)

    return RadialFn(fn)


def laplacian_radial(h: RadialFn, m: int) -> RadialFn:
    """Flat Laplacian in ``2m`` dimensions: ``2m Dh + u D^2 h``."""
    H = h.D()
    H1 = H.D()
    return RadialFn(lambda x: 2 * m * H.jet(x) + x * H1.jet(x))


def constant_curvature_lhs(h: RadialFn, theta: float, m: int = 2) -> RadialFn:
    """Left side of the constant-curvature equation for ``h^-2 dx^2`` in ``2m`` dimensions:

        h * [Lap h - (m - 1) h^-1 * (d_i h * d_i h) - d_i h * h^-1 * d_i h],

    every product a second-order star product. For the round metric
    ``h0`` and ``theta = 0`` it equals ``m / A^2`` (``2/A^2`` in 4D).
    """
    g = star_inv_radial(h, theta, m)
    bracket = laplacian_radial(h, m) - gradient_sandwich(h, g, theta, m)
    if m != 1:
        bracket = bracket - (m - 1) * star_mul_radial(g, gradient_square(h, theta, m), theta, m)
    return star_mul_radial(h, bracket, theta, m)


# the 4D epsilon correction ----------------------------------------------------


def default_c1(A) -> float:
    """``-(13 + 12 ln A) / (30 A^6)``: makes ``eps(0) = 0``."""
    return -(13 + 12 * math.log(A)) / (30 * A ** 6)


def default_c2(A) -> float:
    """``1 / (15 A^8)``: cancels the ``1/r^2`` and ``ln r`` singularities at the origin."""
    return 1.0 / (15 * A ** 8)


def _eps_stable_jet(x: Jet, A) -> Jet:
    # A^-4 E(u/A^2), E(v) = (v^2 - 14v - 4)/30 + (4 - 6v)/(30(1+v)) + (v-1) log1p(v)/5
    v = x / (A * A)
    E = (v * v - 14 * v - 4) / 30 + (4 - 6 * v) / (30 * (v + 1)) + (v - 1) * log1p_jet(v) / 5
    return E / A ** 4


def _eps_printed_jet(x: Jet, A, C1, C2) -> Jet:
    A2 = A * A
    A4, A6 = A2 * A2, A2 * A2 * A2
    if np.any(x.value() <= 0):
        raise PoleError("general epsilon solution needs r > 0")
    logu = x.log()
    part2 = (x * x * x - A2 * x * x - 17 * A4 * x + A6 + 6 * (x - A2) * A2 * x * logu) * (C2 / 2) / x
    ratio_log = logu - (x + A2).log()
    part3 = (A6 - 3 * A4 * x + 6 * A2 * x * x + 6 * (x * x - A4) * x * ratio_log) / (30 * A6 * x * (x + A2))
    return C1 * (x - A2) + part2 - part3


def epsilon_radial(A, C1=None, C2=None, form="auto") -> RadialFn:
    """``eps(r)`` of the 4D solution as a :class:`RadialFn`.

    ``form="printed"`` evaluates the general solution term by term (``r > 0``).
    ``form="stable"`` uses the simplification valid for the default ``C2``,
    ``A^-4 E(r^2/A^2) + (C1 - C1_default)(r^2 - A^2)``, which is regular at
    ``r = 0``. ``"auto"`` picks ``stable`` whenever ``C2`` is the default.
    """
    c1d, c2d = default_c1(A), default_c2(A)
    C1 = c1d if C1 is None else C1
    C2 = c2d if C2 is None else C2
    if form == "auto":
        form = "stable" if C2 == c2d else "printed"
    if form == "stable":
        if C2 != c2d:
            raise ValueError("stable form needs the default C2")
        dc1 = C1 - c1d
        return RadialFn(lambda x: _eps_stable_jet(x, A) + dc1 * (x - A * A))
    if form == "printed":
        return RadialFn(lambda x: _eps_printed_jet(x, A, C1, C2))
    raise ValueError(f"unknown form {form!r}")


def epsilon_closed_4d(r, A, C1=None, C2=None, form="auto"):
    """Closed-form ``eps(r)`` for the 4D sphere with curvature ``12/A^2``.

    Defaults ``C1 = -(13 + 12 ln A)/(30 A^6)`` and ``C2 = 1/(15 A^8)`` give the
    solution that is finite with ``eps(0) = 0``. With a non-default ``C2`` the
    solution blows up at the origin and ``r = 0`` raises :class:`PoleError`.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    out = epsilon_radial(A, C1, C2, form).f(r)
    return float(out) if out.ndim == 0 else out


def corrected_h(A, theta, C1=None, C2=None) -> RadialFn:
    """``h = h0 + theta^2 eps``."""
    return conformal_h0(A) + theta * theta * epsilon_radial(A, C1, C2)


def h_ratio(r, A, theta, C1=None, C2=None):
    """``h^-2 / h0^-2 = (h0 / h)^2`` with ``h = h0 + theta^2 eps``."""
    r = np.asarray(r, dtype=float)
    h0 = conformal_h0(A).f(r)
    if theta == 0:
        return np.ones_like(h0) if h0.ndim else 1.0
    h = corrected_h(A, theta, C1, C2).f(r)
    if np.any(h == 0):
        raise PoleError("corrected conformal factor vanishes")
    out = (h0 / h) ** 2
    return float(out) if out.ndim == 0 else out


def constant_curvature_residual(A, theta, grid, eps="closed", m=2, return_all=False):
    """``max |LHS - m/A^2|`` of the constant-curvature equation on ``grid``.

    ``eps`` is ``"closed"`` (default constants), ``"zero"`` (``h = h0``) or a
    :class:`RadialFn`. With ``"zero"`` the leading term is
    ``4 theta^2 / (A^2 (A^2 + r^2)^2)`` in 4D; with the closed form it is
    ``O(theta^4)``.
    """
    if not 0 <= theta < A * A / 2:
        raise ParameterWindowError(f"theta={theta} outside [0, A^2/2)")
    if isinstance(eps, str):
        if eps == "zero":
            eps = RadialFn.constant(0.0)
        elif eps == "closed":
            if m != 2:
                raise ValueError("the closed-form correction is for the 4D sphere")
            eps = epsilon_radial(A)
        else:
            raise ValueError(f"unknown eps {eps!r}")
    h = conformal_h0(A) + theta * theta * eps
    grid = np.asarray(grid, dtype=float)
    lhs = constant_curvature_lhs(h, theta, m).u_jet(grid * grid).value()
    dev = lhs - m / A ** 2
    return dev if return_all else float(np.max(np.abs(dev)))


# ODE families -------------------------------------------------------------------

FAMILIES = ("4d", "general-2m", "deformed-4n")


@dataclass(frozen=True)
class EpsilonODE:
    """``eps'' + p eps' + q eps + s = 0`` on ``r > 0``.

    ``p0`` is ``lim r p(r)`` (the regular singular point at the origin).
    The equation has no ``theta``: the correction profile does not depend on it.
    """

    p: Callable
    q: Callable
    s: Callable
    A: float
    family: str
    param: int
    p0: float = field(default=0.0)

    def residual(self, r, e, de, d2e):
        """Left side of the equation; at ``r = 0`` the term ``p eps'`` takes its
        limit ``p0 eps''(0)`` (``eps'`` vanishes linearly for a regular solution)."""
        r = np.asarray(r, dtype=float)
        at0 = r == 0
        rs = np.where(at0, 1.0, r)
        drift = np.where(at0, self.p0 * d2e, self.p(rs) * de)
        return d2e + drift + self.q(r) * e + self.s(r)

    def residual_of(self, eps: RadialFn, r):
        r = np.asarray(r, dtype=float)
        return self.residual(r, eps.f(r), eps.f1(r), eps.f2(r))


def epsilon_ode(family: str, A: float, dim_param: int = None, source: str = "printed") -> EpsilonODE:
    """Coefficients of the ``eps`` equation.

    ``"4d"``
        ``p = (3A^2 - 5r^2)/(r(A^2+r^2))``, ``q = 8/(A^2+r^2)``, ``s = 8/(A^2+r^2)^3``.
    ``"general-2m"`` (``dim_param = m``)
        ``p = (A^2(2m-1) - (2m+1) r^2)/(r(A^2+r^2))``, ``q = 4m/(A^2+r^2)``,
        ``s = 8(2m-1)[A^2 m + (m-2) r^2] / (A^2 (A^2+r^2)^3)``.
    ``"deformed-4n"`` (``dim_param = n``)
        ``p = (A^2(4n-1) - (4n+1) r^2)/(r(A^2+r^2))``, ``q = 8n/(A^2+r^2)``,
        ``s = 16(4n-1)[A^2 n + (n-1) r^2] / (A^2 (A^2+r^2)^3)``.

    At ``m = 2`` and ``n = 1`` the printed sources are ``48/(A^2+r^2)^3``,
    six times the ``"4d"`` source; ``p`` and ``q`` agree.

    Linearizing the constant-curvature operator around ``h0`` reproduces
    ``p`` and ``q`` of every family, and the 4D source, but gives the
    ``2m``-dimensional source ``4 [A^2 m + (m-2) r^2] / (A^2 (A^2+r^2)^3)``:
    the printed general sources carry an extra factor ``2(2m-1)`` (with
    ``m = 2n`` in the deformed case). ``source="consistent"`` divides it out;
    the default ``"printed"`` keeps the displayed coefficients.
    """
    if source not in ("printed", "consistent"):
        raise ValueError(f"source must be 'printed' or 'consistent', got {source!r}")
    if not A > 0:
        raise ValueError("A must be positive")
    A2 = A * A
    if family == "4d":
        k, d = 2, 4
        src = lambda r: 8.0 / (A2 + r * r) ** 3
    elif family == "general-2m":
        k = _positive_int(dim_param, "m")
        d = 2 * k
        src = lambda r: 8 * (2 * k - 1) * (A2 * k + (k - 2) * r * r) / (A2 * (A2 + r * r) ** 3)
    elif family == "deformed-4n":
        k = _positive_int(dim_param, "n")
        d = 4 * k
        src = lambda r: 16 * (4 * k - 1) * (A2 * k + (k - 1) * r * r) / (A2 * (A2 + r * r) ** 3)
    else:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")

    if source == "consistent" and family != "4d":
        printed, factor = src, 2.0 * (d - 1)
        src = lambda r: printed(r) / factor

    def p(r):
        return (A2 * (d - 1) - (d + 1) * r * r) / (r * (A2 + r * r))

    def q(r):
        return 2.0 * d / (A2 + r * r)

    param = 2 if family == "4d" else k
    return EpsilonODE(p, q, src, A, family, param, float(d - 1))


def _positive_int(v, name):
    if v is None or int(v) != v or v < 1:
        raise ValueError(f"{name} must be a positive integer, got {v}")
    return int(v)


def frobenius_start(ode: EpsilonODE, delta: float, e0: float = 0.0):
    """Bounded-branch data ``(eps, eps')`` at ``r = delta``.

    Near the origin ``eps = e0 + e1 r^2 + O(r^4)`` with
    ``e1 = -(q(0) e0 + s(0)) / (2 (1 + p0))``.
    """
    q0, s0 = float(ode.q(0.0)), float(ode.s(0.0))
    e1 = -(q0 * e0 + s0) / (2 * (1 + ode.p0))
    return e0 + e1 * delta * delta, 2 * e1 * delta


def ode_solve(
    ode: EpsilonODE,
    r_end: float,
    init_mode="zero",
    samples: int = 501,
    delta: float = None,
    rtol: float = 1e-10,
    residual_tol: float = 1e-6,
) -> CurveTable:
    """Integrate the ``eps`` equation from the origin to ``r_end``.

    Starts at ``delta = 1e-4 A`` from the two-term Frobenius series of the
    bounded branch (``init_mode="zero"`` for ``eps(0) = 0`` or a float
    ``eps(0)``) and steps with an adaptive 8th-order Runge-Kutta method.
    The residual column is the equation evaluated on the dense output with
    ``eps''`` from a five-point centered difference of ``eps'`` (NaN where the
    stencil does not fit); its maximum, scaled by ``max(1, |eps''|)``, must
    stay below ``residual_tol``.

    Returns
    -------
    CurveTable
        Columns ``r, eps, deps, residual`` on ``samples`` points of ``[delta, r_end]``.
    """
    if not r_end > 0:
        raise ValueError("r_end must be positive")
    delta = 1e-4 * ode.A if delta is None else delta
    if r_end <= delta:
        raise ValueError("r_end must exceed the start point")
    e0 = 0.0 if init_mode == "zero" else float(init_mode)
    y0 = frobenius_start(ode, delta, e0)

    def rhs(r, y):
        return [y[1], -(ode.p(r) * y[1] + ode.q(r) * y[0] + ode.s(r))]

    sol = solve_ivp(rhs, (delta, r_end), y0, method="DOP853", rtol=rtol, atol=rtol * 1e-3, dense_output=True)
    if sol.status != 0:
        raise StepFailure(sol.message)
    r = np.linspace(delta, r_end, samples)
    e, de = sol.sol(r)
    # eps'' by a five-point centered difference of eps' on the dense output;
    # points too close to either end for the stencil are skipped
    hstep = np.minimum(1e-2 * r, np.minimum(r - delta, r_end - r) / 2)
    interior = hstep >= 1e-3 * r
    hs = np.where(interior, hstep, 1e-3 * r)
    ev = lambda x: sol.sol(np.clip(x, delta, r_end))[1]
    d2e = (8 * (ev(r + hs) - ev(r - hs)) - (ev(r + 2 * hs) - ev(r - 2 * hs))) / (12 * hs)
    res = np.where(interior, ode.residual(r, e, de, d2e), np.nan)
    scale = np.maximum(1.0, np.abs(d2e))
    worst = float(np.nanmax(np.abs(res) / scale)) if interior.any() else 0.0
    if worst > residual_tol:
        raise ResidualTooLarge(f"scaled residual {worst:.3e} exceeds {residual_tol:.1e}")
    meta = {
        "family": ode.family,
        "param": ode.param,
        "A": ode.A,
        "delta": delta,
        "rtol": rtol,
        "init": init_mode,
        "max_residual": worst,
        "nfev": int(sol.nfev),
    }
    return CurveTable(
        [("r", "length"), ("eps", "length^-4"), ("deps", "length^-5"), ("residual", "length^-6")],
        np.column_stack([r, e, de, res]),
        meta,
    )
