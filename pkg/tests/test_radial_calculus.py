import dataclasses
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import eval_laguerre

from moyalsphere.errors import ParameterWindowError, PoleError, ResidualTooLarge
from moyalsphere.radial_calculus import (
    FAMILIES,
    RadialFn,
    U,
    conformal_h0,
    constant_curvature_lhs,
    constant_curvature_residual,
    default_c1,
    default_c2,
    deformed_star_inv_radial,
    deformed_star_mul_radial,
    epsilon_closed_4d,
    epsilon_ode,
    epsilon_radial,
    frobenius_start,
    h_ratio,
    ode_solve,
    star_inv_radial,
    star_mul_radial,
)

R = np.array([0.0, 0.3, 0.5, 1.0, 1.3, 2.0, 4.0])
R_POS = R[1:]


def slope(ths, errs):
    return np.polyfit(np.log(ths), np.log(errs), 1)[0]


# radial functions -----------------------------------------------------------


def test_radialfn_derivatives_match_finite_differences():
    f = RadialFn(lambda x: (x + 1).log() / (x * 0.5 + 2))
    r = np.array([0.2, 0.7, 1.5, 3.0])
    h = 1e-4
    fd1 = (f(r + h) - f(r - h)) / (2 * h)
    fd2 = (f(r + h) - 2 * f(r) + f(r - h)) / h ** 2
    assert np.allclose(f.f1(r), fd1, rtol=1e-7, atol=1e-9)
    assert np.allclose(f.f2(r), fd2, rtol=1e-5, atol=1e-6)


def test_radialfn_algebra():
    g = 2 * U + 1 - U * U / (U + 1)
    r = np.array([0.0, 0.5, 2.0])
    u = r * r
    assert np.allclose(g(r), 2 * u + 1 - u * u / (u + 1), rtol=1e-15)
    # D = f'(r)/r
    assert np.allclose(g.D()(r[1:]), g.f1(r[1:]) / r[1:], rtol=1e-13)
    assert (3 - RadialFn.constant(1.0))(1.0) == 2.0
    assert (-U)(2.0) == -4.0


def test_deep_composition_needs_order():
    f = U
    for _ in range(12):
        f = f.D() * U
    with pytest.raises(ValueError):
        f.f2(1.0)


# star product and inverse ------------------------------------------------------


@pytest.mark.parametrize("m", [1, 2, 3])
def test_product_with_unit_is_exact(m):
    f = (U + 1).D() * U + (U * U + 2).D() / (U + 3)
    one = RadialFn.constant(1.0)
    assert np.array_equal(star_mul_radial(f, one, 0.3, m)(R), f(R))
    assert np.array_equal(star_mul_radial(one, f, 0.3, m)(R), f(R))


def test_r2_star_r2_in_two_dimensions():
    th = 0.1
    got = star_mul_radial(U, U, th, 1)(R)
    assert np.allclose(got, R ** 4 - th * th, rtol=0, atol=1e-15)


@pytest.mark.parametrize("m", [1, 2, 4])
def test_classical_limit_is_pointwise(m):
    f, g = conformal_h0(1.3), U * U + 1
    assert np.array_equal(star_mul_radial(f, g, 0.0, m)(R), f(R) * g(R))
    assert np.array_equal(star_inv_radial(f, 0.0, m)(R), 1 / f(R))


def test_inverse_of_constant():
    for m in (1, 2, 5):
        assert np.all(star_inv_radial(RadialFn.constant(4.0), 0.2, m)(R) == 0.25)


def test_inverse_zero_raises():
    with pytest.raises(PoleError):
        star_inv_radial(U - 1, 0.1, 2)(np.array([0.5, 1.0]))
    with pytest.raises(ValueError):
        star_mul_radial(U, U, 0.1, 0)


def test_h0_inverse_closed_form():
    A = 1.0
    for th in (0.05, 0.2):
        got = star_inv_radial(conformal_h0(A), th, 2)(R)
        ref = 2 * A * A / (A * A + R ** 2) - 4 * th * th * A ** 4 / (A * A + R ** 2) ** 4
        assert np.allclose(got, ref, rtol=1e-14, atol=1e-16)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_inverse_defect_is_fourth_order(m):
    f = conformal_h0(1.0)
    ths = np.array([0.1, 0.05, 0.025])
    r = np.array([0.5, 1.0, 2.0])
    errs = np.array([np.abs(star_mul_radial(f, star_inv_radial(f, t, m), t, m)(r) - 1) for t in ths])
    for j in range(len(r)):
        assert slope(ths, errs[:, j]) >= 3.5


def _project(F, j, theta):
    """Coefficient of the diagonal basis function f_jj in a radial function of u (2D)."""
    w = lambda u: F(u) * (-1) ** j * eval_laguerre(j, 2 * u / theta) * math.exp(-u / theta)
    val, _ = quad(w, 0, 60 * theta + 40 * theta * j, limit=400, epsabs=1e-13, epsrel=1e-12)
    return val / theta


def _as_u(f):
    return lambda u: float(f(math.sqrt(u)))


@pytest.mark.parametrize("j", [0, 1, 2, 5])
def test_levelwise_product_oracle(j):
    # in the matrix basis radial functions are diagonal and the product is levelwise
    th = 0.1
    r2, r4 = U, U * U
    c2 = _project(_as_u(r2), j, th)
    c4 = _project(_as_u(r4), j, th)
    assert c2 == pytest.approx(th * (2 * j + 1), rel=1e-9)
    p22 = _project(_as_u(star_mul_radial(r2, r2, th, 1)), j, th)
    assert p22 == pytest.approx(c2 * c2, rel=1e-9)
    # so the pointwise square r^4 sits theta^2 above the levelwise square
    assert c4 == pytest.approx((th * (2 * j + 1)) ** 2 + th * th, rel=1e-9)
    p42 = _project(_as_u(star_mul_radial(r4, r2, th, 1)), j, th)
    assert p42 == pytest.approx(c4 * c2, rel=1e-9)
    # quartic times quartic is only right through theta^2
    p44 = _project(_as_u(star_mul_radial(r4, r4, th, 1)), j, th)
    assert abs(p44 - c4 * c4) <= 10 * th ** 4 * (2 * j + 1) ** 2


def test_deformed_reduces_to_theta_prime():
    f, g = conformal_h0(1.0), U * U + U
    a = deformed_star_mul_radial(f, g, 0.03, 0.04, 1)(R)
    b = star_mul_radial(f, g, 0.05, 2)(R)
    assert np.allclose(a, b, rtol=1e-15, atol=0)
    assert np.array_equal(deformed_star_mul_radial(f, g, 0.05, 0.0, 2)(R), star_mul_radial(f, g, 0.05, 4)(R))
    ai = deformed_star_inv_radial(f, 0.03, 0.04, 1)(R)
    assert np.allclose(ai, star_inv_radial(f, 0.05, 2)(R), rtol=1e-15, atol=0)


# constant-curvature equation ---------------------------------------------------------


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("A", [0.7, 1.0, 2.0])
def test_round_metric_classical_curvature(m, A):
    lhs = constant_curvature_lhs(conformal_h0(A), 0.0, m)(R)
    assert np.allclose(lhs, m / A ** 2, rtol=1e-13)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_defect_of_round_metric(m):
    # leading theta^2 defect with eps = 0
    A, th = 1.0, 1e-3
    d = constant_curvature_residual(A, th, R, eps="zero", m=m, return_all=True) / th ** 2
    ref = 2 * (m * A * A + (m - 2) * R ** 2) / (A * A * (A * A + R ** 2) ** 2)
    assert np.allclose(d, ref, rtol=1e-5, atol=1e-6)


def test_corrected_metric_fourth_order():
    ths = np.array([0.1, 0.05, 0.025])
    r = np.array([0.5, 1.0, 2.0])
    errs = np.array([np.abs(constant_curvature_residual(1.0, t, r, return_all=True)) for t in ths])
    zero = np.array([np.abs(constant_curvature_residual(1.0, t, r, eps="zero", return_all=True)) for t in ths])
    for j in range(len(r)):
        assert slope(ths, errs[:, j]) >= 3.5
        assert slope(ths, zero[:, j]) == pytest.approx(2.0, abs=0.05)


def test_residual_window():
    with pytest.raises(ParameterWindowError):
        constant_curvature_residual(1.0, 0.5, R)
    with pytest.raises(ValueError):
        constant_curvature_residual(1.0, 0.1, R, m=3)


# epsilon equation ---------------------------------------------------------------------


def test_families_agree_on_p_and_q():
    r = np.array([0.1, 0.5, 1.0, 3.0])
    for A in (0.5, 1.0, 2.0):
        o4 = epsilon_ode("4d", A)
        o2m = epsilon_ode("general-2m", A, 2)
        o4n = epsilon_ode("deformed-4n", A, 1)
        for o in (o2m, o4n):
            assert np.allclose(o.p(r), o4.p(r), rtol=1e-15)
            assert np.allclose(o.q(r), o4.q(r), rtol=1e-15)
            # displayed higher-dimensional sources are six times the 4D one at m = 2
            assert np.allclose(o.s(r), 6 * o4.s(r), rtol=1e-14)
        for fam, k in (("general-2m", 2), ("deformed-4n", 1)):
            assert np.allclose(epsilon_ode(fam, A, k, source="consistent").s(r), o4.s(r), rtol=1e-14)


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_consistent_source_from_linearization(m):
    A = 1.0
    ode = epsilon_ode("general-2m", A, m, source="consistent")
    r = np.array([0.4, 0.9, 1.7])
    u = r * r
    ref = 4 * (A * A * m + (m - 2) * u) / (A * A * (A * A + u) ** 3)
    assert np.allclose(ode.s(r), ref, rtol=1e-14)
    # the round-metric defect is the source times h0 (A = 1), so eps = 0 leaves exactly that behind
    th = 1e-3
    d = constant_curvature_residual(A, th, r, eps="zero", m=m, return_all=True) / th ** 2
    assert np.allclose(d, ode.s(r) * (A * A + u) / 2, rtol=1e-5)


@pytest.mark.parametrize("fam,k", [("4d", None), ("general-2m", 1), ("general-2m", 3), ("deformed-4n", 2)])
def test_regular_singular_point(fam, k):
    ode = epsilon_ode(fam, 1.3, k)
    d = 4 if fam == "4d" else (2 * k if fam == "general-2m" else 4 * k)
    for r in (1e-6, 1e-8):
        assert r * ode.p(r) == pytest.approx(d - 1, rel=1e-10)
    assert ode.p0 == d - 1


def test_ode_argument_errors():
    with pytest.raises(ValueError):
        epsilon_ode("3d", 1.0)
    with pytest.raises(ValueError):
        epsilon_ode("general-2m", 1.0)
    with pytest.raises(ValueError):
        epsilon_ode("4d", 1.0, source="other")
    with pytest.raises(ValueError):
        epsilon_ode("4d", -1.0)
    assert set(FAMILIES) == {"4d", "general-2m", "deformed-4n"}


@pytest.mark.parametrize("A", [0.5, 1.0, 2.0])
def test_closed_form_solves_ode(A):
    r = np.geomspace(1e-3, 10, 400)
    ode = epsilon_ode("4d", A)
    assert np.max(np.abs(ode.residual_of(epsilon_radial(A), r))) <= 1e-8
    # any C1 also solves it, the C1 term being a homogeneous solution
    assert np.max(np.abs(ode.residual_of(epsilon_radial(A, C1=0.3), r))) <= 1e-8


def test_closed_form_values():
    assert abs(epsilon_closed_4d(1e-6, 1.0)) <= 1e-9
    assert epsilon_closed_4d(0.0, 1.0) == 0.0
    a = epsilon_closed_4d(1.0, 1.0, form="stable")
    b = epsilon_closed_4d(1.0, 1.0, form="printed")
    assert abs(a - b) <= 1e-13
    for A in (0.5, 2.0):
        r = np.array([0.5, 1.0, 3.0])
        assert np.allclose(epsilon_closed_4d(r, A, form="stable"), epsilon_closed_4d(r, A, form="printed"), rtol=1e-8)


def test_closed_form_against_mpmath():
    A, r = 0.7, 0.9
    with mp.workdps(50):
        A_, r_ = mp.mpf(A), mp.mpf(r)
        C1 = -(13 + 12 * mp.log(A_)) / (30 * A_ ** 6)
        C2 = 1 / (15 * A_ ** 8)
        u = r_ ** 2
        eps = (
            C1 * (u - A_ ** 2)
            + C2 / (2 * u) * (u ** 3 - A_ ** 2 * u ** 2 - 17 * A_ ** 4 * u + A_ ** 6 + 12 * (u - A_ ** 2) * A_ ** 2 * u * mp.log(r_))
            - (A_ ** 6 - 3 * A_ ** 4 * u + 6 * A_ ** 2 * u ** 2 + 6 * (u ** 2 - A_ ** 4) * u * mp.log(u / (A_ ** 2 + u)))
            / (30 * A_ ** 6 * u * (A_ ** 2 + u))
        )
    assert epsilon_closed_4d(r, A) == pytest.approx(float(eps), rel=1e-12)
    assert default_c1(A) == pytest.approx(float(C1), rel=1e-15)
    assert default_c2(A) == pytest.approx(float(1 / (15 * mp.mpf(A) ** 8)), rel=1e-15)


def test_nondefault_c2_is_singular_at_origin():
    with pytest.raises(PoleError):
        epsilon_closed_4d(0.0, 1.0, C2=0.1)
    with pytest.raises(ValueError):
        epsilon_closed_4d(-1.0, 1.0)
    with pytest.raises(ValueError):
        epsilon_radial(1.0, C2=0.1, form="stable")
    assert math.isfinite(epsilon_closed_4d(0.5, 1.0, C2=0.1))


def test_h_ratio():
    r = np.linspace(0, 5, 11)
    assert np.all(h_ratio(r, 1.0, 0.0) == 1.0)
    assert np.max(np.abs(h_ratio(r, 5.0, 0.1) - 1)) <= 1e-4
    A, th, r0 = 0.5, 0.1, 0.5
    h0 = (A * A + r0 * r0) / (2 * A * A)
    with mp.workdps(40):
        eps = mp.mpf(epsilon_closed_4d(r0, A))
    assert h_ratio(r0, A, th) == pytest.approx(float((h0 / (h0 + th * th * eps)) ** 2), rel=1e-14)


@given(st.floats(0.3, 3.0), st.floats(0.0, 0.1), st.floats(0.0, 10.0))
def test_h_ratio_theta_squared(A, frac, r):
    th = frac * A * A
    h0 = (A * A + r * r) / (2 * A * A)
    ratio = h_ratio(r, A, th)
    e = epsilon_closed_4d(r, A)
    assert ratio == pytest.approx((h0 / (h0 + th * th * e)) ** 2, rel=1e-13)


# numerical solver -----------------------------------------------------------------------


def test_frobenius_start_bounded_branch():
    ode = epsilon_ode("4d", 1.0)
    e, de = frobenius_start(ode, 1e-3)
    ref = epsilon_closed_4d(1e-3, 1.0)
    assert e == pytest.approx(ref, rel=1e-5)
    assert de == pytest.approx(epsilon_radial(1.0).f1(1e-3), rel=1e-5)


@pytest.mark.parametrize("A", [0.5, 1.0, 2.0])
def test_ode_solve_matches_closed_form(A):
    tab = ode_solve(epsilon_ode("4d", A), 5.0 * max(A, 1.0), samples=801)
    r, e = tab.column("r"), tab.column("eps")
    sel = (r >= 0.01) & (r <= 5)
    ref = epsilon_closed_4d(r[sel], A)
    # eps has a zero near r = 2.42 A, so compare relative to the curve's size
    assert np.max(np.abs(e[sel] - ref)) / np.max(np.abs(ref)) <= 1e-6
    assert tab.meta["max_residual"] <= 1e-6
    assert np.nanmax(np.abs(tab.column("residual"))) <= 1e-5


def test_ode_solve_zero_source_stays_zero():
    ode = dataclasses.replace(epsilon_ode("general-2m", 1.0, 3), s=lambda r: 0.0 * np.asarray(r))
    tab = ode_solve(ode, 4.0)
    assert np.all(tab.column("eps") == 0) and np.all(tab.column("deps") == 0)


@pytest.mark.parametrize("fam,k", [("general-2m", 1), ("general-2m", 3), ("deformed-4n", 2)])
def test_ode_solve_other_families(fam, k):
    tab = ode_solve(epsilon_ode(fam, 1.0, k, source="consistent"), 5.0, samples=201)
    assert tab.names == ["r", "eps", "deps", "residual"]
    assert tab.meta["family"] == fam and tab.meta["param"] == k
    assert np.all(np.isfinite(tab.column("eps")))


def test_ode_solve_general_m2_is_4d():
    a = ode_solve(epsilon_ode("general-2m", 1.0, 2, source="consistent"), 3.0, samples=51)
    b = ode_solve(epsilon_ode("4d", 1.0), 3.0, samples=51)
    assert np.allclose(a.column("eps"), b.column("eps"), rtol=1e-12, atol=1e-15)


def test_ode_solve_errors():
    ode = epsilon_ode("4d", 1.0)
    with pytest.raises(ValueError):
        ode_solve(ode, -1.0)
    with pytest.raises(ResidualTooLarge):
        ode_solve(ode, 5.0, rtol=1e-3, residual_tol=1e-12)
