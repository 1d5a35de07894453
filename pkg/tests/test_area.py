import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from moyalsphere import SphereParams
from moyalsphere.area import (
    classical_area,
    deformed_area,
    gamma1_closed,
    gamma2_closed,
    gamma_m_series,
    sphere_area,
)
from moyalsphere.errors import ParameterWindowError, ToleranceNotReached

LAMBDAS = [1e-3, 1e-2, 0.1, 1, 10, 100, 1e3, 1e4]


def mp_gamma(M, lam, dps=60):
    # expand C(k+M-1, M-1) in powers of x = k + a and sum with Hurwitz zeta
    with mp.workdps(dps):
        a = mp.mpf(lam) / 2 + mp.mpf(M) / 2
        poly = [mp.mpf(1)]
        for j in range(1, M):
            shifted = [mp.mpf(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                shifted[i] += c * (j - a)
                shifted[i + 1] += c
            poly = shifted
        s = mp.fsum(c * mp.zeta(2 * M - i, a) for i, c in enumerate(poly)) / mp.factorial(M - 1)
        return 2 ** (M - 1) * mp.mpf(lam) ** M * mp.gamma(M + mp.mpf(1) / 2) / mp.sqrt(mp.pi) * s


@pytest.mark.parametrize("M", [1, 2, 4, 6])
@pytest.mark.parametrize("lam", LAMBDAS)
def test_series_matches_mpmath(M, lam):
    assert abs(gamma_m_series(M, lam) - float(mp_gamma(M, lam))) <= 1e-12


def test_gamma1_at_one():
    assert gamma_m_series(1, 1.0) == pytest.approx(math.pi ** 2 / 12, rel=1e-15)
    assert float(gamma1_closed(1.0)) == pytest.approx(0.8224670334241132, rel=1e-15)
    # brute-force zeta(2) with integral tail
    K = 200000
    z2 = math.fsum(np.arange(1, K + 1, dtype=float) ** -2) + 1 / K - 1 / (2 * K * K)
    assert float(gamma1_closed(1.0)) == pytest.approx(z2 / 2, rel=1e-12)


@pytest.mark.parametrize("lam", [0.1, 1, 10, 100])
def test_closed_forms_match_series(lam):
    assert abs(gamma_m_series(1, lam) - float(gamma1_closed(lam))) <= 1e-10
    assert abs(gamma_m_series(2, lam) - float(gamma2_closed(lam))) <= 1e-10


@given(st.floats(1e-3, 1e4))
def test_closed_forms_property(lam):
    assert abs(gamma_m_series(1, lam) - float(gamma1_closed(lam))) <= 1e-10
    assert abs(gamma_m_series(2, lam) - float(gamma2_closed(lam))) <= 1e-10


def test_shifted_index_convention():
    # sum over k >= 1 with C(k-2+M, M-1)/(k - 1 + lam/2 + M/2)^(2M) is the same series
    M, lam = 3, 2.5
    a = lam / 2 + M / 2
    k0 = np.arange(0, 4000)
    k1 = np.arange(1, 4001)
    s0 = math.fsum([math.comb(int(k) - 1 + M, M - 1) / (k + a) ** (2 * M) for k in k0])
    s1 = math.fsum([math.comb(int(k) - 2 + M, M - 1) / (k - 1 + a) ** (2 * M) for k in k1])
    assert s0 == s1


@pytest.mark.parametrize("M", [1, 2, 4, 6])
def test_gamma_in_unit_interval_and_increasing(M):
    grid = np.logspace(-2, 4, 25)
    vals = np.array([gamma_m_series(M, lam) for lam in grid])
    assert np.all((vals > 0) & (vals < 1))
    assert np.all(np.diff(vals) > 0)
    assert all(gamma_m_series(M, 10 * lam) > gamma_m_series(M, lam) for lam in (0.01, 0.1, 1, 10, 100))


@pytest.mark.parametrize("M", [1, 2, 4, 6])
def test_gamma_limits(M):
    assert gamma_m_series(M, 1e4) >= 0.999
    assert gamma_m_series(M, 1e-3) <= 1e-2
    assert float(gamma2_closed(1e4)) == pytest.approx(1, abs=1e-3)


def test_series_errors():
    with pytest.raises(ToleranceNotReached):
        gamma_m_series(1, 1.0, tol=0.0)
    with pytest.raises(ValueError):
        gamma_m_series(0, 1.0)
    with pytest.raises(ValueError):
        gamma_m_series(1, -1.0)


@pytest.mark.parametrize("M", [1, 2, 3])
def test_classical_area(M):
    A = 1.7
    ref = {1: 4 * math.pi * A ** 2, 2: 8 * math.pi ** 2 / 3 * A ** 4, 3: 16 * math.pi ** 3 / 15 * A ** 6}[M]
    assert classical_area(M, A) == pytest.approx(ref, rel=1e-15)


def test_sphere_area():
    p = SphereParams(1.0, 1e-4)
    res = sphere_area(p)
    assert res.area == pytest.approx(res.classical_area * res.gamma_factor, rel=1e-15)
    assert res.area == pytest.approx(4 * math.pi, rel=1e-3)
    assert res.series_check <= 1e-10
    res4 = sphere_area(SphereParams(1.0, 1e-4, half_dim=2))
    assert res4.area == pytest.approx(8 * math.pi ** 2 / 3, rel=1e-3)
    small = sphere_area(SphereParams(1.0, 1e3, allow_out_of_window=True))
    assert small.lam == pytest.approx(1e-3) and small.gamma_factor <= 1e-2
    res6 = sphere_area(SphereParams(1.0, 0.01, half_dim=3))
    assert math.isnan(res6.series_check) and 0 < res6.gamma_factor < 1
    with pytest.raises(ParameterWindowError):
        SphereParams(1.0, 0.6)


def test_deformed_area_reduction():
    a = deformed_area(1, 1.0, 0.03, 0.04)
    b = sphere_area(SphereParams(1.0, 0.05, half_dim=2))
    assert a == b
    c = deformed_area(2, 1.0, 0.05, 0.0)
    assert c.area == sphere_area(SphereParams(1.0, 0.05, half_dim=4)).area


@given(st.floats(0, 2 * math.pi))
def test_deformed_area_depends_only_on_theta_prime(phi):
    tp = 0.05
    a = deformed_area(1, 1.0, abs(tp * math.cos(phi)), abs(tp * math.sin(phi)))
    b = sphere_area(SphereParams(1.0, tp, half_dim=2))
    assert a.area == pytest.approx(b.area, rel=1e-13)
