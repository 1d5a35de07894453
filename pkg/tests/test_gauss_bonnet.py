import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from moyalsphere import SphereParams
from moyalsphere.errors import ParameterWindowError
from moyalsphere.gauss_bonnet import (
    EIGHT_PI,
    NearSingularWarning,
    b_level,
    gb_direct,
    gb_limit,
    gb_summand,
    gb_telescoped,
    gb_term,
)

GRID = [(1, 0.1), (1, 0.4), (2, 0.3), (5, 1.0), (2, 1.9), (0.3, 0.01)]


@pytest.mark.parametrize("A,theta", GRID)
def test_partial_fraction_per_term(A, theta):
    p = SphereParams(A, theta)
    for m in list(range(50)) + [10 ** 3, 10 ** 4]:
        t = gb_term(p, m)
        assert t.partial_fraction(p) == pytest.approx(t.value, rel=1e-13)
        assert t.B == pytest.approx(1 / (2 * m * theta + A * A - theta), rel=1e-15)


@given(st.floats(0.2, 5.0), st.floats(0.001, 0.999), st.integers(0, 10 ** 4))
def test_partial_fraction_property(A, frac, m):
    p = SphereParams(A, frac * A * A / 2)
    t = gb_term(p, m)
    assert t.partial_fraction(p) == pytest.approx(t.value, rel=1e-11)


@pytest.mark.parametrize("A,theta", GRID)
def test_scaled_terms_increase_to_limit(A, theta):
    # the tail bracket relies on m^2 t(m) increasing towards 2 A^2 / theta^2
    p = SphereParams(A, theta)
    m = np.arange(1, 200000)
    s = m * m * gb_summand(p, m)
    assert np.all(np.diff(s) >= -1e-12 * s[1:])
    assert np.all(s <= 2 * A * A / theta ** 2 * (1 + 1e-12))


@pytest.mark.parametrize("A,theta", GRID)
def test_direct_brackets_8pi(A, theta):
    res = gb_direct(SphereParams(A, theta), 10 ** 5)
    assert res.brackets(EIGHT_PI)
    assert abs(res.value - EIGHT_PI) <= res.tail_bound


def test_direct_examples():
    res = gb_direct(SphereParams(1, 0.1), 10 ** 6)
    assert abs(res.value - EIGHT_PI) <= 1e-6
    empty = gb_direct(SphereParams(1, 0.1), 0)
    assert empty.partial == 0 and empty.tail_bound >= EIGHT_PI
    assert empty.brackets(EIGHT_PI)
    one = gb_direct(SphereParams(1, 0.1), 1)
    assert one.brackets(EIGHT_PI)


def test_tail_bound_shrinks_at_least_like_one_over_n():
    p = SphereParams(1, 0.1)
    bounds = [gb_direct(p, n).tail_bound for n in (10 ** 3, 10 ** 4, 10 ** 5)]
    assert bounds[1] <= bounds[0] / 10 and bounds[2] <= bounds[1] / 10


@pytest.mark.parametrize("A,theta", GRID)
def test_telescoped_matches_direct(A, theta):
    p = SphereParams(A, theta)
    for m in (0, 1, 10, 100, 5000):
        assert abs(gb_telescoped(p, m) - gb_direct(p, m + 1).partial) <= 1e-12 * EIGHT_PI


def test_telescoped_level_zero():
    A, th = 1.0, 0.1
    p = SphereParams(A, th)
    B = [float(b_level(p, j)) for j in range(3)]
    val = 4 * math.pi * ((A * A - th) * (B[0] - B[1]) + (A * A + th) * (B[1] - B[2]))
    assert gb_telescoped(p, 0) == pytest.approx(val, rel=1e-15)
    assert gb_telescoped(p, 0) == pytest.approx(2 * math.pi * th * gb_term(p, 0).value, rel=1e-14)


@pytest.mark.parametrize("A,theta", [(1, 0.1), (2, 0.3), (5, 1.0)])
def test_limit_is_8pi(A, theta):
    assert gb_limit(SphereParams(A, theta)) == 25.132741228718345


def test_limit_near_edge_warns_and_errors():
    with pytest.warns(NearSingularWarning):
        assert gb_limit(SphereParams(1.0, 0.49999)) == pytest.approx(EIGHT_PI, rel=1e-15)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gb_limit(SphereParams(1.0, 0.3))
    with pytest.raises(ParameterWindowError):
        gb_limit(SphereParams(1.0, 0.1, half_dim=2))
    with pytest.raises(ParameterWindowError):
        gb_direct(SphereParams(1.0, 0.1, half_dim=2), 10)
    with pytest.raises(ValueError):
        gb_direct(SphereParams(1.0, 0.1), -1)
