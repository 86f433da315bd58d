import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bzcanard.equilibrium import equilibrium
from bzcanard.errors import DomainError, ParamsError
from bzcanard.model import (Params, State, fast_field, h_factor, h_factor_prime, jacobian,
                            polynomial_field, slow_field)

pos = st.floats(0.01, 3.0)
unit = st.floats(1e-3, 1.0)


@pytest.mark.parametrize("f,q,eps", [(0, 1, 1), (1, -1, 1), (1, 1, 0), (math.nan, 1, 1),
                                     (1, math.inf, 1)])
def test_params_rejects_non_positive(f, q, eps):
    with pytest.raises(ParamsError):
        Params(f, q, eps)


def test_params_allows_large_eps_for_analysis_only():
    p = Params(1, 0.5, 0.5)
    with pytest.raises(ParamsError):
        p.require_slow_fast()
    assert Params(1, 0.5, 0.1).require_slow_fast() is not None


def test_state_validation():
    with pytest.raises(ParamsError):
        State(-0.1, 0.2)
    with pytest.raises(ParamsError):
        State(0.1, math.nan)
    assert tuple(State(0.1, 0.2)) == (0.1, 0.2)


def test_fast_field_worked_value():
    # hand arithmetic: 0.25 + (-0.43/0.57) * 0.5
    dx, dy = fast_field(Params(1, 0.07, 1e-4), (0.5, 0.5))
    assert dx == pytest.approx(0.25 - 0.43 / 0.57 * 0.5, rel=1e-14)
    assert dx == pytest.approx(-0.127193, abs=1e-6)
    assert dy == 0.0


def test_polynomial_field_worked_value():
    dx, dy = polynomial_field(Params(1, 0.07, 1e-4), (0.5, 0.5))
    assert dx == pytest.approx(0.5 * 0.5 * 0.57 - 0.43 * 0.5, rel=1e-14)
    assert dx == pytest.approx(-0.0725, abs=1e-12)
    assert dy == 0.0


def test_polynomial_field_origin_and_q1_equilibrium():
    assert polynomial_field(Params(1.3, 0.2, 0.01), (0.0, 0.0)) == (0.0, 0.0)
    assert fast_field(Params(1, 1, 0.01), (1, 1)) == (0.0, 0.0)


def test_slow_field_is_fast_over_eps():
    p = Params(1.2, 0.3, 0.02)
    fx, fy = fast_field(p, (0.4, 0.3))
    sx, sy = slow_field(p, (0.4, 0.3))
    assert (sx, sy) == pytest.approx((fx / 0.02, fy / 0.02), rel=1e-15)


def test_h_factor_examples():
    assert h_factor(Params(2, 0.5, 0.01), 1.5) == -1.0
    assert h_factor(Params(1, 0.3, 0.01), 0.3) == 0.0
    v = h_factor(Params(1, 0.07, 0.01), 0.07 + 1e-12)
    assert v < 0 and v == pytest.approx(-1e-12 / 0.14, rel=1e-3)


def test_pole_raises_domain_error():
    with pytest.raises(DomainError):
        h_factor(Params(1, 0.5, 0.01), -0.5)
    with pytest.raises(DomainError):
        fast_field(Params(1, 0.5, 0.01), (-0.5, 0.1))


def test_jacobian_matches_finite_differences_worked_point():
    p = Params(1, 0.07, 0.01)
    J = jacobian(p, (0.3, 0.4))
    d = 1e-6
    num = np.empty((2, 2))
    for j, e in enumerate([(d, 0), (0, d)]):
        a = np.array(fast_field(p, (0.3 + e[0], 0.4 + e[1])))
        b = np.array(fast_field(p, (0.3 - e[0], 0.4 - e[1])))
        num[:, j] = (a - b) / (2 * d)
    assert np.allclose(J, num, atol=1e-6, rtol=0)


def test_jacobian_q1_spectrum():
    for f in (0.5, 1.0, 2.0):
        lam = np.sort(np.linalg.eigvals(jacobian(Params(f, 1, 0.01), (1, 1))).real)
        assert lam == pytest.approx(sorted([-(1 + f / 2), -0.01]), abs=1e-14)


@given(pos, pos, st.floats(1e-4, 0.1))
def test_det_product_identity(f, q, eps):
    p = Params(f, q, eps)
    x = equilibrium(p)
    J = jacobian(p, (x, x))
    # at E* the rate factor is h = -(1 - x*); the product identity uses its magnitude
    assert h_factor(p, x) == pytest.approx(-(1 - x), rel=1e-9, abs=1e-12)
    expected = -eps * (1 - 2 * x + h_factor_prime(p, x) * x - (1 - x))
    assert np.linalg.det(J) == pytest.approx(expected, rel=1e-9, abs=1e-13)


@given(pos, pos, st.floats(1e-4, 0.1), unit, unit)
def test_polynomial_is_rescaled_fast_field(f, q, eps, x, y):
    p = Params(f, q, eps)
    fx, fy = fast_field(p, (x, y))
    px, py = polynomial_field(p, (x, y))
    assert px == pytest.approx((q + x) * fx, rel=1e-12, abs=1e-15)
    assert py == pytest.approx((q + x) * fy, rel=1e-12, abs=1e-18)


CAMPAIGNS = [Params(1.5, 0.07, 1e-4), Params(0.899, 0.07, 1e-4), Params(0.59, 0.02, 0.01),
             Params(2.18, 0.02, 0.01), Params(1, 0.5, 0.01), Params(2, 1, 0.01)]


@given(st.sampled_from(CAMPAIGNS), unit, unit)
def test_jacobian_matches_central_differences(p, x, y):
    J = jacobian(p, (x, y))
    d = 1e-6
    for j, e in enumerate([(d, 0), (0, d)]):
        a = np.array(fast_field(p, (x + e[0], y + e[1])))
        b = np.array(fast_field(p, (x - e[0], y - e[1])))
        assert np.allclose(J[:, j], (a - b) / (2 * d), atol=1e-6, rtol=0)


@given(pos, pos, st.floats(1e-4, 0.1), unit, unit)
def test_jacobian_matches_scaled_differences(f, q, eps, x, y):
    # step shrinks with the distance to the pole at x = -q
    p = Params(f, q, eps)
    J = jacobian(p, (x, y))
    d = 1e-6 * (q + x)
    for j, e in enumerate([(d, 0), (0, d)]):
        a = np.array(fast_field(p, (x + e[0], y + e[1])))
        b = np.array(fast_field(p, (x - e[0], y - e[1])))
        fd = (a - b) / (2 * d)
        assert np.all(np.abs(J[:, j] - fd) <= 1e-6 * max(1.0, np.max(np.abs(J))))


@given(pos, pos)
def test_field_vanishes_at_equilibrium(f, q):
    p = Params(f, q, 0.01)
    x = equilibrium(p)
    dx, dy = fast_field(p, (x, x))
    assert abs(dx) < 1e-13 and dy == 0.0
