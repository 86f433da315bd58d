import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bzcanard.canard import (Criticality, Fold, A_at_fold, canard_report, hopf_criticality,
                             normal_form_coefficients, q_double_star, quantity_A,
                             quantity_A_from_coefficients, rescale_factors)
from bzcanard.critical import curve_value, fold_points, q_star
from bzcanard.errors import DegenerateFold, DomainError

# A at the folds from an mpmath evaluation of the coefficient definitions
# with numerically differentiated curve (40 digits), frozen
A_ORACLE = {
    (0.07, "MIN"): -19.6874502188021, (0.07, "MAX"): -7.077759735828133,
    (0.02, "MIN"): -3.327642228150412, (0.02, "MAX"): 2.448287626525452,
}
Q_DOUBLE_STAR_ORACLE = 0.055513829276304057608

QS = q_star()


@pytest.mark.parametrize("key", sorted(A_ORACLE))
def test_A_against_oracle(key):
    q, fold = key
    assert A_at_fold(q, fold) == pytest.approx(A_ORACLE[key], rel=1e-12)


def test_A_published_values():
    got = sorted([A_at_fold(0.07, Fold.MIN), A_at_fold(0.07, Fold.MAX)])
    for a, b in zip(got, sorted([-19.69, -7.08])):
        assert abs(a - b) <= 0.02
    assert abs(A_at_fold(0.02, Fold.MIN) + 3.32) <= 0.02
    assert abs(A_at_fold(0.02, Fold.MAX) - 2.45) <= 0.02


def test_rescale_signs():
    rep = fold_points(0.07)
    r1 = rescale_factors(0.07, rep.x1)
    assert all(math.isfinite(v) for v in (r1.alpha, r1.beta, r1.eta, r1.xi))
    assert r1.alpha > 0 and r1.beta > 0 and r1.xi > 0
    r2 = rescale_factors(0.07, rep.x2)
    assert r2.alpha < 0 and r2.beta < 0 and r2.xi > 0


def test_xi_definition():
    q = 0.05
    for x in np.linspace(0.1, 0.9, 9):
        if abs(x - 0.3) < 0.05:
            continue
        expected = 1 / math.sqrt((x * x - q * q) * curve_value(q, x) / x)
        try:
            assert rescale_factors(q, x).xi == pytest.approx(expected, rel=1e-12)
        except DegenerateFold:
            pass


def test_degenerate_fold_near_q_star():
    rep = fold_points(QS)
    with pytest.raises(DegenerateFold):
        rescale_factors(QS, rep.x0)
    with pytest.raises(DomainError):
        rescale_factors(0.07, 0.05)
    with pytest.raises(DomainError):
        A_at_fold(0.5, Fold.MIN)


@given(st.floats(0.005, QS - 1e-3), st.floats(0.0, 1.0))
def test_closed_form_matches_coefficient_route(q, t):
    rep = fold_points(q)
    x = rep.x1 + t * (rep.x2 - rep.x1)
    try:
        a = quantity_A(q, x)
    except DegenerateFold:
        return
    b = quantity_A_from_coefficients(q, x)
    assert a == pytest.approx(b, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("q", [0.02, 0.04, 0.07])
def test_report_identity(q):
    for fold in Fold:
        r = canard_report(q, fold)
        assert r.A == pytest.approx(-r.a2 + 3 * r.a3 - 2 * r.a4 - 2 * r.a5, abs=1e-12,
                                    rel=1e-12)
        assert (r.a2, r.a3, r.a4, r.a5) == normal_form_coefficients(q, r.x_star)


def test_criticality_examples():
    assert hopf_criticality(0.07, Fold.MAX) is Criticality.SUPERCRITICAL
    assert hopf_criticality(0.02, Fold.MAX) is Criticality.SUBCRITICAL
    assert hopf_criticality(0.02, Fold.MIN) is Criticality.SUPERCRITICAL


def test_q_double_star():
    qss = q_double_star(1e-10)
    assert qss == pytest.approx(Q_DOUBLE_STAR_ORACLE, abs=1e-11)
    assert abs(qss - 0.05551) <= 5e-4
    assert abs(A_at_fold(qss, Fold.MAX)) < 1e-10
    assert A_at_fold(qss + 0.005, Fold.MAX) < 0 < A_at_fold(qss - 0.005, Fold.MAX)
    assert canard_report(qss, Fold.MAX).criticality is Criticality.DEGENERATE


def test_A_at_min_fold_always_negative():
    for q in np.linspace(0.005, QS - 1e-4, 50):
        assert A_at_fold(q, Fold.MIN) < 0


def test_single_sign_change_at_max_fold():
    grid = np.arange(0.01, QS - 1e-4, 1e-4)
    s = np.sign([A_at_fold(q, Fold.MAX) for q in grid])
    assert np.count_nonzero(np.diff(s)) == 1
