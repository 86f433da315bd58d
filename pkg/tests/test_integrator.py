import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.integrate import solve_ivp
from scipy.spatial import cKDTree

from bzcanard.cycles import find_limit_cycle, return_section
from bzcanard.equilibrium import equilibrium
from bzcanard.errors import DomainError, NoCrossing, ParamsError
from bzcanard.integrator import (Direction, Formulation, IntegratorOptions, Section, Termination,
                                 integrate, integrate_to_section)
from bzcanard.model import Params, fast_field, polynomial_field


def scipy_end(p, s0, T, form="poly", sign=1.0, method="DOP853"):
    field = polynomial_field if form == "poly" else fast_field
    sol = solve_ivp(lambda t, s: [sign * v for v in field(p, s)], (0, T), list(s0),
                    method=method, rtol=1e-12, atol=1e-14)
    assert sol.success
    return sol.y[:, -1]


def densify(P, step=2e-6):
    seg = np.diff(P, axis=0)
    L = np.hypot(seg[:, 0], seg[:, 1])
    out = [P[:1]]
    for a, s, l in zip(P[:-1], seg, L):
        n = max(1, int(np.ceil(l / step)))
        out.append(a + s * (np.arange(1, n + 1) / n)[:, None])
    return np.vstack(out)


def hausdorff(A, B):
    Ad, Bd = densify(A), densify(B)
    return max(cKDTree(Bd).query(A)[0].max(), cKDTree(Ad).query(B)[0].max())


def test_options_validation():
    for bad in (0.0, 1e-3, -1.0):
        with pytest.raises(ParamsError):
            IntegratorOptions(rel_tol=bad)
    with pytest.raises(ParamsError):
        IntegratorOptions(abs_tol=0.0)
    o = IntegratorOptions(formulation="FAST_TIME")
    assert o.formulation is Formulation.FAST_TIME
    assert IntegratorOptions().formulation is Formulation.POLYNOMIAL_TIME


def test_simulation_requires_slow_fast_eps():
    with pytest.raises(ParamsError):
        integrate(Params(1, 0.5, 0.5), (0.3, 0.3), t_end=1.0)


def test_section_validation():
    with pytest.raises(ValueError):
        Section("z", 0.1)
    with pytest.raises(ValueError):
        Section("x", math.inf)
    with pytest.raises(ValueError):
        Section("x", 0.1, direction=2)
    with pytest.raises(ValueError):
        integrate_to_section(Params(1, 0.5, 0.01), (0.3, 0.3), Section("x", 0.2), 0)


@pytest.mark.parametrize("form", ["poly", "fast"])
@pytest.mark.parametrize("p,s0,T", [
    (Params(1.0, 0.5, 0.05), (0.3, 0.6), 20.0),
    (Params(1.5, 0.07, 1e-4), (0.4, 0.3379 / 1.5), 50.0),
    (Params(0.59, 0.02, 0.01), (0.4, 0.35 / 0.59), 300.0),
])
def test_matches_scipy(form, p, s0, T):
    opts = IntegratorOptions(rel_tol=1e-11, abs_tol=1e-14,
                             formulation="POLYNOMIAL_TIME" if form == "poly" else "FAST_TIME")
    tr = integrate(p, s0, opts=opts, t_end=T)
    assert tr.termination is Termination.TIME_REACHED
    assert tr.t[-1] == pytest.approx(T, rel=1e-14)
    ref = scipy_end(p, s0, T, form)
    assert np.allclose(tr.final, ref, atol=1e-8, rtol=0)


def test_backward_matches_scipy_and_time_decreases():
    p = Params(1.0, 0.5, 0.05)
    tr = integrate(p, (0.3, 0.6), Direction.BACKWARD, t_end=2.0)
    assert np.all(np.diff(tr.t) < 0) and tr.t[0] == 0.0
    assert tr.t[-1] == pytest.approx(-2.0, rel=1e-14)
    assert np.allclose(tr.final, scipy_end(p, (0.3, 0.6), 2.0, sign=-1.0), atol=1e-8)


def test_forward_time_strictly_increasing_and_readonly():
    tr = integrate(Params(1.5, 0.07, 1e-4), (0.4, 0.2), t_end=100.0)
    assert np.all(np.diff(tr.t) > 0)
    with pytest.raises(ValueError):
        tr.x[0] = 1.0


def test_equilibrium_start_is_stationary():
    for p in (Params(1.5, 0.07, 1e-4), Params(1, 0.5, 0.01), Params(2, 1, 0.01)):
        x = equilibrium(p)
        tr = integrate(p, (x, x), t_end=1e3)
        assert np.max(np.abs(tr.x - x)) < 1e-9 and np.max(np.abs(tr.y - x)) < 1e-9


def test_halving_tolerance_is_consistent_with_error_estimate():
    p, s0, T = Params(0.59, 0.02, 0.01), (0.4, 0.35 / 0.59), 500.0
    end = lambda r: np.array(integrate(p, s0, opts=IntegratorOptions(rel_tol=r), t_end=T).final)
    a, b, ref = end(1e-8), end(5e-9), end(1e-12)
    est = np.max(np.abs(a - ref))
    assert np.max(np.abs(a - b)) < 10 * max(est, 1e-15)


def test_step_limit_and_blowup():
    tr = integrate(Params(1.5, 0.07, 1e-4), (0.4, 0.2),
                   opts=IntegratorOptions(max_steps=10), t_end=1e4)
    assert tr.termination is Termination.STEP_LIMIT
    # past the cycle fold no cycle remains; backward orbits leave to large x
    p = Params(0.571, 0.02, 0.01)
    x = equilibrium(p)
    tr = integrate(p, (x + 1e-3, x), Direction.BACKWARD, t_end=1e7)
    assert tr.termination is Termination.BLOWUP
    assert tr.x[-1] > 1e6 or tr.x[-1] > 100


def test_section_events_refined_and_direction_filtered():
    p = Params(1.5, 0.07, 1e-4)
    xs = equilibrium(p)
    sec = return_section(xs)
    ev = integrate_to_section(p, (0.4, 0.3379 / 1.5), sec, 6)
    assert len(ev) == 6
    assert all(e.residual < 1e-10 and e.y < xs for e in ev)
    assert all(t1 > t0 for t0, t1 in zip([e.t for e in ev], [e.t for e in ev][1:]))
    # the relaxation cycle attracts strongly: returns settle after one lap
    d = np.abs(np.diff([e.y for e in ev]))
    assert d[0] < 1e-3 and max(d[1:]) < 1e-9
    # the start point on the section is not a crossing
    first = integrate_to_section(p, (xs, ev[-1].y), sec, 1)[0]
    assert first.t > 1.0
    assert first.y == pytest.approx(ev[-1].y, abs=1e-9)


def test_two_sided_section_counts_two_per_period():
    p = Params(1.5, 0.07, 1e-4)
    xs = equilibrium(p)
    one = integrate_to_section(p, (0.4, 0.3379 / 1.5), return_section(xs), 3)
    start = (xs, one[-1].y)
    both = integrate_to_section(p, start, Section("x", xs, 0), 4)
    period = integrate_to_section(p, start, return_section(xs), 1)[0].t
    assert both[1].t == pytest.approx(period, rel=1e-8)
    assert both[3].t == pytest.approx(2 * period, rel=1e-7)


def test_no_crossing_raises():
    p = Params(1, 0.5, 0.01)
    x = equilibrium(p)
    with pytest.raises(NoCrossing):
        integrate_to_section(p, (x, x), Section("x", 0.9), 1, t_end=100.0)


def test_unbounded_horizon_needs_section():
    with pytest.raises(ValueError):
        integrate(Params(1, 0.5, 0.01), (0.3, 0.3))


def test_pole_start_raises_domain_error():
    with pytest.raises(DomainError):
        integrate(Params(1, 0.5, 0.01), (-0.5, 0.1),
                  opts=IntegratorOptions(formulation="FAST_TIME"), t_end=1.0)


# invariants of the integrator


def test_self_convergence_over_one_period():
    p, s0 = Params(0.59, 0.02, 0.01), (0.4, 0.35 / 0.59)
    T = find_limit_cycle(p, seed=s0).period
    a, b = (integrate(p, s0, opts=IntegratorOptions(rel_tol=r), t_end=T).final
            for r in (1e-8, 1e-10))
    assert np.max(np.abs(np.subtract(a, b))) < 1e-6


def test_formulations_trace_the_same_cycle():
    p = Params(0.59, 0.02, 0.01)
    cyc = find_limit_cycle(p)
    xs = equilibrium(p)
    start = (xs, cyc.section_fixed_point)
    orbits = []
    for form in Formulation:
        o = IntegratorOptions(formulation=form, max_step=0.05)
        tr = integrate(p, start, opts=o, section=return_section(xs), t_end=1e6)
        assert tr.termination is Termination.EVENT
        orbits.append(np.column_stack([tr.x, tr.y]))
    assert hausdorff(*orbits) < 1e-5


def test_backward_forward_roundtrip():
    p = Params(1, 0.5, 0.05)
    s0 = (0.3, 0.6)
    b = integrate(p, s0, Direction.BACKWARD, t_end=1.0).final
    f = integrate(p, b, t_end=1.0).final
    assert np.max(np.abs(np.subtract(f, s0))) < 1e-6


@settings(max_examples=30)
@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_roundtrip_random_points(x0, y0):
    p = Params(1, 0.5, 0.05)
    back = integrate(p, (x0, y0), Direction.BACKWARD, t_end=1.0)
    # reversed time repels from the attracting branch; some starts escape
    assume(back.termination is Termination.TIME_REACHED)
    f = integrate(p, back.final, t_end=1.0).final
    assert np.max(np.abs(np.subtract(f, (x0, y0)))) < 1e-6
