"""Canard-point normal form: rescaling factors and the criticality quantity A.

The sign of A at a canard point decides whether the singular Hopf
bifurcation there is supercritical (A < 0) or subcritical (A > 0).
All derivatives come from the closed forms in :mod:`bzcanard.critical`.
"""
from dataclasses import dataclass
import enum
import math

import numpy as np

from .critical import ShapeClass, curve_derivatives, curve_value, fold_points, q_star
from .errors import DegenerateFold, DomainError, SignChangeNotFound

DEGENERATE_C2_TOL = 1e-10
DEGENERATE_A_TOL = 1e-8

_QSS_BRACKET_LO = 0.01
_QSS_BRACKET_HI_OFFSET = 1e-4
_QSS_SCAN_STEP = 1e-4


class Criticality(str, enum.Enum):
    SUPERCRITICAL = "SUPERCRITICAL"
    SUBCRITICAL = "SUBCRITICAL"
    DEGENERATE = "DEGENERATE"


class Fold(str, enum.Enum):
    MIN = "MIN"
    MAX = "MAX"


@dataclass(frozen=True)
class RescaleFactors:
    alpha: float
    beta: float
    eta: float
    xi: float


@dataclass(frozen=True)
class CanardReport:
    q: float
    x_star: float
    alpha: float
    beta: float
    eta: float
    xi: float
    a2: float
    a3: float
    a4: float
    a5: float
    A: float
    criticality: Criticality


def _setup(q, x):
    if not q < x < 1.0:
        raise DomainError(f"need q < x_star < 1, got q={q!r}, x_star={x!r}")
    c = curve_value(q, x)
    c2 = curve_derivatives(q, x, 2)
    if abs(c2) < DEGENERATE_C2_TOL:
        raise DegenerateFold(f"C''(x_star) = {c2!r} vanishes (q near q*)")
    f_star = c / x
    s = math.sqrt((x * x - q * q) * f_star)
    return c, c2, f_star, s


def rescale_factors(q, x_star):
    """Factors ``(alpha, beta, eta, xi)`` normalising the canard normal form."""
    x = x_star
    _, c2, f_star, s = _setup(q, x)
    den = c2 * (x - q)
    return RescaleFactors(
        alpha=2.0 * s / den,
        beta=2.0 * f_star * (q + x) / den,
        eta=2.0 * f_star * s / (den * x),
        xi=1.0 / s,
    )


def normal_form_coefficients(q, x_star):
    """``(a2, a3, a4, a5)`` of the rescaled normal form at ``x_star``."""
    x = x_star
    c2 = curve_derivatives(q, x, 2)
    c3 = curve_derivatives(q, x, 3)
    r = rescale_factors(q, x)
    a2 = r.alpha / (x - q)
    a3 = (1.0 / (x - q) + c3 / (3.0 * c2)) * r.alpha
    a4 = r.alpha / (q + x)
    a5 = -(q + x) * r.xi
    return a2, a3, a4, a5


def quantity_A_from_coefficients(q, x_star):
    a2, a3, a4, a5 = normal_form_coefficients(q, x_star)
    return -a2 + 3.0 * a3 - 2.0 * a4 - 2.0 * a5


def quantity_A(q, x_star):
    """Closed form of A at an equilibrium sitting at ``x_star``."""
    x = x_star
    c, c2, _, s = _setup(q, x)
    c3 = curve_derivatives(q, x, 3)
    bracket = 2.0 / (x - q) + c3 / c2 - 2.0 / (x + q) + x * c2 / c
    return bracket * 2.0 * s / (c2 * (x - q))


def _criticality(A):
    if abs(A) < DEGENERATE_A_TOL:
        return Criticality.DEGENERATE
    return Criticality.SUPERCRITICAL if A < 0 else Criticality.SUBCRITICAL


def _fold_x(q, fold):
    rep = fold_points(q)
    if rep.shape_class is not ShapeClass.S_SHAPED:
        raise DomainError(f"folds need 0 < q < q*, got q={q!r}")
    return rep.x1 if Fold(fold) is Fold.MIN else rep.x2


def canard_report(q, fold):
    """Full normal-form data at the minimum (``MIN``) or maximum (``MAX``) fold."""
    x = _fold_x(q, fold)
    r = rescale_factors(q, x)
    a2, a3, a4, a5 = normal_form_coefficients(q, x)
    A = quantity_A(q, x)
    return CanardReport(q, x, r.alpha, r.beta, r.eta, r.xi, a2, a3, a4, a5, A, _criticality(A))


def A_at_fold(q, fold):
    return quantity_A(q, _fold_x(q, fold))


def hopf_criticality(q, fold):
    return _criticality(A_at_fold(q, fold))


def q_double_star(tol=1e-10):
    """The q at which A at the maximum fold changes sign.

    A grid pre-scan locates the crossing on ``[0.01, q* - 1e-4]``; bisection
    then runs until ``|A| < tol`` or the bracket cannot be split further.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    lo, hi = _QSS_BRACKET_LO, q_star() - _QSS_BRACKET_HI_OFFSET
    grid = np.arange(lo, hi, _QSS_SCAN_STEP)
    vals = np.array([A_at_fold(g, Fold.MAX) for g in grid])
    changes = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    if len(changes) != 1:
        raise SignChangeNotFound(
            f"expected one sign change of A(x2(q)) on [{lo}, {hi}], found {len(changes)}")
    i = changes[0]
    a, b = float(grid[i]), float(grid[i + 1])
    fa = vals[i]
    while True:
        m = 0.5 * (a + b)
        fm = A_at_fold(m, Fold.MAX)
        if abs(fm) < tol or m in (a, b):
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
