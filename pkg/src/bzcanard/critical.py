"""Geometry of the critical curve y = C(x) and its folds.

The f-free curve ``Chat(x) = x(1-x)(q+x)/(x-q)`` is used for everything
except plotting; the f-scaled curve of the fast system is ``Chat / f``.
"""
from dataclasses import dataclass
import enum
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError

SHAPE_TIE_TOL = 1e-12

_GRID_POINTS = 512
_GRID_MARGIN = 1e-9
_BISECT_ITERS = 80


class ShapeClass(str, enum.Enum):
    S_SHAPED = "S_SHAPED"
    DEGENERATE = "DEGENERATE"
    MONOTONE_DECREASING = "MONOTONE_DECREASING"
    LINE_PLUS_PARABOLA = "LINE_PLUS_PARABOLA"
    MONOTONE_INCREASING = "MONOTONE_INCREASING"


def q_star():
    """Threshold on q below which the critical curve has two folds."""
    return -0.2 + 0.6 * 2.0 ** (1.0 / 3.0) - 0.3 * 2.0 ** (2.0 / 3.0)


@dataclass(frozen=True)
class FoldCubic:
    """Numerator ``N(x) = -2x^3 + (1+2q)x^2 + 2q(q-1)x - q^2`` of C'(x)."""

    q: float

    @property
    def coefficients(self):
        q = self.q
        return np.array([-2.0, 1.0 + 2.0 * q, 2.0 * q * (q - 1.0), -q * q])

    def __call__(self, x):
        q = self.q
        return ((-2.0 * x + (1.0 + 2.0 * q)) * x + 2.0 * q * (q - 1.0)) * x - q * q

    def deriv(self, x):
        q = self.q
        return (-6.0 * x + 2.0 * (1.0 + 2.0 * q)) * x + 2.0 * q * (q - 1.0)

    def stationary_points(self):
        """Real zeros of N', ascending."""
        q = self.q
        a, b, c = -6.0, 2.0 * (1.0 + 2.0 * q), 2.0 * q * (q - 1.0)
        disc = b * b - 4.0 * a * c
        if disc < 0:
            return []
        r = math.sqrt(disc)
        return sorted(((-b + r) / (2 * a), (-b - r) / (2 * a)))


def _pole(q, x):
    d = x - q
    if d == 0.0:
        raise DomainError(f"critical curve has a pole at x = q = {q!r}")
    return d


def curve_value(q, x, f=None):
    """``C(x)`` when ``f`` is given, otherwise the f-free ``Chat(x)``."""
    d = _pole(q, x)
    c = x * (1.0 - x) * (q + x) / d
    return c if f is None else c / f


def curve_derivatives(q, x, order, f=None):
    """Closed-form first, second or third derivative of the critical curve."""
    d = _pole(q, x)
    if order == 1:
        val = FoldCubic(q)(x) / (d * d)
    elif order == 2:
        val = -2.0 + 4.0 * q * q * (1.0 - q) / d ** 3
    elif order == 3:
        val = 12.0 * q * q * (q - 1.0) / d ** 4
    else:
        raise ValueError(f"order must be 1, 2 or 3, got {order!r}")
    return val if f is None else val / f


def classify_shape(q):
    qs = q_star()
    if abs(q - 1.0) <= SHAPE_TIE_TOL:
        return ShapeClass.LINE_PLUS_PARABOLA
    if q > 1.0:
        return ShapeClass.MONOTONE_INCREASING
    if abs(q - qs) <= SHAPE_TIE_TOL:
        return ShapeClass.DEGENERATE
    if q < qs:
        return ShapeClass.S_SHAPED
    return ShapeClass.MONOTONE_DECREASING


@dataclass(frozen=True)
class FoldReport:
    q: float
    shape_class: ShapeClass
    x1: float = None
    x2: float = None
    x0: float = None
    y1: float = None
    y2: float = None

    @property
    def fold_count(self):
        return {ShapeClass.S_SHAPED: 2, ShapeClass.DEGENERATE: 1}.get(self.shape_class, 0)


def _bisect(fn, a, b, fa, iters=_BISECT_ITERS):
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = fn(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def cubic_roots_in(q, lo, hi):
    """Roots of the fold cubic in ``(lo, hi)`` by bracketed bisection.

    The scan grid is augmented with the stationary points of the cubic so
    that a pair of nearly coincident roots is never missed.
    """
    N = FoldCubic(q)
    grid = np.linspace(lo, hi, _GRID_POINTS)
    extra = [s for s in N.stationary_points() if lo < s < hi]
    grid = np.unique(np.concatenate([grid, extra]))
    vals = np.array([N(g) for g in grid])
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0:
            r = _bisect(N, float(a), float(b), float(fa))
            dn = N.deriv(r)
            if dn != 0.0:
                polished = r - N(r) / dn
                if a <= polished <= b and abs(N(polished)) <= abs(N(r)):
                    r = polished
            roots.append(r)
    return roots


def fold_points(q):
    """Folds of the critical curve on ``(q, 1)`` and the shape class."""
    if not q > 0:
        raise DomainError(f"q must be positive, got {q!r}")
    shape = classify_shape(q)
    if shape is ShapeClass.DEGENERATE:
        # Bisection cannot see a tangential root; minimise |N| instead, then
        # snap to the zero of N' it approximates (|N| is flat there).
        N = FoldCubic(q)
        s = max(N.stationary_points())
        res = minimize_scalar(lambda x: abs(N(x)), bracket=(s - 0.05, s, s + 0.05),
                              method="golden", tol=1e-12)
        x0 = min(N.stationary_points(), key=lambda r: abs(r - res.x))
        return FoldReport(q, shape, x0=x0, y1=curve_value(q, x0), y2=curve_value(q, x0))
    if shape is not ShapeClass.S_SHAPED:
        return FoldReport(q, shape)
    roots = cubic_roots_in(q, q + _GRID_MARGIN, 1.0 - _GRID_MARGIN)
    if len(roots) != 2:
        raise DomainError(f"expected two folds for q={q!r} < q*, found {len(roots)}")
    x1, x2 = roots
    return FoldReport(q, shape, x1=x1, x2=x2,
                      y1=curve_value(q, x1), y2=curve_value(q, x2))


def branch(report, x):
    """Name of the critical-curve branch (``S_l``, ``S_m``, ``S_r``) containing x."""
    if report.shape_class is not ShapeClass.S_SHAPED:
        raise ValueError("branches are only defined for an S-shaped curve")
    if x < report.x1:
        return "S_l"
    if x <= report.x2:
        return "S_m"
    return "S_r"


def landing_points(report):
    """Where the fast fibres through the folds land on the outer branches.

    Returns ``(x_left, x_right)``: the point of S_l at the height of the
    maximum M and the point of S_r at the height of the minimum m.
    """
    q, x1, x2 = report.q, report.x1, report.x2
    N = lambda target: (lambda x: curve_value(q, x) - target)
    gl = N(report.y2)
    gr = N(report.y1)
    lo, hi = q + _GRID_MARGIN, x1
    x_left = _bisect(gl, lo, hi, gl(lo), iters=200)
    lo, hi = x2, 1.0
    x_right = _bisect(gr, lo, hi, gr(lo), iters=200)
    return x_left, x_right
