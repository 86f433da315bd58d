"""Positive equilibrium, its spectrum, and the singular Hopf points."""
from dataclasses import dataclass
import enum
import math

from scipy.optimize import minimize_scalar

from .critical import FoldCubic, ShapeClass, classify_shape, fold_points
from .errors import DomainError, NoHopfRoots
from .model import jacobian

WEAK_FOCUS_TOL = 1e-10
HOPF_LOCATION_TOL = 1e-10
DISCRIMINANT_TOL = 1e-12
_HOPF_BISECT_ITERS = 100


class Stability(str, enum.Enum):
    STABLE_NODE = "STABLE_NODE"
    STABLE_FOCUS = "STABLE_FOCUS"
    UNSTABLE_NODE = "UNSTABLE_NODE"
    UNSTABLE_FOCUS = "UNSTABLE_FOCUS"
    WEAK_FOCUS = "WEAK_FOCUS"


class Regime(str, enum.Enum):
    GLOBALLY_STABLE = "GLOBALLY_STABLE"
    OSCILLATORY = "OSCILLATORY"
    HOPF_CRITICAL = "HOPF_CRITICAL"


def equilibrium_x(f, q):
    """Positive root of ``x^2 + (q+f-1) x - q(1+f) = 0``."""
    b = q + f - 1.0
    disc = math.sqrt(b * b + 4.0 * q * (1.0 + f))
    if b <= 0:
        return 0.5 * (-b + disc)
    # Product-of-roots form avoids cancellation when b > 0.
    return 2.0 * q * (1.0 + f) / (b + disc)


def equilibrium(p):
    """x-coordinate of the unique positive equilibrium ``E* = (x*, x*)``."""
    return equilibrium_x(p.f, p.q)


def strip(q):
    if q < 1.0:
        return "(q,1)"
    if q > 1.0:
        return "(1,q)"
    return "x=1"


def f_for_equilibrium(q, x):
    """The unique f that places the equilibrium at ``x`` (``q < x < 1``)."""
    if not q < x < 1.0:
        raise DomainError(f"need q < x < 1, got q={q!r}, x={x!r}")
    return (1.0 - x) * (q + x) / (x - q)


def trace_w(q, eps, x):
    """``w = h C' + eps``; minus the trace of the Jacobian at ``(x, x)``.

    Written through the fold cubic so that f drops out.
    """
    den = (q + x) * (x - q)
    if den == 0.0:
        raise DomainError(f"trace function has a pole at x = +-q (x={x!r}, q={q!r})")
    return eps - FoldCubic(q)(x) / den


def eigenvalues(p, x=None):
    """Eigenvalues at the equilibrium from the closed-form radical.

    With ``a = h C'`` written as minus the (1,1) Jacobian entry the radical
    stays well conditioned next to the pole of ``C'``. Returns
    ``(lambda_plus, lambda_minus)`` as complex numbers.
    """
    if x is None:
        x = equilibrium(p)
    (j11, h), _ = jacobian(p, (x, x)).tolist()
    if h == 0.0:
        # triangular: the diagonal is the spectrum, exactly
        return complex(max(j11, -p.eps)), complex(min(j11, -p.eps))
    w = p.eps - j11                     # h C' + eps
    det = -p.eps * (j11 + h)            # (C' - 1) h eps
    disc = w * w - 4.0 * det
    if disc < 0.0:
        r = 1j * math.sqrt(-disc)
        return (-w + r) / 2.0, (-w - r) / 2.0
    big = -0.5 * (w + math.copysign(math.sqrt(disc), w))
    small = det / big if big != 0.0 else 0.0
    return complex(max(big, small)), complex(min(big, small))


@dataclass(frozen=True)
class HopfData:
    q: float
    eps: float
    x1_eps: float
    x2_eps: float
    d1: float
    d2: float
    f_hm: float
    f_hM: float


def hopf_points(q, eps):
    """Zeros of the trace function next to each fold (singular Hopf points)."""
    folds = fold_points(q)
    if folds.shape_class is not ShapeClass.S_SHAPED:
        raise DomainError(f"Hopf points need 0 < q < q*, got q={q!r}")
    x1, x2 = folds.x1, folds.x2
    w = lambda x: trace_w(q, eps, x)
    res = minimize_scalar(w, bounds=(x1, x2), method="bounded",
                          options={"xatol": 1e-12})
    xm, wm = float(res.x), float(res.fun)
    if wm >= 0.0:
        raise NoHopfRoots(
            f"eps={eps!r} too large for q={q!r}: the trace never changes sign",
            threshold=eps - wm)

    def root(a, b):
        wa = w(a)
        for _ in range(_HOPF_BISECT_ITERS):
            m = 0.5 * (a + b)
            wm_ = w(m)
            if (wm_ > 0) == (wa > 0):
                a, wa = m, wm_
            else:
                b = m
        return 0.5 * (a + b)

    x1e = root(x1, xm)
    x2e = root(x2, xm)
    return HopfData(q, eps, x1e, x2e, x1e - x1, x2 - x2e,
                    f_for_equilibrium(q, x1e), f_for_equilibrium(q, x2e))


@dataclass(frozen=True)
class EquilibriumReport:
    x_star: float
    strip: str
    eigenvalues: tuple
    w_value: float
    stability: Stability
    regime: Regime


def _stability(lams, w):
    l1, l2 = lams
    disc = ((l1 - l2) ** 2).real
    focus = disc < -DISCRIMINANT_TOL
    if focus and abs(w) < WEAK_FOCUS_TOL:
        return Stability.WEAK_FOCUS
    stable = max(l1.real, l2.real) < 0
    if focus:
        return Stability.STABLE_FOCUS if stable else Stability.UNSTABLE_FOCUS
    return Stability.STABLE_NODE if stable else Stability.UNSTABLE_NODE


def classify(p):
    """Equilibrium location, spectrum, stability and dynamical regime."""
    x = equilibrium(p)
    lams = eigenvalues(p, x)
    w = -(lams[0] + lams[1]).real
    stab = _stability(lams, w)
    regime = Regime.GLOBALLY_STABLE
    if classify_shape(p.q) is ShapeClass.S_SHAPED:
        try:
            hd = hopf_points(p.q, p.eps)
        except NoHopfRoots:
            hd = None
        if hd is not None:
            if (abs(x - hd.x1_eps) <= HOPF_LOCATION_TOL
                    or abs(x - hd.x2_eps) <= HOPF_LOCATION_TOL):
                regime = Regime.HOPF_CRITICAL
            elif hd.x1_eps < x < hd.x2_eps:
                regime = Regime.OSCILLATORY
    return EquilibriumReport(x, strip(p.q), lams, w, stab, regime)

