"""Adaptive initial-value integration of the BZ fields with section events.

The stepper is an embedded Dormand-Prince 5(4) pair with a PI step
controller. A local stiffness estimate caps each step so that it stays
inside the explicit stability region on the attracting slow branches. The polynomial-time formulation is the default:
its right-hand side has no pole and slows down near the y-axis.
"""
from dataclasses import dataclass, field
import enum
import math

import numpy as np

from . import _kernels as K
from .errors import DomainError, NoCrossing, ParamsError

BLOWUP_THRESHOLD = 1e6


class Formulation(str, enum.Enum):
    FAST_TIME = "FAST_TIME"
    POLYNOMIAL_TIME = "POLYNOMIAL_TIME"


class Direction(str, enum.Enum):
    FORWARD = "FORWARD"
    BACKWARD = "BACKWARD"


class Termination(str, enum.Enum):
    TIME_REACHED = "TIME_REACHED"
    EVENT = "EVENT"
    STEP_LIMIT = "STEP_LIMIT"
    BLOWUP = "BLOWUP"


_STATUS = {K.TIME_REACHED: Termination.TIME_REACHED, K.EVENT: Termination.EVENT,
           K.STEP_LIMIT: Termination.STEP_LIMIT, K.BLOWUP: Termination.BLOWUP}
_FORM = {Formulation.POLYNOMIAL_TIME: K.POLYNOMIAL, Formulation.FAST_TIME: K.FAST}


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_time: float = math.inf
    max_steps: int = 50_000_000
    formulation: Formulation = Formulation.POLYNOMIAL_TIME

    def __post_init__(self):
        if not 0 < self.rel_tol < 1e-3:
            raise ParamsError(f"rel_tol must lie in (0, 1e-3), got {self.rel_tol!r}")
        if not self.abs_tol > 0:
            raise ParamsError(f"abs_tol must be positive, got {self.abs_tol!r}")
        if not self.max_step > 0:
            raise ParamsError("max_step must be positive")
        object.__setattr__(self, "formulation", Formulation(self.formulation))


@dataclass(frozen=True)
class Section:
    """The line ``axis = level``, optionally restricted to a half-line.

    ``direction`` +1 / -1 keeps crossings where the section coordinate
    increases / decreases along the integration; 0 keeps both. ``below``
    or ``above`` restrict the other coordinate.
    """

    axis: str
    level: float
    direction: int = 0
    below: float = None
    above: float = None

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise ValueError("axis must be 'x' or 'y'")
        if self.direction not in (-1, 0, 1):
            raise ValueError("direction must be -1, 0 or +1")
        if not math.isfinite(self.level):
            raise ValueError("section level must be finite")
        if self.below is not None and self.above is not None:
            raise ValueError("give at most one of below / above")

    def _kernel_args(self):
        axis = 1 if self.axis == "x" else 2
        if self.below is not None:
            return axis, self.level, self.direction, -1, self.below
        if self.above is not None:
            return axis, self.level, self.direction, 1, self.above
        return axis, self.level, self.direction, 0, 0.0


@dataclass(frozen=True)
class SectionEvent:
    """A refined crossing; ``arc`` holds ``(xmin, xmax, ymin, ymax)`` of the
    orbit piece since the previous crossing (or the start)."""

    section: Section
    t: float
    x: float
    y: float
    arc: tuple = field(default=None, compare=False)

    @property
    def residual(self):
        c = self.x if self.section.axis == "x" else self.y
        return abs(c - self.section.level)


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    termination: Termination
    formulation: Formulation
    direction: Direction

    def __post_init__(self):
        for a in (self.t, self.x, self.y):
            a.flags.writeable = False

    def __len__(self):
        return len(self.t)

    @property
    def final(self):
        return float(self.x[-1]), float(self.y[-1])


@dataclass
class _RunResult:
    termination: Termination
    t: float
    x: float
    y: float
    h: float
    samples: np.ndarray
    crossings: np.ndarray


def _sign(direction):
    return 1.0 if Direction(direction) is Direction.FORWARD else -1.0


def _run(p, x0, y0, direction, opts, t_span, section=None, n_cross=1, record=False, h0=0.0):
    """Thin wrapper around the compiled kernel; times are elapsed, >= 0."""
    p.require_slow_fast()
    if section is None:
        sec = (0, 0.0, 0, 0, 0.0)
        n_cross = 0
    else:
        # direction filters refer to motion along the integration path
        sec = section._kernel_args()
    status, t, x, y, h, _, samples, cross = K.integrate_kernel(
        float(x0), float(y0), float(p.f), float(p.q), float(p.eps),
        _FORM[opts.formulation], _sign(direction), float(t_span),
        float(opts.rel_tol), float(opts.abs_tol), float(h0), float(opts.max_step),
        int(opts.max_steps), BLOWUP_THRESHOLD, *sec, int(n_cross), bool(record))
    if status == K.DOMAIN:
        raise DomainError(
            f"step size underflow at ({x!r}, {y!r}); the orbit hit a pole of the rate law")
    return _RunResult(_STATUS[status], t, x, y, h, samples, cross)


def _check_start(s0):
    x0, y0 = s0
    if not (math.isfinite(x0) and math.isfinite(y0)):
        raise ParamsError("initial state must be finite")
    return float(x0), float(y0)


def integrate(p, s0, direction=Direction.FORWARD, opts=None, t_end=None, section=None,
              n_crossings=1):
    """Integrate from ``s0`` over a horizon of ``t_end`` (default ``opts.max_time``).

    BACKWARD integrates the time-reversed field; its timestamps decrease
    from 0. With ``section`` the run also stops after ``n_crossings``
    crossings (termination EVENT), the last sample being the refined crossing.
    """
    opts = opts or IntegratorOptions()
    horizon = opts.max_time if t_end is None else float(t_end)
    if not horizon > 0:
        raise ValueError("integration horizon must be positive")
    if math.isinf(horizon) and section is None:
        raise ValueError("an unbounded horizon needs a section to stop at")
    x0, y0 = _check_start(s0)
    r = _run(p, x0, y0, direction, opts, horizon, section, n_crossings, record=True)
    t = r.samples[:, 0] * _sign(direction)
    return Trajectory(t.copy(), r.samples[:, 1].copy(), r.samples[:, 2].copy(),
                      r.termination, opts.formulation, Direction(direction))


def integrate_to_section(p, s0, section, n_crossings, opts=None, direction=Direction.FORWARD,
                         t_end=None):
    """First ``n_crossings`` crossings of ``section`` starting from ``s0``.

    A start point lying on the section does not count as a crossing.
    Raises :class:`NoCrossing` if the run ends (horizon, step limit or
    blow-up) before all crossings were found.
    """
    if n_crossings < 1:
        raise ValueError("n_crossings must be >= 1")
    opts = opts or IntegratorOptions()
    horizon = opts.max_time if t_end is None else float(t_end)
    x0, y0 = _check_start(s0)
    r = _run(p, x0, y0, direction, opts, horizon, section, n_crossings)
    sg = _sign(direction)
    events = [SectionEvent(section, float(c[0]) * sg, float(c[1]), float(c[2]),
                           arc=tuple(float(v) for v in c[3:7]))
              for c in r.crossings]
    if len(events) < n_crossings:
        raise NoCrossing(
            f"found {len(events)} of {n_crossings} crossings before {r.termination.value}")
    return events
