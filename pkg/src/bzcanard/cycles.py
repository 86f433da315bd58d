"""Limit cycles through a return map on the ray ``{x = x*, y < x*}``.

Every cycle of the system encircles the equilibrium, so that ray is a
transversal section; along it the flow moves towards increasing x.
Stable cycles are found in forward time and unstable ones in backward
time, where they attract. Amplitudes are x-extents of the final loop.
"""
from dataclasses import dataclass
import enum
import logging
import math

import numpy as np

from .critical import ShapeClass, fold_points, landing_points
from .equilibrium import equilibrium
from .errors import BracketInvalid, ConvergedToEquilibrium, NoConvergence, OrbitEscaped
from .integrator import Direction, IntegratorOptions, Section, Termination, _run
from .model import Params

log = logging.getLogger(__name__)

MAX_RETURNS = 200
CONVERGENCE_TOL = 1e-9
# loop amplitudes must also settle: near canards they react to the section
# point thousands of times more strongly than the point itself moves
AMPLITUDE_TOL = 1e-8
COLLAPSE_TOL = 1e-8
RATIO_WINDOW = 5
# shape thresholds: fold separation x2 - x1, and each outer branch span
HOPF_SMALL_FRACTION = 0.1
BRANCH_MARGIN_FRACTION = 0.1

# A return is abandoned once this many slow time units pass without a crossing.
_WINDOW_SLOW_UNITS = 200.0
_NOISE_FACTOR = 10.0
_AITKEN_FRACTION = 1e-2
_AITKEN_AGREE = 1e-3
_PROBE_OFFSET = 1e-3
_STEFFENSEN_MIN_RATIO = 0.5
_STEFFENSEN_MAX_RATIO = 0.98
_STEFFENSEN_AGREE = 1e-2
# smallest relative section step worth extrapolating from
_STEFFENSEN_FLOOR = 1e-12


class Stability(str, enum.Enum):
    STABLE = "STABLE"
    UNSTABLE = "UNSTABLE"


class CycleShape(str, enum.Enum):
    HOPF_SMALL = "HOPF_SMALL"
    CANARD_NO_HEAD = "CANARD_NO_HEAD"
    CANARD_WITH_HEAD = "CANARD_WITH_HEAD"
    RELAXATION = "RELAXATION"


#: Sweep label for rows where the orbit settles on the equilibrium.
EQUILIBRIUM_LABEL = "EQUILIBRIUM"


@dataclass(frozen=True)
class LimitCycleEstimate:
    params: Params
    section_fixed_point: float
    period: float
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    stability: Stability
    shape: CycleShape
    contraction_ratio: float
    returns: int
    time_variable: str = "POLYNOMIAL_TIME"

    @property
    def amplitude_x(self):
        return self.x_max - self.x_min

    @property
    def seed(self):
        """A point on the cycle, usable to warm-start a nearby computation."""
        return equilibrium(self.params), self.section_fixed_point

    def to_dict(self):
        return {
            "f": self.params.f, "q": self.params.q, "eps": self.params.eps,
            "section_fixed_point": self.section_fixed_point,
            "period": self.period, "time_variable": self.time_variable,
            "x_min": self.x_min, "x_max": self.x_max,
            "y_min": self.y_min, "y_max": self.y_max,
            "amplitude_x": self.amplitude_x,
            "stability": self.stability.value, "shape": self.shape.value,
            "contraction_ratio": self.contraction_ratio, "returns": self.returns,
        }


@dataclass(frozen=True)
class SweepRow:
    f: float
    amplitude_x: float
    period: float
    shape: str
    converged: bool


@dataclass(frozen=True)
class NestedCyclesResult:
    outer: LimitCycleEstimate
    inner: LimitCycleEstimate = None

    @property
    def gap(self):
        if self.inner is None:
            return math.nan
        return self.outer.amplitude_x - self.inner.amplitude_x


@dataclass(frozen=True)
class ExplosionBracket:
    """Final bisection bracket; ``f_small`` / ``f_large`` carry the small /
    large amplitude side."""

    f_small: float
    f_large: float
    amp_small: float
    amp_large: float
    threshold: float
    iterations: int = 0

    @property
    def lo(self):
        return min(self.f_small, self.f_large)

    @property
    def hi(self):
        return max(self.f_small, self.f_large)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def midpoint(self):
        return 0.5 * (self.lo + self.hi)

    def contains(self, f):
        return self.lo <= f <= self.hi


@dataclass(frozen=True)
class CycleFoldBracket:
    """``f_without`` has no cycles, ``f_with`` has the nested pair."""

    f_without: float
    f_with: float
    iterations: int = 0

    @property
    def lo(self):
        return min(self.f_without, self.f_with)

    @property
    def hi(self):
        return max(self.f_without, self.f_with)

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, f):
        return self.lo <= f <= self.hi


def default_seed(f):
    return 0.4, 0.35 / f


def return_section(x_star, direction=Direction.FORWARD):
    """Section ray below E*; backward orbits cross it with x decreasing."""
    sense = 1 if Direction(direction) is Direction.FORWARD else -1
    return Section("x", x_star, direction=sense, below=x_star)


def _window(p):
    return _WINDOW_SLOW_UNITS / p.eps


class _ReturnMap:
    """Successive crossings of the section, one integration per return."""

    def __init__(self, p, direction, opts):
        self.p = p
        self.direction = Direction(direction)
        self.opts = opts
        self.x_star = equilibrium(p)
        self.section = return_section(self.x_star, self.direction)
        self.h = 0.0

    def step(self, x, y):
        r = _run(self.p, x, y, self.direction, self.opts, _window(self.p), self.section,
                 1, h0=self.h)
        self.h = r.h
        if r.termination is Termination.BLOWUP:
            raise OrbitEscaped(
                f"{self.direction.value.lower()} orbit escaped to ({r.x:.3g}, {r.y:.3g})")
        if len(r.crossings) == 0:
            d = math.hypot(r.x - self.x_star, r.y - self.x_star)
            if d < 1e-3:
                raise ConvergedToEquilibrium(
                    f"orbit reached distance {d:.2e} of E* without circling it")
            raise NoConvergence(f"no section crossing within {_window(self.p):.3g} time units "
                                f"({r.termination.value})")
        c = r.crossings[0]
        return float(c[0]), float(c[2]), tuple(float(v) for v in c[3:7])


def _noise(y, opts):
    return _NOISE_FACTOR * opts.rel_tol * max(abs(y), 1e-3)


def _ratios(ys, opts):
    """Successive-difference ratios whose denominators rise above the noise."""
    diffs = np.abs(np.diff(ys))
    out = []
    for a, b, y in zip(diffs[:-1], diffs[1:], ys[1:]):
        nz = _noise(y, opts)
        if a > nz:
            out.append(max(b, nz) / a)
    return out[-RATIO_WINDOW:]


def _geometric_mean(r):
    return float(np.exp(np.mean(np.log(r))))


def _collapsing(ds):
    """Aitken test: the last two triples extrapolate to ``d = 0`` at a steady ratio."""
    if len(ds) < 4:
        return False
    est = []
    for d0, d1, d2 in (ds[-4:-1], ds[-3:]):
        den = d2 - 2.0 * d1 + d0
        if den == 0.0 or d0 <= 0.0 or d1 <= 0.0:
            return False
        r = d1 / d0
        if not 0.0 < r < 1.0:
            return False
        est.append((d2 - (d2 - d1) ** 2 / den, r, d2 / d1))
    (lim1, r1, _), (lim2, r2, r3) = est
    steady = abs(r2 - r1) < _AITKEN_AGREE * r1 and abs(r3 - r2) < _AITKEN_AGREE * r2
    small = abs(lim2) < _AITKEN_FRACTION * ds[-1]
    return steady and small


def _steffensen(ys):
    """Aitken-extrapolated fixed point when the map contracts slowly but steadily."""
    if len(ys) < 4:
        return None
    d1, d2, d3 = np.diff(ys[-4:])
    if d1 == 0.0 or d2 == 0.0 or abs(d3) < _STEFFENSEN_FLOOR * abs(ys[-1]):
        return None
    ra, rb = d2 / d1, d3 / d2
    if not (_STEFFENSEN_MIN_RATIO < rb < _STEFFENSEN_MAX_RATIO
            and abs(rb - ra) < _STEFFENSEN_AGREE * rb):
        return None
    return ys[-1] + d3 * rb / (1.0 - rb)


def find_limit_cycle(p, direction=Direction.FORWARD, seed=None, opts=None,
                     max_returns=MAX_RETURNS, tol=CONVERGENCE_TOL):
    """Attracting cycle of the forward (or backward) flow reached from ``seed``.

    Iterates the return map until successive crossings agree to ``tol``
    (relative) and successive loop amplitudes to ``AMPLITUDE_TOL``. Slow
    but steady contraction is accelerated by Steffensen jumps to the
    Aitken limit; only genuine returns count towards convergence.

    Raises :class:`ConvergedToEquilibrium` when the crossings collapse onto
    E*, :class:`OrbitEscaped` when the orbit blows up and
    :class:`NoConvergence` after ``max_returns`` returns.
    """
    opts = opts or IntegratorOptions()
    direction = Direction(direction)
    rm = _ReturnMap(p, direction, opts)
    xs = rm.x_star
    x, y = default_seed(p.f) if seed is None else (float(seed[0]), float(seed[1]))
    ys, ds, amps = [], [], []
    last = None
    for k in range(1, max_returns + 1):
        t, y, arc = rm.step(x, y)
        x = xs
        ys.append(y)
        ds.append(xs - y)
        amps.append(arc[1] - arc[0])
        last = (t, y, arc)
        if ds[-1] < COLLAPSE_TOL or _collapsing(ds):
            raise ConvergedToEquilibrium(
                f"section crossings collapse onto E* (x* - y = {ds[-1]:.3e} after {k} returns)")
        if (len(ys) >= 3 and abs(ys[-1] - ys[-2]) < tol * abs(ys[-1])
                and abs(amps[-1] - amps[-2]) <= AMPLITUDE_TOL * amps[-1]):
            return _estimate(rm, ys, last, k)
        jump = _steffensen(ys)
        if jump is not None and 0.0 < xs - jump:
            y = jump
            ys, ds, amps = [], [], []
    est = _estimate(rm, ys, last, max_returns) if len(ys) >= 2 else None
    raise NoConvergence(f"return map not settled after {max_returns} returns", last=est)


def _estimate(rm, ys, last, k):
    p, opts = rm.p, rm.opts
    t, y, arc = last
    ratios = _ratios(ys, opts)
    if not ratios:
        ratios = _probe_ratios(rm, y)
    ratio = _geometric_mean(ratios) if ratios else math.nan
    stability = Stability.STABLE if rm.direction is Direction.FORWARD else Stability.UNSTABLE
    xmin, xmax, ymin, ymax = arc
    shape = _shape_from_extents(p.q, xmin, xmax)
    return LimitCycleEstimate(p, y, abs(t), xmin, xmax, ymin, ymax, stability, shape, ratio,
                              k, opts.formulation.value)


def _probe_ratios(rm, y):
    """Ratios from a short run seeded just off the fixed point.

    Needed when the map contracts so hard that the history holds only
    noise-level differences.
    """
    d = rm.x_star - y
    ys = [y - _PROBE_OFFSET * d]
    x = rm.x_star
    for _ in range(RATIO_WINDOW + 1):
        _, yn, _ = rm.step(x, ys[-1])
        ys.append(yn)
        if abs(yn - ys[-2]) <= _noise(yn, rm.opts):
            break
    diffs = np.abs(np.array(ys) - y)
    out = []
    for a, b, yy in zip(diffs[:-1], diffs[1:], ys[1:]):
        nz = _noise(yy, rm.opts)
        if a > nz:
            out.append(max(b, nz) / a)
    return out[-RATIO_WINDOW:]


def _shape_from_extents(q, x_min, x_max):
    rep = fold_points(q)
    if rep.shape_class is not ShapeClass.S_SHAPED:
        return CycleShape.HOPF_SMALL if x_max - x_min < 1e-3 else CycleShape.RELAXATION
    return classify_cycle_shape((x_min, x_max), rep)


def classify_cycle_shape(cycle, fold_report):
    """Shape label of a closed orbit from its x-extent.

    ``cycle`` is a :class:`LimitCycleEstimate`, an ``(n, 2)`` array of
    ``(x, y)`` samples or a pair ``(x_min, x_max)``. Amplitude below
    ``0.1 (x2 - x1)`` is HOPF_SMALL. Each outer branch is measured from its
    fold to the landing point ``x_L`` / ``x_R`` of the fast jump from the
    opposite fold. A cycle that gets past both folds by 10% of that span
    is RELAXATION when it also comes within 10% of both landing points,
    else CANARD_WITH_HEAD. Everything else is CANARD_NO_HEAD.
    """
    if fold_report.shape_class is not ShapeClass.S_SHAPED:
        raise ValueError("cycle shapes need an S-shaped critical curve")
    if isinstance(cycle, LimitCycleEstimate):
        x_min, x_max = cycle.x_min, cycle.x_max
    else:
        arr = np.asarray(cycle, dtype=float)
        if arr.ndim == 2:
            x_min, x_max = float(arr[:, 0].min()), float(arr[:, 0].max())
        else:
            x_min, x_max = float(arr[0]), float(arr[1])
    x1, x2 = fold_report.x1, fold_report.x2
    if x_max - x_min < HOPF_SMALL_FRACTION * (x2 - x1):
        return CycleShape.HOPF_SMALL
    x_left, x_right = landing_points(fold_report)
    ml = BRANCH_MARGIN_FRACTION * (x1 - x_left)
    mr = BRANCH_MARGIN_FRACTION * (x_right - x2)
    if x_min < x1 - ml and x_max > x2 + mr:
        if x_min <= x_left + ml and x_max >= x_right - mr:
            return CycleShape.RELAXATION
        return CycleShape.CANARD_WITH_HEAD
    return CycleShape.CANARD_NO_HEAD


def nested_cycles(p, opts=None, outer_seed=None, inner_offset=1e-3):
    """Stable outer cycle and, when present, the unstable cycle inside it.

    The outer cycle is reached forward from a seed far out on the section
    line; the inner one backward from ``E* + (inner_offset, 0)``. The inner
    cycle is omitted when that backward orbit escapes or collapses onto E*.
    """
    opts = opts or IntegratorOptions()
    xs = equilibrium(p)
    seed = (0.99, xs) if outer_seed is None else outer_seed
    outer = find_limit_cycle(p, Direction.FORWARD, seed, opts)
    inner = None
    try:
        inner = find_limit_cycle(p, Direction.BACKWARD, (xs + inner_offset, xs), opts)
    except (OrbitEscaped, ConvergedToEquilibrium) as exc:
        log.info("no inner cycle at f=%r: %s", p.f, exc)
    if inner is not None and inner.amplitude_x >= outer.amplitude_x:
        # the backward orbit left through the outer cycle's basin boundary
        inner = None
    return NestedCyclesResult(outer, inner)


def _sweep_row(p, opts, seed):
    """Row for one f plus the seed to hand to the next f."""
    try:
        est = find_limit_cycle(p, Direction.FORWARD, seed, opts)
        return SweepRow(p.f, est.amplitude_x, est.period, est.shape.value, True), est.seed
    except ConvergedToEquilibrium:
        return SweepRow(p.f, 0.0, math.nan, EQUILIBRIUM_LABEL, True), None
    except (NoConvergence, OrbitEscaped) as exc:
        log.warning("sweep row f=%r did not converge: %s", p.f, exc)
        last = getattr(exc, "last", None)
        amp = last.amplitude_x if last is not None else math.nan
        shape = last.shape.value if last is not None else ""
        return SweepRow(p.f, amp, math.nan, shape, False), None


def _cold_row(args):
    return _sweep_row(*args)[0]


def amplitude_sweep(q, eps, f_values, opts=None, continuation=True, seed=None, workers=1):
    """One :class:`SweepRow` per ``f``, computed in the given order.

    With ``continuation`` each run starts from the previous cycle's
    crossing point, which makes the sweep sequential. Without it every
    row starts from ``seed`` and rows may run in a pool of ``workers``
    processes. Rows are returned sorted by f.
    """
    opts = opts or IntegratorOptions()
    params = [Params(float(f), q, eps) for f in f_values]
    if not continuation and workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_cold_row, [(p, opts, seed) for p in params]))
        return sorted(rows, key=lambda r: r.f)
    rows = []
    start = seed
    for p in params:
        row, nxt = _sweep_row(p, opts, start)
        rows.append(row)
        start = nxt if (continuation and nxt is not None) else seed
    return sorted(rows, key=lambda r: r.f)


def cycle_amplitude(p, opts=None, seed=None):
    """x-amplitude of the forward attractor reached from ``seed``; 0 for E*."""
    try:
        return find_limit_cycle(p, Direction.FORWARD, seed, opts).amplitude_x
    except ConvergedToEquilibrium:
        return 0.0
    except NoConvergence as exc:
        if exc.last is None:
            raise
        return exc.last.amplitude_x


def explosion_threshold(q):
    """Geometric mean of the small-cycle scale ``0.1 (x2 - x1)`` and the
    relaxation scale ``x_R - x_L``; amplitudes cross it only in the jump."""
    rep = fold_points(q)
    if rep.shape_class is not ShapeClass.S_SHAPED:
        raise BracketInvalid(f"no canard explosion without folds (q={q!r})")
    x_left, x_right = landing_points(rep)
    return math.sqrt(HOPF_SMALL_FRACTION * (rep.x2 - rep.x1) * (x_right - x_left))


def locate_explosion(q, eps, bracket, amplitude_threshold=None, opts=None,
                     min_width=1e-12, max_iter=200):
    """Bisect on ``amplitude_x >= threshold`` to bracket a canard explosion.

    The default threshold is :func:`explosion_threshold`, which depends on
    the fold geometry only.
    Bisection stops at width ``min_width`` or when the bracket can no
    longer be split in double precision. Inside the explosion the
    amplitude reacts violently to integration error, so brackets from
    different starting intervals agree only to about ``1e-10`` in f at the
    default tolerances, however narrow each one is.
    """
    opts = opts or IntegratorOptions()
    a, b = (float(v) for v in bracket)
    if not a < b:
        raise BracketInvalid("bracket must satisfy f_lo < f_hi")
    if amplitude_threshold is None:
        amplitude_threshold = explosion_threshold(q)
    thr = amplitude_threshold
    amp = lambda f: cycle_amplitude(Params(f, q, eps), opts)
    amp_a, amp_b = amp(a), amp(b)
    if (amp_a >= thr) == (amp_b >= thr):
        raise BracketInvalid(
            f"amplitudes {amp_a:.3g} and {amp_b:.3g} lie on the same side of {thr:.3g}")
    if amp_a >= thr:
        large, small, amp_large, amp_small = a, b, amp_a, amp_b
    else:
        large, small, amp_large, amp_small = b, a, amp_b, amp_a
    it = 0
    while it < max_iter and abs(large - small) > min_width:
        m = 0.5 * (large + small)
        if m in (large, small):
            break
        am = amp(m)
        it += 1
        log.debug("explosion bisection f=%.15g amplitude=%.6g", m, am)
        if am >= thr:
            large, amp_large = m, am
        else:
            small, amp_small = m, am
    return ExplosionBracket(small, large, amp_small, amp_large, thr, it)


def _has_nested_pair(p, opts):
    try:
        res = nested_cycles(p, opts)
    except ConvergedToEquilibrium:
        return False
    return res.inner is not None


def locate_cycle_fold(q, eps, bracket, opts=None, min_width=1e-12, max_iter=200):
    """Bracket the f at which the nested stable/unstable pair is born.

    Bisects on the existence of both cycles. Near the merge the return map
    is nearly neutral, so the bracket is only as sharp as the cycle
    detection there; it is never reported as a point.
    """
    opts = opts or IntegratorOptions()
    a, b = (float(v) for v in bracket)
    if not a < b:
        raise BracketInvalid("bracket must satisfy f_lo < f_hi")
    ha = _has_nested_pair(Params(a, q, eps), opts)
    hb = _has_nested_pair(Params(b, q, eps), opts)
    if ha == hb:
        raise BracketInvalid("nested-cycle existence is the same at both bracket ends")
    without, with_ = (b, a) if ha else (a, b)
    it = 0
    while it < max_iter and abs(with_ - without) > min_width:
        m = 0.5 * (with_ + without)
        if m in (with_, without):
            break
        it += 1
        try:
            has = _has_nested_pair(Params(m, q, eps), opts)
        except NoConvergence:
            # nearly neutral map: the pair is about to merge, count as present
            has = True
        if has:
            with_ = m
        else:
            without = m
    return CycleFoldBracket(without, with_, it)

