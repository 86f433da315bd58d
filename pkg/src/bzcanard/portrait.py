"""Static SVG phase portraits: critical curve, folds, equilibrium and orbits."""
from dataclasses import dataclass
import math

import numpy as np

from .critical import ShapeClass, curve_value, fold_points
from .equilibrium import equilibrium
from .errors import ParamsError
from .integrator import Direction, integrate

CURVE_COLOR = "black"
FORWARD_COLOR = "green"
BACKWARD_COLOR = "orange"
POINT_COLOR = "black"
EQUILIBRIUM_COLOR = "red"

_STROKE = 0.004
_CURVE_SAMPLES = 400
_HORIZON_SLOW_UNITS = 30.0


@dataclass(frozen=True)
class OrbitSpec:
    direction: Direction
    x0: float
    y0: float
    t_end: float = None


def parse_orbits(spec):
    """Parse ``fwd:X,Y[,T];bwd:X,Y[,T]`` into a list of :class:`OrbitSpec`."""
    out = []
    for item in filter(None, (s.strip() for s in spec.split(";"))):
        head, _, body = item.partition(":")
        kind = {"fwd": Direction.FORWARD, "bwd": Direction.BACKWARD}.get(head.strip())
        nums = body.split(",")
        if kind is None or len(nums) not in (2, 3):
            raise ParamsError(f"bad orbit spec {item!r}; expected fwd:X,Y[,T] or bwd:X,Y[,T]")
        try:
            vals = [float(v) for v in nums]
        except ValueError:
            raise ParamsError(f"bad number in orbit spec {item!r}") from None
        out.append(OrbitSpec(kind, vals[0], vals[1], vals[2] if len(vals) == 3 else None))
    return out


def default_orbits(p):
    xs = equilibrium(p)
    return [OrbitSpec(Direction.FORWARD, 0.4, 0.35 / p.f),
            OrbitSpec(Direction.BACKWARD, xs + 1e-3, xs)]


def _fmt(v):
    return f"{v:.5f}"


def _polyline(xs, ys, height, color, dashed=False):
    pts = " ".join(f"{_fmt(x)},{_fmt(height - y)}" for x, y in zip(xs, ys))
    dash = ' stroke-dasharray="0.012,0.008"' if dashed else ""
    return (f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{_STROKE}"{dash}/>')


def _circle(x, y, height, color, r=0.008):
    return f'<circle cx="{_fmt(x)}" cy="{_fmt(height - y)}" r="{r}" fill="{color}"/>'


def _visible(tr, limit):
    """Leading part of an orbit that stays inside the plotting window."""
    inside = (np.abs(tr.x) <= limit) & (np.abs(tr.y) <= limit)
    stop = len(inside) if inside.all() else int(np.argmin(inside)) + 1
    return tr.x[:stop], tr.y[:stop]


def _thin(x, y, max_points=4000):
    if len(x) <= max_points:
        return x, y
    idx = np.unique(np.linspace(0, len(x) - 1, max_points).astype(int))
    return x[idx], y[idx]


def render(p, orbits=None, opts=None):
    """SVG document for the phase portrait of ``p`` as a string.

    The view box is ``[0, 1] x [0, max(1.1, y_max)]`` where ``y_max`` is the
    largest orbit ordinate shown. Forward orbits are solid green, backward
    orbits dashed orange, the critical curve black.
    """
    orbits = default_orbits(p) if orbits is None else orbits
    paths = []
    for o in orbits:
        t_end = o.t_end if o.t_end is not None else _HORIZON_SLOW_UNITS / p.eps
        tr = integrate(p, (o.x0, o.y0), o.direction, opts, t_end=t_end)
        x, y = _visible(tr, 10.0)
        paths.append((o.direction, *_thin(x, y)))
    y_top = max([1.1] + [float(np.max(y)) for _, _, y in paths if len(y)])
    height = y_top

    els = []
    xg = np.linspace(p.q, 1.0, _CURVE_SAMPLES + 1)[1:]
    cg = np.array([curve_value(p.q, x, f=p.f) for x in xg])
    keep = cg <= height
    if keep.any():
        els.append(_polyline(xg[keep], cg[keep], height, CURVE_COLOR))
    rep = fold_points(p.q)
    if rep.shape_class is ShapeClass.S_SHAPED:
        for xf in (rep.x1, rep.x2):
            els.append(_circle(xf, curve_value(p.q, xf, f=p.f), height, POINT_COLOR))
    for direction, x, y in paths:
        color = FORWARD_COLOR if direction is Direction.FORWARD else BACKWARD_COLOR
        els.append(_polyline(x, y, height, color, dashed=direction is Direction.BACKWARD))
    xs = equilibrium(p)
    els.append(_circle(xs, xs, height, EQUILIBRIUM_COLOR))

    title = f"f={p.f!r} q={p.q!r} eps={p.eps!r}"
    head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
            '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'viewBox="0 0 1 {_fmt(height)}" width="600" '
            f'height="{int(math.ceil(600 * height))}" preserveAspectRatio="none">')
    body = [f"<title>{title}</title>",
            f'<rect x="0" y="0" width="1" height="{_fmt(height)}" fill="white"/>']
    return "\n".join([head, *body, *els, "</svg>"]) + "\n"
