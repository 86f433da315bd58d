"""Vector fields of the reduced two-variable BZ system.

Three equivalent formulations are used throughout the package:

* slow time ``t``:        eps x' = x(1-x) + f(q-x)/(q+x) y,   y' = x - y
* fast time ``tau=t/eps``: x' = x(1-x) + f(q-x)/(q+x) y,       y' = eps (x - y)
* polynomial time ``s`` with ``dtau = (q+x) ds``:
      x' = x(1-x)(q+x) + f(q-x) y,   y' = eps (x-y)(q+x)

All three share orbits in the quadrant x, y > 0.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, ParamsError

#: Simulation assumes a genuine slow-fast separation.
MAX_SIMULATION_EPS = 0.1


@dataclass(frozen=True)
class Params:
    """System instance ``(f, q, eps)``; all three must be positive."""

    f: float
    q: float
    eps: float

    def __post_init__(self):
        for name in ("f", "q", "eps"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ParamsError(f"{name} must be a positive finite number, got {v!r}")

    def require_slow_fast(self):
        if self.eps > MAX_SIMULATION_EPS:
            raise ParamsError(
                f"simulation requires eps <= {MAX_SIMULATION_EPS}, got {self.eps!r}")
        return self


@dataclass(frozen=True)
class State:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ParamsError(f"state must be finite, got ({self.x!r}, {self.y!r})")
        if self.x < 0 or self.y < 0:
            raise ParamsError(f"state must lie in the closed first quadrant, got ({self.x!r}, {self.y!r})")

    def __iter__(self):
        return iter((self.x, self.y))


def _xy(s):
    x, y = s
    return float(x), float(y)


def _pole_guard(q, x):
    d = q + x
    if d == 0.0 or not math.isfinite(d) or abs(d) < 1e-300:
        raise DomainError(f"pole of the rate law at x = -q (x={x!r}, q={q!r})")
    return d


def h_factor(p, x):
    """Return ``h(x) = f (q - x) / (q + x)``."""
    d = _pole_guard(p.q, x)
    return p.f * (p.q - x) / d


def h_factor_prime(p, x):
    d = _pole_guard(p.q, x)
    return -2.0 * p.f * p.q / (d * d)


def fast_field(p, s):
    """Right-hand side in fast time; returns ``(dx/dtau, dy/dtau)``."""
    x, y = _xy(s)
    return x * (1.0 - x) + h_factor(p, x) * y, p.eps * (x - y)


def slow_field(p, s):
    """Right-hand side in slow time ``t = eps * tau``."""
    dx, dy = fast_field(p, s)
    return dx / p.eps, dy / p.eps


def polynomial_field(p, s):
    """Right-hand side of the polynomial system (time ``s``, ``dtau = (q+x) ds``)."""
    x, y = _xy(s)
    qx = p.q + x
    return x * (1.0 - x) * qx + p.f * (p.q - x) * y, p.eps * (x - y) * qx


def jacobian(p, s):
    """Matrix of partial derivatives of :func:`fast_field` at ``s``."""
    x, y = _xy(s)
    h = h_factor(p, x)
    return np.array([
        [1.0 - 2.0 * x + h_factor_prime(p, x) * y, h],
        [p.eps, -p.eps],
    ])
