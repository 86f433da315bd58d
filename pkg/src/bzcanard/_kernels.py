"""Compiled Dormand-Prince 5(4) stepper for the BZ fields.

Everything here is numba-jitted and works on scalars; the public surface is
:mod:`bzcanard.integrator`. Section crossings and coordinate extrema are
located on the order-4 continuous extension of each accepted step.
"""
import math

import numba as nb
import numpy as np

POLYNOMIAL = 0
FAST = 1

TIME_REACHED = 0
EVENT = 1
STEP_LIMIT = 2
BLOWUP = 3
DOMAIN = 4

# Crossing record columns
CROSS_COLS = 7  # t, x, y, xmin, xmax, ymin, ymax

_REFINE_ITERS = 60

# PI step-size control: exponent of the current error and memory weight
_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA
# fraction of the Dormand-Prince real stability bound (about 3.3)
_STAB_LIMIT = 3.0

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)

# Shampine's dense output for DOPRI5, rows = stages, columns = theta^1..theta^4
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


@nb.njit(cache=True)
def rhs(x, y, f, q, eps, form, sign):
    if form == POLYNOMIAL:
        qx = q + x
        fx = x * (1.0 - x) * qx + f * (q - x) * y
        fy = eps * (x - y) * qx
    else:
        d = q + x
        if d == 0.0:
            return math.nan, math.nan
        fx = x * (1.0 - x) + f * (q - x) / d * y
        fy = eps * (x - y)
    return sign * fx, sign * fy


@nb.njit(cache=True)
def _dense(Q, x0, y0, h, th):
    """State at fraction ``th`` of the step from the dense polynomial."""
    px = 0.0
    py = 0.0
    for j in range(3, -1, -1):
        px = (px + Q[0, j]) * th
        py = (py + Q[1, j]) * th
    return x0 + h * px, y0 + h * py


@nb.njit(cache=True)
def _dense_slope(Q, comp, th):
    s = 0.0
    for j in range(3, -1, -1):
        s = s * th + (j + 1) * Q[comp, j]
    return s


@nb.njit(cache=True)
def _slope_root(Q, comp):
    """theta in (0, 1) where the interpolant's comp-derivative vanishes, or -1."""
    d0 = _dense_slope(Q, comp, 0.0)
    d1 = _dense_slope(Q, comp, 1.0)
    if d0 == 0.0 or d0 * d1 >= 0.0:
        return -1.0
    a, b = 0.0, 1.0
    for _ in range(_REFINE_ITERS):
        m = 0.5 * (a + b)
        dm = _dense_slope(Q, comp, m)
        if (dm > 0.0) == (d0 > 0.0):
            a = m
        else:
            b = m
    return 0.5 * (a + b)


@nb.njit(cache=True)
def initial_step(x, y, fx, fy, f, q, eps, form, sign, rtol, atol):
    sx = atol + rtol * abs(x)
    sy = atol + rtol * abs(y)
    d0 = math.sqrt(0.5 * ((x / sx) ** 2 + (y / sy) ** 2))
    d1 = math.sqrt(0.5 * ((fx / sx) ** 2 + (fy / sy) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    gx, gy = rhs(x + h0 * fx, y + h0 * fy, f, q, eps, form, sign)
    d2 = math.sqrt(0.5 * (((gx - fx) / sx) ** 2 + ((gy - fy) / sy) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1)


@nb.njit(cache=True)
def integrate_kernel(x, y, f, q, eps, form, sign, t_end, rtol, atol, h, max_step,
                     max_steps, blowup, sec_axis, sec_level, sec_dir, filt_sign,
                     filt_level, n_cross, record):
    """Integrate from elapsed time 0 up to ``t_end``.

    ``sec_axis``: 0 no section, 1 the line x = level, 2 the line y = level.
    ``sec_dir``: +1 / -1 require the section coordinate to increase /
    decrease, 0 accepts both. ``filt_sign``: -1 keeps crossings whose other
    coordinate is below ``filt_level``, +1 above, 0 no filter.

    Returns ``(status, t, x, y, h, steps, samples, crossings)`` where ``h``
    is the step size proposed for a continuation run.
    """
    t = 0.0
    status = TIME_REACHED
    k1x, k1y = rhs(x, y, f, q, eps, form, sign)
    if h <= 0.0:
        h = initial_step(x, y, k1x, k1y, f, q, eps, form, sign, rtol, atol)
    h = min(h, max_step)

    cap = 1024 if record else 1
    samples = np.empty((cap, 3))
    ns = 0
    if record:
        samples[0, 0] = 0.0
        samples[0, 1] = x
        samples[0, 2] = y
        ns = 1
    crossings = np.empty((max(n_cross, 1), CROSS_COLS))
    nc = 0
    xmin = x
    xmax = x
    ymin = y
    ymax = y
    Q = np.empty((2, 4))
    steps = 0
    rejected = False
    err_old = 1e-4

    if not (math.isfinite(k1x) and math.isfinite(k1y)):
        # started on a pole of the rate law
        t_end = 0.0
        status = DOMAIN
    elif not h > 0.0:
        h = 1e-6

    while t < t_end:
        if steps >= max_steps:
            status = STEP_LIMIT
            break
        if t + h > t_end:
            h = t_end - t
        if h < 1e-14 * max(1.0, abs(t)):
            if max(abs(x), abs(y)) > 100.0:
                status = BLOWUP
            else:
                status = DOMAIN
            break

        k2x, k2y = rhs(x + h * A21 * k1x, y + h * A21 * k1y, f, q, eps, form, sign)
        k3x, k3y = rhs(x + h * (A31 * k1x + A32 * k2x),
                       y + h * (A31 * k1y + A32 * k2y), f, q, eps, form, sign)
        k4x, k4y = rhs(x + h * (A41 * k1x + A42 * k2x + A43 * k3x),
                       y + h * (A41 * k1y + A42 * k2y + A43 * k3y), f, q, eps, form, sign)
        k5x, k5y = rhs(x + h * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
                       y + h * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y),
                       f, q, eps, form, sign)
        x6 = x + h * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x)
        y6 = y + h * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y)
        k6x, k6y = rhs(x6, y6, f, q, eps, form, sign)
        xn = x + h * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
        yn = y + h * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
        k7x, k7y = rhs(xn, yn, f, q, eps, form, sign)
        ex = h * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
        ey = h * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
        sx = atol + rtol * max(abs(x), abs(xn))
        sy = atol + rtol * max(abs(y), abs(yn))
        err = math.sqrt(0.5 * ((ex / sx) ** 2 + (ey / sy) ** 2))
        if not math.isfinite(err):
            h *= 0.2
            rejected = True
            continue
        steps += 1

        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            rejected = True
            continue

        # accepted: build the continuous extension
        for j in range(4):
            Q[0, j] = (k1x * _P[0, j] + k2x * _P[1, j] + k3x * _P[2, j] + k4x * _P[3, j]
                       + k5x * _P[4, j] + k6x * _P[5, j] + k7x * _P[6, j])
            Q[1, j] = (k1y * _P[0, j] + k2y * _P[1, j] + k3y * _P[2, j] + k4y * _P[3, j]
                       + k5y * _P[4, j] + k6y * _P[5, j] + k7y * _P[6, j])

        thx = _slope_root(Q, 0)
        thy = _slope_root(Q, 1)

        # section crossing inside this step
        th_c = -1.0
        if sec_axis != 0:
            g0 = (x if sec_axis == 1 else y) - sec_level
            g1 = (xn if sec_axis == 1 else yn) - sec_level
            if g0 != 0.0 and (g0 * g1 < 0.0 or g1 == 0.0):
                if sec_dir == 0 or (sec_dir > 0 and g1 > g0) or (sec_dir < 0 and g1 < g0):
                    a, b = 0.0, 1.0
                    for _ in range(_REFINE_ITERS):
                        m = 0.5 * (a + b)
                        xm, ym = _dense(Q, x, y, h, m)
                        gm = (xm if sec_axis == 1 else ym) - sec_level
                        if (gm > 0.0) == (g0 > 0.0):
                            a = m
                        else:
                            b = m
                    th = b if g1 == 0.0 else 0.5 * (a + b)
                    xc, yc = _dense(Q, x, y, h, th)
                    other = yc if sec_axis == 1 else xc
                    if filt_sign == 0 or (filt_sign < 0 and other < filt_level) or (
                            filt_sign > 0 and other > filt_level):
                        th_c = th

        if th_c >= 0.0:
            # close the current arc at the crossing
            if 0.0 < thx <= th_c:
                xe, _ = _dense(Q, x, y, h, thx)
                xmin = min(xmin, xe)
                xmax = max(xmax, xe)
            if 0.0 < thy <= th_c:
                _, ye = _dense(Q, x, y, h, thy)
                ymin = min(ymin, ye)
                ymax = max(ymax, ye)
            xc, yc = _dense(Q, x, y, h, th_c)
            if sec_axis == 1:
                xc = sec_level
            else:
                yc = sec_level
            xmin = min(xmin, xc)
            xmax = max(xmax, xc)
            ymin = min(ymin, yc)
            ymax = max(ymax, yc)
            crossings[nc, 0] = t + th_c * h
            crossings[nc, 1] = xc
            crossings[nc, 2] = yc
            crossings[nc, 3] = xmin
            crossings[nc, 4] = xmax
            crossings[nc, 5] = ymin
            crossings[nc, 6] = ymax
            nc += 1
            xmin = xc
            xmax = xc
            ymin = yc
            ymax = yc
            if nc >= n_cross:
                t = t + th_c * h
                x = xc
                y = yc
                if record:
                    if ns >= cap:
                        cap *= 2
                        tmp = np.empty((cap, 3))
                        tmp[:ns] = samples[:ns]
                        samples = tmp
                    samples[ns, 0] = t
                    samples[ns, 1] = x
                    samples[ns, 2] = y
                    ns += 1
                status = EVENT
                break
            if thx > th_c:
                xe, _ = _dense(Q, x, y, h, thx)
                xmin = min(xmin, xe)
                xmax = max(xmax, xe)
            if thy > th_c:
                _, ye = _dense(Q, x, y, h, thy)
                ymin = min(ymin, ye)
                ymax = max(ymax, ye)
        else:
            if thx > 0.0:
                xe, _ = _dense(Q, x, y, h, thx)
                xmin = min(xmin, xe)
                xmax = max(xmax, xe)
            if thy > 0.0:
                _, ye = _dense(Q, x, y, h, thy)
                ymin = min(ymin, ye)
                ymax = max(ymax, ye)

        t += h
        x = xn
        y = yn
        k1x = k7x
        k1y = k7y
        xmin = min(xmin, x)
        xmax = max(xmax, x)
        ymin = min(ymin, y)
        ymax = max(ymax, y)

        if record:
            if ns >= cap:
                cap *= 2
                tmp = np.empty((cap, 3))
                tmp[:ns] = samples[:ns]
                samples = tmp
            samples[ns, 0] = t
            samples[ns, 1] = x
            samples[ns, 2] = y
            ns += 1

        if abs(x) > blowup or abs(y) > blowup:
            status = BLOWUP
            break

        # PI controller damps step-size oscillation at the stability boundary
        e = max(err, 1e-10)
        fac = min(5.0, max(0.2, 0.9 * e ** -_EXPO * err_old ** _BETA))
        err_old = max(err, 1e-4)
        if rejected:
            fac = min(1.0, fac)
            rejected = False
        h_next = h * fac
        # keep h |lambda| inside the real stability interval of the pair
        den = (xn - x6) ** 2 + (yn - y6) ** 2
        if den > 0.0:
            rho = math.sqrt(((k7x - k6x) ** 2 + (k7y - k6y) ** 2) / den)
            if rho * h_next > _STAB_LIMIT:
                h_next = max(_STAB_LIMIT / rho, h)
        h = min(h_next, max_step)

    return status, t, x, y, h, steps, samples[:ns], crossings[:nc]
