"""Command-line front end (``bzcanard``).

stdout carries data only (JSON, CSV paths, numbers); diagnostics go to
stderr at the level given by the ``BZ_LOG`` environment variable.
Exit status: 0 success, 1 numeric failure, 2 bad arguments.
"""
import argparse
import csv
from dataclasses import asdict, fields
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from .canard import Fold, canard_report, q_double_star
from .critical import ShapeClass, fold_points, q_star
from .cycles import (EQUILIBRIUM_LABEL, amplitude_sweep, explosion_threshold, find_limit_cycle,
                     locate_explosion, nested_cycles)
from .equilibrium import Regime, classify, hopf_points
from .errors import BZError, NoHopfRoots, ParamsError
from .integrator import Direction, IntegratorOptions, integrate
from .model import Params
from .portrait import parse_orbits, render

log = logging.getLogger("bzcanard")

_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO,
           "debug": logging.DEBUG}


class _UsageError(Exception):
    pass


def _clean(v):
    """JSON-safe value: NaN and infinities become null, enums their names."""
    if isinstance(v, float):
        return v if math.isfinite(v) else None
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if hasattr(v, "value") and isinstance(getattr(v, "value"), str):
        return v.value
    if isinstance(v, np.floating):
        return _clean(float(v))
    return v


def _dump(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=False)


def options_dict(opts):
    return {f.name: getattr(opts, f.name) for f in fields(opts)}


def fold_dict(rep):
    d = asdict(rep)
    d["fold_count"] = rep.fold_count
    return d


def equilibrium_dict(rep):
    d = asdict(rep)
    lams = d.pop("eigenvalues")
    d["eigenvalues_re"] = [z.real for z in lams]
    d["eigenvalues_im"] = [z.imag for z in lams]
    return d


def narrative(p, folds, eq, hopf):
    """One-sentence account of the dynamics for these parameters."""
    if folds.shape_class is not ShapeClass.S_SHAPED:
        return ("The critical curve has no folds, so the positive equilibrium "
                "is globally asymptotically stable in the open quadrant.")
    if hopf is None:
        return ("eps exceeds the largest value admitting singular Hopf points at this q; "
                "the equilibrium is stable.")
    if eq.regime is Regime.HOPF_CRITICAL:
        return ("The equilibrium sits at a singular Hopf point next to a fold; "
                "a family of small cycles is born here as f varies.")
    if eq.regime is Regime.OSCILLATORY:
        return ("The equilibrium lies on the repelling middle branch between the singular "
                "Hopf points and is unstable; a stable limit cycle surrounds it "
                "(small Hopf cycle, canard cycle or relaxation oscillation).")
    text = ("The equilibrium lies on an attracting branch outside the Hopf window and is "
            "stable; it attracts every orbit of the open quadrant unless a cycle coexists.")
    if eq.x_star > hopf.x2_eps:
        try:
            crit = canard_report(p.q, Fold.MAX).criticality.value
        except BZError:
            crit = None
        if crit == "SUBCRITICAL":
            text += (" The Hopf bifurcation at the maximum fold is subcritical here, so for f "
                     "slightly below f_hM a stable outer cycle and an unstable inner cycle "
                     "can surround the stable equilibrium.")
    return text


def analysis_document(p, opts=None):
    opts = opts or IntegratorOptions()
    folds = fold_points(p.q)
    eq = classify(p)
    hopf = None
    hopf_note = None
    canard = None
    if folds.shape_class is ShapeClass.S_SHAPED:
        try:
            hopf = hopf_points(p.q, p.eps)
        except NoHopfRoots as exc:
            hopf_note = f"no Hopf points: eps threshold {exc.threshold!r}"
        canard = {}
        for fold in Fold:
            try:
                canard[fold.value] = asdict(canard_report(p.q, fold))
            except BZError as exc:
                log.info("canard report at %s fold unavailable: %s", fold.value, exc)
                canard[fold.value] = None
    return {
        "params": {"f": p.f, "q": p.q, "eps": p.eps},
        "defaults": {"integrator": options_dict(opts), "q_star": q_star()},
        "fold_report": fold_dict(folds),
        "equilibrium_report": equilibrium_dict(eq),
        "hopf_data": asdict(hopf) if hopf is not None else None,
        "hopf_note": hopf_note,
        "canard_reports": canard,
        "regime_narrative": narrative(p, folds, eq, hopf),
    }


def _text_report(doc):
    out = []
    pr = doc["params"]
    out.append(f"params      f={pr['f']!r} q={pr['q']!r} eps={pr['eps']!r}")
    fr = doc["fold_report"]
    out.append(f"curve       {fr['shape_class']} ({fr['fold_count']} folds)")
    if fr["x1"] is not None:
        out.append(f"folds       x1={fr['x1']!r} x2={fr['x2']!r}")
    er = doc["equilibrium_report"]
    out.append(f"equilibrium x*={er['x_star']!r} in {er['strip']}")
    lam = ", ".join(f"{re!r}{im:+.6g}j" for re, im in zip(er["eigenvalues_re"],
                                                           er["eigenvalues_im"]))
    out.append(f"eigenvalues {lam}")
    out.append(f"stability   {er['stability']}, regime {er['regime']}")
    if doc["hopf_data"]:
        h = doc["hopf_data"]
        out.append(f"hopf        f_hm={h['f_hm']!r} f_hM={h['f_hM']!r}")
    out.append(doc["regime_narrative"])
    return "\n".join(str(_clean(x)) for x in out)


def _params(a):
    return Params(a.f, a.q, a.eps)


def _opts(a):
    return IntegratorOptions(rel_tol=a.rtol, abs_tol=a.atol)


def cmd_analyze(a):
    doc = analysis_document(_params(a), _opts(a))
    print(_dump(doc) if a.json else _text_report(doc))


def cmd_folds(a):
    print(_dump(fold_dict(fold_points(a.q))))


def cmd_qstar(a):
    print(repr(q_star()))


def cmd_qstarstar(a):
    print(repr(q_double_star(a.tol)))


def cmd_hopf(a):
    print(_dump(asdict(hopf_points(a.q, a.eps))))


def write_trajectory_csv(tr, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "y"])
        for t, x, y in zip(tr.t.tolist(), tr.x.tolist(), tr.y.tolist()):
            w.writerow([repr(t), repr(x), repr(y)])


def cmd_simulate(a):
    p = _params(a)
    direction = Direction.BACKWARD if a.backward else Direction.FORWARD
    tr = integrate(p, (a.x0, a.y0), direction, _opts(a), t_end=a.t)
    write_trajectory_csv(tr, a.out)
    log.info("%d samples, termination %s", len(tr), tr.termination.value)
    print(a.out)


def cmd_cycle(a):
    p = _params(a)
    opts = _opts(a)
    if a.both:
        res = nested_cycles(p, opts)
        doc = {"outer": res.outer.to_dict(),
               "inner": res.inner.to_dict() if res.inner is not None else None,
               "gap": res.gap}
    else:
        doc = find_limit_cycle(p, Direction.FORWARD, None, opts).to_dict()
    print(_dump(doc))


def write_sweep_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["f", "amplitude_x", "period", "shape", "converged"])
        for r in rows:
            w.writerow([repr(r.f), repr(r.amplitude_x), repr(r.period), r.shape,
                        "true" if r.converged else "false"])


def _explosion_pair(q, rows):
    """Adjacent sweep rows straddling the explosion threshold."""
    if fold_points(q).shape_class is not ShapeClass.S_SHAPED:
        return None
    thr = explosion_threshold(q)
    ok = [r for r in rows if r.converged and math.isfinite(r.amplitude_x)]
    for r0, r1 in zip(ok[:-1], ok[1:]):
        if (r0.amplitude_x >= thr) != (r1.amplitude_x >= thr):
            return r0.f, r1.f, thr
    return None


def cmd_sweep(a):
    if a.steps < 2:
        raise _UsageError("--steps must be at least 2")
    if not a.f_min < a.f_max:
        raise _UsageError("--f-min must be below --f-max")
    opts = _opts(a)
    f_values = np.linspace(a.f_max, a.f_min, a.steps).tolist()
    rows = amplitude_sweep(a.q, a.eps, f_values, opts, continuation=not a.no_continuation,
                           workers=a.workers)
    write_sweep_csv(rows, a.out)
    n_eq = sum(r.shape == EQUILIBRIUM_LABEL for r in rows)
    n_bad = sum(not r.converged for r in rows)
    print(f"sweep: {len(rows)} rows, {n_eq} at equilibrium, {n_bad} unconverged",
          file=sys.stderr)
    if a.refine_explosion:
        pair = _explosion_pair(a.q, rows)
        if pair is None:
            print("explosion: no threshold crossing between sweep rows", file=sys.stderr)
        else:
            b = locate_explosion(a.q, a.eps, (pair[0], pair[1]), pair[2], opts)
            print(f"explosion: f in [{b.lo!r}, {b.hi!r}] (threshold {b.threshold:.6g}, "
                  f"{b.iterations} bisections)", file=sys.stderr)
    print(a.out)


def cmd_portrait(a):
    p = _params(a)
    orbits = parse_orbits(a.orbits) if a.orbits else None
    svg = render(p, orbits, _opts(a))
    with open(a.out, "w", newline="\n") as fh:
        fh.write(svg)
    print(a.out)


def _positive(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {s!r}")
    return v


def _finite(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite: {s!r}")
    return v


def build_parser():
    ap = argparse.ArgumentParser(prog="bzcanard",
                                 description="Canards and relaxation oscillations "
                                             "in a two-variable BZ reaction model.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def model(sp, f=True, eps=True):
        if f:
            sp.add_argument("--f", type=_positive, required=True)
        sp.add_argument("--q", type=_positive, required=True)
        if eps:
            sp.add_argument("--eps", type=_positive, required=True)

    def tolerances(sp):
        d = IntegratorOptions()
        sp.add_argument("--rtol", type=_positive, default=d.rel_tol)
        sp.add_argument("--atol", type=_positive, default=d.abs_tol)

    sp = sub.add_parser("analyze", help="fold, equilibrium, Hopf and canard report")
    model(sp)
    tolerances(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("folds", help="fold points of the critical curve")
    model(sp, f=False, eps=False)
    sp.set_defaults(func=cmd_folds)

    sp = sub.add_parser("qstar", help="threshold on q for an S-shaped critical curve")
    sp.set_defaults(func=cmd_qstar)

    sp = sub.add_parser("qstarstar", help="q at which the Hopf criticality at the maximum "
                                          "fold changes")
    sp.add_argument("--tol", type=_positive, default=1e-10)
    sp.set_defaults(func=cmd_qstarstar)

    sp = sub.add_parser("hopf", help="singular Hopf points")
    model(sp, f=False)
    sp.set_defaults(func=cmd_hopf)

    sp = sub.add_parser("simulate", help="integrate one orbit to CSV")
    model(sp)
    tolerances(sp)
    sp.add_argument("--x0", type=_finite, required=True)
    sp.add_argument("--y0", type=_finite, required=True)
    sp.add_argument("--t", type=_positive, required=True, help="time horizon")
    sp.add_argument("--backward", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("cycle", help="limit cycle(s) as JSON")
    model(sp)
    tolerances(sp)
    sp.add_argument("--both", action="store_true",
                    help="stable outer and unstable inner cycle")
    sp.set_defaults(func=cmd_cycle)

    sp = sub.add_parser("sweep", help="cycle amplitude over a range of f")
    model(sp, f=False)
    tolerances(sp)
    sp.add_argument("--f-min", type=_positive, required=True)
    sp.add_argument("--f-max", type=_positive, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--refine-explosion", action="store_true")
    sp.add_argument("--no-continuation", action="store_true")
    sp.add_argument("--workers", type=int, default=1,
                    help="process pool size, used with --no-continuation")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("portrait", help="phase portrait as SVG")
    model(sp)
    tolerances(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--orbits", help="fwd:X,Y[,T];bwd:X,Y[,T]")
    sp.set_defaults(func=cmd_portrait)
    return ap


def _setup_logging():
    level = _LEVELS.get(os.environ.get("BZ_LOG", "warn").strip().lower(), logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("bzcanard")
    root.handlers[:] = [handler]
    root.setLevel(level)
    root.propagate = False


def run(argv=None):
    """Entry point; returns the process exit status."""
    _setup_logging()
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        a.func(a)
    except (_UsageError, ParamsError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except BZError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"OSError: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
