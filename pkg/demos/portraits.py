"""Write SVG phase portraits along the explosion ladder into ./portraits/.

Run with ``python demos/portraits.py [outdir]``.
"""
import sys
from pathlib import Path

from bzcanard import Direction, Params, equilibrium
from bzcanard.portrait import OrbitSpec, render

out = Path(sys.argv[1] if len(sys.argv) > 1 else "portraits")
out.mkdir(parents=True, exist_ok=True)

cases = {
    "small_hopf_cycle": Params(1.536, 0.07, 1e-4),
    "canard_cycle": Params(1.53475666, 0.07, 1e-4),
    "relaxation": Params(1.5, 0.07, 1e-4),
    "nested_cycles": Params(0.572, 0.02, 0.01),
}
for name, p in cases.items():
    xs = equilibrium(p)
    orbits = [OrbitSpec(Direction.FORWARD, 0.4, 0.35 / p.f, 40 / p.eps),
              OrbitSpec(Direction.BACKWARD, xs + 1e-3, xs, 20 / p.eps)]
    path = out / f"{name}.svg"
    path.write_text(render(p, orbits))
    print(path)
