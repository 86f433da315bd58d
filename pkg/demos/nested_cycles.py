"""Bistability at q = 0.02, eps = 0.01: a stable relaxation cycle around an
unstable one, which merge as f decreases.

Run with ``python demos/nested_cycles.py``.
"""
from bzcanard import ConvergedToEquilibrium, Params, classify, nested_cycles
from bzcanard.cycles import locate_cycle_fold

q, eps = 0.02, 0.01

for f in (0.59, 0.572, 0.5710914362323, 0.571):
    p = Params(f, q, eps)
    stab = classify(p).stability.value
    try:
        r = nested_cycles(p)
    except ConvergedToEquilibrium:
        print(f"f={f}: no cycle, every orbit tends to E* ({stab})")
        continue
    inner = "none" if r.inner is None else f"{r.inner.amplitude_x:.4f}"
    print(f"f={f}: E* {stab}, outer amplitude {r.outer.amplitude_x:.4f}, inner {inner}")

# where the two cycles meet; the return map is neutral there, so only a
# bracket is meaningful
br = locate_cycle_fold(q, eps, (0.571, 0.572))
print(f"cycle fold in [{br.lo:.12f}, {br.hi:.12f}] after {br.iterations} bisections")
