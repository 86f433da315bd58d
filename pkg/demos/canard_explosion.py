"""Canard explosion and its inverse at q = 0.07, eps = 1e-4.

Run with ``python demos/canard_explosion.py``. Takes a few seconds.
"""
import numpy as np

from bzcanard import (amplitude_sweep, fold_points, hopf_points, landing_points,
                      locate_explosion)
from bzcanard.cycles import explosion_threshold

q, eps = 0.07, 1e-4
seed = (0.4, 0.3379 / 1.5)

folds = fold_points(q)
hopf = hopf_points(q, eps)
print(f"folds x1={folds.x1:.6f} x2={folds.x2:.6f}, landing points {landing_points(folds)}")
print(f"Hopf points f_hm={hopf.f_hm:.10f} f_hM={hopf.f_hM:.10f}")

# coarse sweep from the relaxation regime up past the Hopf point
fs = np.linspace(1.50, 1.537, 38)
rows = amplitude_sweep(q, eps, fs[::-1], seed=seed)
for r in rows[::4]:
    print(f"  f={r.f:.6f}  amplitude={r.amplitude_x:.6f}  {r.shape}")

# the jump itself is exponentially narrow in f
thr = explosion_threshold(q)
br = locate_explosion(q, eps, (1.53, 1.54))
print(f"explosion: amplitude crosses {thr:.4f} for f in [{br.lo:.13f}, {br.hi:.13f}]")
print(f"  cycle amplitude {br.amp_small:.5f} -> {br.amp_large:.5f}")

# the same thing near the other fold, as f decreases towards f_hM
for r in amplitude_sweep(q, eps, [0.899, 0.8918734654, 0.891873465, 0.89], seed=seed):
    print(f"  f={r.f:<12}  amplitude={r.amplitude_x:.9f}  {r.shape}")
inv = locate_explosion(q, eps, (0.89, 0.9))
print(f"inverse explosion in [{inv.lo:.13f}, {inv.hi:.13f}]")
