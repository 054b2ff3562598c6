"""
A front kicked by a step of velocity
====================================

The film starts at rest, except for a band of width 1/k next to the glued
end that moves with speed 3.  The release rate at t = 0 is 4.5, nine times
the toughness, so the front jumps to speed 0.8 and keeps moving until the
characteristics that left the band run out.
"""

import numpy as np

from debond import SolverConfig, preset, solve
from debond.convergence import LINFTY_BOUND, linfty_counterexample
from debond.griffith import ell_dot_rhs, g0

config = SolverConfig(h=1 / 128)
sol = solve(preset("counterexample", k=4), 0.5, config)

# release rate and predicted speed at the start
print("G0(0)        =", round(float(g0(0.0, sol)), 4))
print("speed law(0) =", round(float(ell_dot_rhs(0.0, sol)), 4))
print("ell_dot(0)   =", round(float(sol.ell_dot(0.0)), 4))

# front position on a coarse time grid
for t in np.linspace(0, 0.5, 6):
    print(f"t={t:.1f}  ell={float(sol.ell(t)):.4f}  ell_dot={float(sol.ell_dot(min(t, 0.49))):.4f}")

# narrower bands: the front still starts fast, but moves less in total
print("lower bound on the initial speed:", round(LINFTY_BOUND, 5))
for k in (4, 8, 16, 32):
    rep = linfty_counterexample(k, config)
    print(f"k={k:2d}  inf speed on initial interval={rep.inf_initial:.3f}  L1 gap={rep.l1_gap:.3f}")
