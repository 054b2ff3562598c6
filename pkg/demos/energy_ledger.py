"""
Where the energy goes
=====================

Internal energy plus friction plus toughness spent on debonding should
equal the initial energy plus the work of the loads.  The residual of that
balance shrinks with the grid.
"""

import numpy as np

from debond import SolverConfig, preset, solve
from debond.energy import ledger

for name in ("counterexample", "forcing_demo", "driven"):
    for h in (1 / 64, 1 / 128):
        led = ledger(solve(preset(name), 1.0, SolverConfig(h=h)))
        print(f"{name:15s} h=1/{round(1 / h):3d}  E(0)={led.E[0]:.4f}  E(1)={led.E[-1]:.4f}  "
              f"friction={led.A[-1]:.4f}  toughness={led.kappa_integral[-1]:.4f}  "
              f"work={led.W[-1] + led.F[-1]:.4f}  max|residual|={np.max(np.abs(led.residual)):.2e}")
