"""
Two solvers and one stability table
===================================

The representation-formula solver is checked against an independent
leapfrog scheme, then the data are perturbed by 2^-k and every gap to the
unperturbed solution is tabulated.
"""

from debond import SolverConfig, preset, solve
from debond.convergence import DataSequence, fit_rate, run_sequence
from debond.oracle import compare, fd_solve

data = preset("counterexample", k=4)
for h in (1 / 64, 1 / 128, 1 / 256):
    rep = compare(solve(data, 1.0, SolverConfig(h=h)), fd_solve(data, 1.0, h), 1.0)
    print(f"h=1/{round(1 / h):3d}  sup u gap={rep.sup_norm:.4f}  front gap={rep.front_sup:.4f}")

table = run_sequence(DataSequence(data, ks=(2, 3, 4, 5, 6), T=0.875), SolverConfig(h=1 / 128),
                     workers=4)
print(table.to_csv())
for c in table.columns:
    fit = fit_rate(table, c)
    print(f"{c:15s} rate {fit.rate:.2f}  r2 {fit.r2:.3f}")
