"""Numerical solution of the correction equation in several dimensions.

The 4D solver output is compared with the closed form. Higher dimensions
have no closed form; the solver reports its own residual.
"""

import numpy as np

from moyalsphere import epsilon_closed_4d, epsilon_ode, ode_solve

tab = ode_solve(epsilon_ode("4d", 1.0), 5.0, samples=501)
r, e = tab.column("r"), tab.column("eps")
ref = epsilon_closed_4d(r, 1.0)
print(f"4D: max |solver - closed| = {np.max(np.abs(e - ref)):.2e}, scaled residual {tab.meta['max_residual']:.1e}")

for m in (1, 2, 3, 4):
    t = ode_solve(epsilon_ode("general-2m", 1.0, m, source="consistent"), 5.0, samples=6)
    vals = " ".join(f"{v:10.6g}" for v in t.column("eps")[1:])
    print(f"dim {2 * m}: eps at r = 1..5 -> {vals}   residual {t.meta['max_residual']:.1e}")
