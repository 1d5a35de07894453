"""Area of the 2M-dimensional Moyal sphere relative to the round sphere.

gamma_M(lambda) rises from 0 to 1 as lambda = A^2/theta grows: the
noncommutative sphere is always smaller than its classical counterpart.
"""

import numpy as np

from moyalsphere import SphereParams, deformed_area, gamma1_closed, gamma2_closed, gamma_m_series, sphere_area

grid = np.logspace(-2, 3, 11)
print("lambda    " + "  ".join(f"M={M:<9d}" for M in (1, 2, 4, 6)))
for lam in grid:
    print(f"{lam:8.3g}  " + "  ".join(f"{gamma_m_series(M, lam):.9f}" for M in (1, 2, 4, 6)))

print("\nclosed forms at lambda = 1:", float(gamma1_closed(1.0)), float(gamma2_closed(1.0)))
res = sphere_area(SphereParams(1.0, 0.05, half_dim=2))
print(f"4D sphere A=1 theta=0.05: area {res.area:.12f} of classical {res.classical_area:.12f}")
print(f"deformed (theta, mu) = (0.03, 0.04): area {deformed_area(1, 1.0, 0.03, 0.04).area:.12f}")
