"""Correcting the 4D conformal factor so the scalar curvature is constant.

With h = h0 the curvature deviates from 12/A^2 at order theta^2. Adding
theta^2 eps(r), with eps the regular solution of the correction equation,
pushes the deviation to order theta^4. The metric ratio h^-2/h0^-2 tends
to 1 as the sphere grows.
"""

import numpy as np

from moyalsphere import constant_curvature_residual, epsilon_closed_4d, h_ratio

r = np.array([0.5, 1.0, 2.0])
print("theta    defect with h0       defect with h0 + theta^2 eps")
for th in (0.1, 0.05, 0.025):
    z = constant_curvature_residual(1.0, th, r, eps="zero")
    c = constant_curvature_residual(1.0, th, r)
    print(f"{th:5.3f}    {z:.3e}            {c:.3e}")

print("\neps(r) for A = 1:", epsilon_closed_4d(np.array([0.0, 0.5, 1.0, 2.0, 5.0]), 1.0))
rr = np.linspace(0, 5, 51)
for A in (0.5, 1.0, 2.0, 5.0):
    print(f"A={A}: sup |h^-2/h0^-2 - 1| = {np.max(np.abs(h_ratio(rr, A, 0.1) - 1)):.3e}")
