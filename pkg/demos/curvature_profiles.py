"""Curvature of the 2D and 4D Moyal spheres compared with the round sphere.

The normalized profiles eta (2D) and Lambda (4D) equal 1 for a classical
sphere. Near the origin the noncommutative sphere is more curved; far away
it flattens back to the classical value.
"""

import numpy as np

from moyalsphere import SphereParams
from moyalsphere.curvature import eta, lambda_big, s2_coeffs

theta = 0.1
r = np.array([0.0, 0.5, 1.0, 2.0, 5.0, 20.0])

print("eta(r) for a few lambda = A^2/theta")
for lam in (2.5, 5.0, 10.0, 100.0):
    print(f"  lam={lam:6g}  " + "  ".join(f"{v:.6f}" for v in eta(r, lam, theta)))

print("\nLambda(r) in four dimensions")
for lam in (2.5, 5.0, 10.0, 100.0):
    print(f"  lam={lam:6g}  " + "  ".join(f"{v:.6f}" for v in lambda_big(r, lam, theta)))

# the level coefficients sit exactly on the eta curve at r^2 = theta (2m + 1)
p = SphereParams(1.0, theta)
m = np.arange(5)
print("\nlevel coefficients / (2/A^2):", s2_coeffs(p).coeff(m) / 2.0)
print("eta at the level radii:       ", eta(np.sqrt(theta * (2 * m + 1)), p.lam, theta))
