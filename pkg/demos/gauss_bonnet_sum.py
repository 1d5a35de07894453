"""Total curvature of the 2D Moyal sphere is 8 pi for every admissible (A, theta).

The levelwise sum is evaluated directly with a rigorous bracket on the
tail, and in telescoped form, whose limit is exactly 8 pi.
"""

import math

from moyalsphere import SphereParams, gb_direct, gb_limit, gb_telescoped

for A, theta in [(1, 0.1), (1, 0.4), (2, 0.3), (5, 1.0)]:
    p = SphereParams(A, theta)
    res = gb_direct(p, 10 ** 6)
    print(
        f"A={A} theta={theta}: partial={res.partial:.12f} estimate={res.value:.15f} "
        f"+- {res.tail_bound:.1e}  telescoped(10^4)={gb_telescoped(p, 10 ** 4):.12f}  limit={gb_limit(p):.15f}"
    )
print(f"8 pi = {8 * math.pi:.15f}")
