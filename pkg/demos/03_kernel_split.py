# Splitting the Poisson kernel at the extremal point
#
# At a radius R with maximising angle theta*, the kernel is split into a
# truncated part p1 = min(P(t), P(delta)) and a bump p2 supported in |t| < delta.
# The pieces add back up to P exactly, and the bump can only matter close to
# the origin.

import numpy as np

from angmax import (
    make_simple, poisson_kernel, p1, p2, split_geometry, split_convolutions,
    angular_max, reflected_geometry, TransformKind,
)

y, delta = 0.7, 0.3
t = np.linspace(-1, 1, 9)
print("p1 + p2 - P:", np.max(np.abs(p1(t, y, delta) + p2(t, y, delta) - poisson_kernel(t, y))))

g = split_geometry(2.0, 0.4)
print("y*^2 + delta^2 =", g.y_star ** 2 + g.delta ** 2, " 2 R delta =", 2 * g.R * g.delta)

f = make_simple([0.5, 1.0, 2.0, 2.5], [1.0, 0.0, 2.0])
value, theta = angular_max(TransformKind.POISSON, f, 1.5)
geom = reflected_geometry(1.5, theta)
g1, g2 = split_convolutions(f, geom)
print(f"Mf(1.5) = {value:.12f} at theta* = {theta:.6f}")
print(f"g1 + g2 = {g1 + g2:.12f}  (g2 = {g2:.3e})")
