# Closed-form transforms of simple functions
#
# A simple function is a finite sum of weighted indicators of intervals in
# [0, inf). For these, every transform in the package has a closed form, and
# each one can be checked against plain quadrature of its defining integral.

import math

import numpy as np

from angmax import make_simple, poisson, stieltjes, cauchy_integral, laplace_ray, hilbert
from angmax import TransformKind, quad_oracle

f = make_simple([0.0, 1.0], [1.0])  # indicator of [0, 1]

# Poisson integral at i: the interval subtends a quarter turn of angle, so 1/4.
print("P f(0, 1)     =", poisson(f, 0.0, 1.0))

# Laplace transform along the positive axis: (1 - e^{-1}) at rho = 1.
print("L f(1)        =", laplace_ray(f, 1.0, 0.0), "expected", 1 - math.exp(-1))

# Hilbert transform off the support: log|x / (x - 1)| / pi.
print("H f(3)        =", hilbert(f, 3.0), "expected", math.log(3 / 2) / math.pi)

# Stieltjes transform and the Cauchy integral differ by 2 pi i.
z = 0.5 + 0.25j
print("S f(z)        =", stieltjes(f, z))
print("C f(z) 2 pi i =", cauchy_integral(f, z) * 2j * math.pi)

# Batched evaluation against the adaptive quadrature oracle.
rng = np.random.default_rng(0)
g = make_simple(np.cumsum(rng.uniform(0.1, 1, 5)), rng.uniform(-2, 2, 4))
xs, ys = rng.uniform(-1, 4, 8), np.exp(rng.uniform(-3, 2, 8))
closed = poisson(g, xs, ys)
oracle = quad_oracle(TransformKind.POISSON, g, (xs, ys), abs_tol=1e-300, rel_tol=1e-13)
print("max relative gap to quadrature:", np.max(np.abs(closed - oracle) / np.abs(oracle)))
