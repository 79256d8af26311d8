# Angular maximal functions
#
# For each radius rho the maximal function takes the supremum of |T f| over
# the arc of the natural sector. For f = e^{-t} the Laplace profile is known
# exactly: sup over |theta| < pi/2 of |1/(1 + rho e^{i theta})| = (1 + rho^2)^{-1/2}.

import math

import numpy as np

from angmax import ExpFunction, RadialGrid, TransformKind, max_profile, lp_norm_profile, make_simple

f = ExpFunction(1.0)
prof = max_profile(TransformKind.LAPLACE_RAY, f, RadialGrid())
exact = 1 / np.sqrt(1 + prof.rho ** 2)
print("max |profile - exact| =", np.max(np.abs(prof.values - exact)))

# The L2 norm ratio is sqrt(pi); the reported tail bounds the mass outside the window.
norm = lp_norm_profile(prof, 2.0, tail_policy="report")
print("||M f||_2 / ||f||_2   =", norm.norm / math.sqrt(0.5), "vs sqrt(pi) =", math.sqrt(math.pi))
print("relative tail         =", norm.tail)

# The Poisson maximal function of an indicator never exceeds its sup norm.
chi = make_simple([0.0, 1.0], [1.0])
pprof = max_profile(TransformKind.POISSON, chi, RadialGrid(1e-2, 1e2, 256))
print("max of Poisson profile:", pprof.values.max())
k = np.argmax(pprof.values < 0.5)
print("first radius below 1/2:", pprof.rho[k], "at angle", pprof.arg_theta[k])
