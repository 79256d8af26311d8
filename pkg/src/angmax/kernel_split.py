"""Splitting of the Poisson kernel at a radius-dependent scale.

For a radius ``R`` and an angle ``theta*`` in ``(0, pi/2]`` put
``x* = R cos theta*``, ``y* = R sin theta*`` and ``delta = R - x*``. The
kernel ``P(t, y) = y / (pi (y^2 + t^2))`` is split as ``P = P1 + P2`` with
``P1 = min(P(t, y), P(delta, y))`` (a mixture of normalized interval
indicators with total mass below one) and ``P2`` the bounded bump that
remains on ``|t| < delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .func_model import DomainError, SimpleFunction
from .quadrature import quad_batch, quad_semi_infinite
from .transforms import poisson

__all__ = [
    "SplitGeometry",
    "split_geometry",
    "reflected_geometry",
    "poisson_kernel",
    "p1",
    "p2",
    "phi",
    "phi_right_limit",
    "MassReport",
    "phi_mass",
    "decomp_residual",
    "decomp_residuals",
    "split_convolutions",
    "split_check",
    "p2_threshold_radius",
]

_INV_PI = 1.0 / math.pi


@dataclass(frozen=True)
class SplitGeometry:
    """Evaluation point and split scale for one radius.

    ``reflected`` marks a point in the second quadrant handled through the
    mirror image ``t -> -t``: the stored angle is ``pi - theta``, the
    geometry is that of the mirrored point, and the kernel is centred at
    ``-x_star``.
    """

    R: float
    theta_star: float
    x_star: float
    y_star: float
    delta: float
    reflected: bool = False

    @property
    def x_eval(self) -> float:
        return -self.x_star if self.reflected else self.x_star


def split_geometry(R: float, theta_star: float) -> SplitGeometry:
    if not R > 0:
        raise DomainError("R must be positive")
    if not 0 < theta_star <= math.pi / 2:
        raise DomainError("theta_star must lie in (0, pi/2]")
    x = R * math.cos(theta_star)
    y = R * math.sin(theta_star)
    s = math.sin(0.5 * theta_star)
    # R - R cos(theta) without cancellation
    delta = 2.0 * R * s * s
    return SplitGeometry(R, theta_star, max(x, 0.0), y, delta)


def reflected_geometry(R: float, theta: float) -> SplitGeometry:
    """Geometry for any angle in ``(0, pi)``, mirroring the second quadrant."""
    if not 0 < theta < math.pi:
        raise DomainError("theta must lie in (0, pi)")
    if theta <= math.pi / 2:
        return split_geometry(R, theta)
    g = split_geometry(R, math.pi - theta)
    return SplitGeometry(g.R, g.theta_star, g.x_star, g.y_star, g.delta, reflected=True)


def _check_y(y):
    if not np.all(np.asarray(y) > 0):
        raise DomainError("y must be positive")


def poisson_kernel(t, y):
    _check_y(y)
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    return y / (math.pi * (y * y + t * t))


def _check_split(y, delta):
    _check_y(y)
    if not np.all(np.asarray(delta) > 0):
        raise DomainError("delta must be positive")


def p1(t, y, delta):
    _check_split(y, delta)
    return np.minimum(poisson_kernel(t, y), poisson_kernel(delta, y))


def p2(t, y, delta):
    _check_split(y, delta)
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    delta = np.asarray(delta, dtype=float)
    # P(t) - P(delta) in product form; the difference cancels when delta << y
    bump = y * ((delta - t) * (delta + t)) / (math.pi * (y * y + t * t) * (y * y + delta * delta))
    inside = np.abs(t) < delta
    return np.where(inside, np.maximum(bump, 0.0), 0.0)


def phi(a, y, delta):
    """``-2a d/da P1(a, y)`` on ``a > delta``."""
    _check_split(y, delta)
    a = np.asarray(a, dtype=float)
    if np.any(a <= delta):
        raise DomainError("phi is defined for a > delta only")
    return _phi(a, y)


def _phi(a, y):
    s = y * y + a * a
    return 4.0 * a * a * y / (math.pi * s * s)


def phi_right_limit(y, delta):
    """Value of phi as ``a -> delta+``, for plotting."""
    _check_split(y, delta)
    return _phi(np.asarray(delta, dtype=float), y)


class MassReport(NamedTuple):
    mass: float
    deficit: float
    quadrature: float


def _mass_deficit(u):
    """``(2/pi) (arctan u - u / (1 + u^2))`` for ``u = delta / y``."""
    if u < 1e-2:
        # alternating series sum_k (-1)^(k+1) 2k/(2k+1) u^(2k+1)
        u2 = u * u
        term, total = u, 0.0
        for k in range(1, 12):
            term *= u2
            total += (-1) ** (k + 1) * (2 * k / (2 * k + 1)) * term
        return 2.0 * _INV_PI * total
    return 2.0 * _INV_PI * (math.atan(u) - u / (1.0 + u * u))


def phi_mass(y: float, delta: float) -> MassReport:
    """Total mass ``int_delta^inf phi(a) da`` in closed form, with a quadrature check.

    The closed form is ``2 delta P(delta, y) + 1 - (2/pi) arctan(delta / y)``.
    ``deficit = 1 - mass`` is computed directly; it resolves masses that
    round to 1.0 in double precision.
    """
    _check_split(y, delta)
    u = delta / y
    deficit = _mass_deficit(u)
    if u < 1.0:
        mass = 1.0 - deficit
    else:
        mass = 2.0 * delta * float(poisson_kernel(delta, y)) + 2.0 * _INV_PI * math.atan(y / delta)
    q, _ = quad_semi_infinite(lambda a: _phi(a, y), delta, points=(delta + y,),
                              abs_tol=1e-13, rel_tol=1e-13)
    return MassReport(mass, deficit, float(q))


def _decomp_quadrature(t, y, delta, tail_tol=1e-12):
    """``int_{max(delta,|t|)}^inf phi(a) / (2a) da`` by quadrature in ``log a``.

    Integrates up to ``a_max`` where the analytic tail ``P(a_max, y)`` drops
    below ``tail_tol`` and adds that tail.
    """
    t, y, delta = np.broadcast_arrays(*(np.asarray(v, dtype=float).ravel() for v in (t, y, delta)))
    a0 = np.maximum(delta, np.abs(t))
    a_max = np.maximum(np.sqrt(y / (math.pi * tail_tol)), 2.0 * a0)
    lo, hi = np.log(a0), np.log(a_max)
    tail = y / (math.pi * (y * y + a_max * a_max))

    def integrand(u, idx):
        a = np.exp(u)
        # phi(a) / (2a) * da, with da = a du
        return 0.5 * _phi(a, y[idx, None])

    # split at the kernel scale log y where it falls inside the range
    mid = np.clip(np.log(y), lo, hi)
    inner = (mid > lo) & (mid < hi)
    los = np.concatenate([lo, mid[inner]])
    his = np.concatenate([np.where(inner, mid, hi), hi[inner]])
    owner = np.concatenate([np.arange(len(lo)), np.flatnonzero(inner)])
    vals, _ = quad_batch(integrand, los, his, owner, n_problems=len(lo),
                         abs_tol=1e-300, rel_tol=1e-13)
    return vals + tail


def decomp_residuals(t, y, delta, chunk=20000):
    """Vectorized :func:`decomp_residual`."""
    _check_split(y, delta)
    t, y, delta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, y, delta)))
    shape = t.shape
    t, y, delta = t.ravel(), y.ravel(), delta.ravel()
    out = np.empty(t.size)
    for s in range(0, t.size, chunk):
        sl = slice(s, s + chunk)
        lhs = p1(t[sl], y[sl], delta[sl])
        out[sl] = np.abs(lhs - _decomp_quadrature(np.abs(t[sl]), y[sl], delta[sl]))
    return out.reshape(shape)


def decomp_residual(t: float, y: float, delta: float) -> float:
    """``|P1(t, y) - int_delta^inf chi_[-a,a](t) phi(a) / (2a) da|`` with the integral by quadrature."""
    return float(decomp_residuals(t, y, delta)[()])


def _atan_minus_identity(u):
    """``arctan(u) - u`` without cancellation near zero."""
    if abs(u) < 1e-2:
        u2 = u * u
        term, total = u, 0.0
        for k in range(1, 8):
            term *= -u2
            total += term / (2 * k + 1)
        return total
    return math.atan(u) - u


def _p2_piece_integral(a, b, x, y, delta):
    """``int_a^b P2(x - t, y) dt`` for ``[a, b]`` inside ``|x - t| < delta``.

    With ``u = (t - x)/y`` and ``e = delta/y`` the antiderivative is
    ``(arctan u - u/(1 + e^2)) / pi = (arctan u - u + u e^2/(1 + e^2)) / pi``.
    """
    e2 = (delta / y) ** 2
    ua, ub = (a - x) / y, (b - x) / y
    lin = (ub - ua) * e2 / (1.0 + e2)
    return (_atan_minus_identity(ub) - _atan_minus_identity(ua) + lin) * _INV_PI


def split_convolutions(f: SimpleFunction, geom: SplitGeometry, abs_tol=1e-15, rel_tol=1e-13):
    """``(g1, g2)`` with ``g_k = int P_k(x - t, y) f(t) dt`` at the point of ``geom``.

    ``g2`` is closed form; ``g1`` is integrated piece by piece, split where
    ``|x - t| = delta``.
    """
    if not f.is_nonnegative:
        raise DomainError("split_convolutions needs a real nonnegative function")
    x, y, delta = geom.x_eval, geom.y_star, geom.delta
    vals = f.values.real
    bps = f.breakpoints
    cap = float(poisson_kernel(delta, y))

    # g2: over each piece intersected with (x - delta, x + delta)
    g2 = 0.0
    for i, v in enumerate(vals):
        a, b = max(bps[i], x - delta), min(bps[i + 1], x + delta)
        if v == 0 or b <= a:
            continue
        g2 += v * _p2_piece_integral(a, b, x, y, delta)
    g2 = max(g2, 0.0)

    edges = np.unique(np.concatenate([bps, [x - delta, x + delta]]))
    edges = edges[(edges >= bps[0]) & (edges <= bps[-1])]
    lo, hi = edges[:-1], edges[1:]
    mids = 0.5 * (lo + hi)
    piece_val = f(mids).real
    keep = piece_val != 0
    if not np.any(keep):
        return 0.0, g2
    lo, hi, piece_val = lo[keep], hi[keep], piece_val[keep]

    def integrand(t, idx):
        return piece_val[idx, None] * np.minimum(poisson_kernel(x - t, y), cap)

    parts, _ = quad_batch(integrand, lo, hi, abs_tol=abs_tol / len(lo), rel_tol=rel_tol)
    return float(np.sum(parts)), float(g2)


def split_check(f: SimpleFunction, geom: SplitGeometry) -> float:
    """Relative mismatch ``|g1 + g2 - P f| / P f`` at the point of ``geom``."""
    g1, g2 = split_convolutions(f, geom)
    g = float(poisson(f, geom.x_eval, geom.y_star))
    return abs(g1 + g2 - g) / g if g else abs(g1 + g2)


def p2_threshold_radius(f_l1_norm: float, lambda2: float) -> float:
    """``||f||_1 / (2 pi lambda2)``: beyond this radius ``g2 > lambda2`` cannot hold."""
    if not (f_l1_norm > 0 and lambda2 > 0):
        raise DomainError("inputs must be positive")
    return f_l1_norm / (2.0 * math.pi * lambda2)

