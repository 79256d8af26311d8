"""Closed-form transforms of simple functions, and a quadrature oracle.

Each transform of a simple function is a finite sum over pieces of an
elementary antiderivative. The per-piece terms are arranged so that no
difference of nearly equal large quantities is formed:

* Poisson: the angle subtended by a piece, ``atan2(d*y, (a-x)(b-x) + y**2)``
  instead of a difference of two arctangents.
* Stieltjes: ``log((b - z)/(a - z))`` split into a log-modulus (``log1p``
  when the ratio is near one) and the same subtended angle; the angle lies
  in ``(-pi, pi)`` so the principal branch is correct for every piece.
* Laplace on a ray: ``exp(-z a) * d * E(z d)`` with
  ``E(w) = (1 - exp(-w))/w`` from an accurate complex ``expm1`` or, for
  ``|w| < 1e-4``, its Taylor series.

Hilbert transform convention: ``Hf(x) = (1/pi) p.v. int f(t)/(x - t) dt``.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .func_model import (
    RIGHT_HALF_PLANE,
    SLIT_PLANE,
    UPPER_HALF_PLANE,
    DomainError,
    ExpFunction,
    Sector,
    SimpleFunction,
)
from .quadrature import quad_batch

__all__ = [
    "TransformKind",
    "poisson",
    "conjugate_poisson",
    "stieltjes",
    "laplace_ray",
    "laplace_exp",
    "hilbert",
    "cauchy_integral",
    "evaluate_polar",
    "quad_oracle",
    "one_minus_exp_over",
    "SERIES_THRESHOLD",
]

SERIES_THRESHOLD = 1e-4
_INV_PI = 1.0 / math.pi


class TransformKind(enum.Enum):
    POISSON = "poisson"
    STIELTJES = "stieltjes"
    LAPLACE_RAY = "laplace"
    CAUCHY_INTEGRAL = "cauchy"
    HILBERT = "hilbert"

    @property
    def sector(self) -> Sector | None:
        """Natural sector of the transform; ``None`` for boundary-only kinds."""
        return _NATURAL_SECTOR[self]

    @classmethod
    def parse(cls, name) -> "TransformKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        if key in ("laplace_ray", "laplaceray"):
            return cls.LAPLACE_RAY
        if key in ("cauchy_integral", "cauchyintegral"):
            return cls.CAUCHY_INTEGRAL
        raise DomainError(f"unknown transform kind {name!r}")


_NATURAL_SECTOR = {
    TransformKind.POISSON: UPPER_HALF_PLANE,
    TransformKind.CAUCHY_INTEGRAL: UPPER_HALF_PLANE,
    TransformKind.STIELTJES: SLIT_PLANE,
    TransformKind.LAPLACE_RAY: RIGHT_HALF_PLANE,
    TransformKind.HILBERT: None,
}


def _finish(out, f: SimpleFunction, scalar: bool):
    if f.is_real:
        out = out.real if np.iscomplexobj(out) else out
    if scalar:
        return out[()]
    return out


def _subtended_angle(a, b, x, y):
    return np.arctan2((b - a) * y, (a - x) * (b - x) + y * y)


def poisson(f: SimpleFunction, x, y):
    """Poisson integral ``(1/pi) int_0^inf y f(t) / ((t-x)^2 + y^2) dt``."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if not np.all(y > 0):
        raise DomainError("Poisson transform needs y > 0")
    out = np.zeros(x.shape, dtype=complex if not f.is_real else float)
    vals = f.values if not f.is_real else f.values.real
    bps = f.breakpoints
    for i, v in enumerate(vals):
        if v == 0:
            continue
        out = out + v * _subtended_angle(bps[i], bps[i + 1], x, y)
    return _finish(out * _INV_PI, f, x.ndim == 0)


def conjugate_poisson(f: SimpleFunction, x, y):
    """``(1/pi) int f(t) (x - t) / ((x-t)^2 + y^2) dt``, i.e. the Poisson integral of ``Hf``."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if not np.all(y > 0):
        raise DomainError("conjugate Poisson integral needs y > 0")
    out = np.zeros(x.shape, dtype=complex)
    bps = f.breakpoints
    for i, v in enumerate(f.values):
        if v == 0:
            continue
        out = out + v * _log_modulus_ratio(bps[i], bps[i + 1], x, y)
    return _finish(-out * _INV_PI, f, x.ndim == 0)


def _log_modulus_ratio(a, b, x, y):
    """``log(|b - z| / |a - z|)`` for ``z = x + i y``."""
    da2 = (a - x) ** 2 + y * y
    db2 = (b - x) ** 2 + y * y
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (b - a) * (a + b - 2 * x) / da2
        near = np.abs(u) < 0.5
        res = np.where(near, np.log1p(np.where(near, u, 0.0)), np.log(db2 / da2))
    return 0.5 * res


def _check_off_support(f: SimpleFunction, x, y):
    t0, tn = f.support
    bad = (y == 0) & (x >= t0) & (x <= tn)
    if np.any(bad) or not np.all(np.isfinite(x) & np.isfinite(y)):
        raise DomainError(
            "Stieltjes transform is undefined on the support segment "
            f"[{t0}, {tn}]; use hilbert for boundary principal values")


def stieltjes(f: SimpleFunction, z):
    """``int_0^inf f(t) / (t - z) dt`` for ``z`` off the support segment."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    _check_off_support(f, x, y)
    out = np.zeros(z.shape, dtype=complex)
    bps = f.breakpoints
    for i, v in enumerate(f.values):
        if v == 0:
            continue
        a, b = bps[i], bps[i + 1]
        term = _log_modulus_ratio(a, b, x, y) + 1j * _subtended_angle(a, b, x, y)
        out = out + v * term
    return out[()] if z.ndim == 0 else out


def cauchy_integral(f: SimpleFunction, z):
    """``(1/(2 pi i)) int f(t) / (t - z) dt`` for ``Im z != 0``."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag == 0):
        raise DomainError("Cauchy integral needs Im z != 0")
    return stieltjes(f, z) / (2j * math.pi)


def _expm1_complex(w):
    u, v = w.real, w.imag
    s = np.sin(0.5 * v)
    c = np.cos(0.5 * v)
    em = np.expm1(u)
    two_s2 = 2.0 * s * s
    return (em * (1.0 - two_s2) - two_s2) + 2j * (em + 1.0) * s * c


def one_minus_exp_over(w):
    """``(1 - exp(-w)) / w``, accurate near ``w = 0``."""
    w = np.asarray(w, dtype=complex)
    shape = w.shape
    w = w.reshape(-1)
    mag2 = w.real * w.real + w.imag * w.imag
    small = mag2 < SERIES_THRESHOLD * SERIES_THRESHOLD
    any_small = np.any(small)
    denom = np.where(small, 1.0, w) if any_small else w
    out = -_expm1_complex(-denom) / denom
    if any_small:
        ws = w[small]
        # 1 - w/2 + w^2/6 - w^3/24 + w^4/120 - w^5/720, Horner form
        out[small] = 1 + ws * (-1 / 2 + ws * (1 / 6 + ws * (-1 / 24 + ws * (1 / 120 - ws / 720))))
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


def _polar_z(rho, theta):
    rho, theta = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(theta, dtype=float))
    return rho, theta, rho * np.cos(theta) + 1j * rho * np.sin(theta)


def laplace_ray(f, rho, theta):
    """``int_0^inf f(t) exp(-t rho e^{i theta}) dt`` for ``|theta| < pi/2``."""
    rho, theta, z = _polar_z(rho, theta)
    if not np.all(rho > 0):
        raise DomainError("Laplace ray transform needs rho > 0")
    if not np.all(np.abs(theta) < math.pi / 2):
        raise DomainError("Laplace ray transform needs |theta| < pi/2")
    if isinstance(f, ExpFunction):
        return laplace_exp(f, z)
    out = np.zeros(z.shape, dtype=complex)
    bps = f.breakpoints
    # running exp(-z t_i); advanced piece by piece as exp(-z a) * (1 - w E(w))
    head = np.exp(-z * bps[0])
    for i, v in enumerate(f.values):
        d = bps[i + 1] - bps[i]
        w = z * d
        e = one_minus_exp_over(w)
        if v != 0:
            out = out + (v * d) * head * e
        if i + 1 < len(f.values):
            head = head - head * w * e
    return out[()] if z.ndim == 0 else out


def laplace_exp(g: ExpFunction, z):
    """Laplace transform of ``A exp(-c t)``: ``A / (z + c)``, valid for ``Re z > -c``."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= -g.rate):
        raise DomainError("Laplace transform of exp(-c t) needs Re z > -c")
    out = complex(g.amplitude) / (z + g.rate)
    return out[()] if z.ndim == 0 else out


def hilbert(f: SimpleFunction, x):
    """``(1/pi) p.v. int f(t) / (x - t) dt`` at ``x`` off the breakpoints."""
    x = np.asarray(x, dtype=float)
    if np.any(np.isin(x, f.breakpoints)) or not np.all(np.isfinite(x)):
        raise DomainError("Hilbert transform is singular at a breakpoint")
    out = np.zeros(x.shape, dtype=complex)
    bps = f.breakpoints
    for i, v in enumerate(f.values):
        if v == 0:
            continue
        a, b = bps[i], bps[i + 1]
        u = (b - a) / (x - b)
        near = np.abs(u) < 0.5
        term = np.where(near, np.log1p(np.where(near, u, 0.0)),
                        np.log(np.abs((x - a) / (x - b))))
        out = out + v * term
    return _finish(out * _INV_PI, f, x.ndim == 0)


def evaluate_polar(kind: TransformKind, f, rho, theta):
    """Transform of ``f`` at ``rho e^{i theta}``; the angle must be admissible for ``kind``."""
    kind = TransformKind.parse(kind)
    if kind is TransformKind.LAPLACE_RAY:
        return laplace_ray(f, rho, theta)
    if isinstance(f, ExpFunction):
        raise DomainError(f"{kind.value} transform is only implemented for simple functions")
    rho, theta = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(theta, dtype=float))
    x = rho * np.cos(theta)
    y = rho * np.sin(theta)
    if kind is TransformKind.POISSON:
        return poisson(f, x, y)
    if kind is TransformKind.STIELTJES:
        return stieltjes(f, x + 1j * y)
    if kind is TransformKind.CAUCHY_INTEGRAL:
        return cauchy_integral(f, x + 1j * y)
    raise DomainError("Hilbert transform lives on the boundary; no polar evaluation")


# --- quadrature oracle -------------------------------------------------------

def _initial_pieces(f: SimpleFunction, centers):
    """Support pieces for each centre, further split at the centre if inside."""
    lo, hi, owner = [], [], []
    bps = f.breakpoints
    for k, c in enumerate(centers):
        edges = bps
        if bps[0] < c < bps[-1] and c not in bps:
            edges = np.sort(np.append(bps, c))
        lo.append(edges[:-1])
        hi.append(edges[1:])
        owner.append(np.full(len(edges) - 1, k))
    return np.concatenate(lo), np.concatenate(hi), np.concatenate(owner)


def _oracle_integrate(f, centers, kernel, abs_tol, max_sweeps, rel_tol=0.0):
    lo, hi, owner = _initial_pieces(f, centers)

    def integrand(t, idx):
        return kernel(t, idx) * f(t)

    vals, _ = quad_batch(integrand, lo, hi, owner, n_problems=len(centers),
                         abs_tol=abs_tol, rel_tol=rel_tol, max_sweeps=max_sweeps)
    return vals


def quad_oracle(kind, f: SimpleFunction, point, abs_tol=1e-10, max_sweeps=80, rel_tol=0.0):
    """Reference value of a transform by adaptive quadrature of its defining integral.

    ``point`` is ``(x, y)`` for Poisson, ``z`` for Stieltjes and Cauchy,
    ``(rho, theta)`` for the Laplace ray transform and ``x`` for Hilbert;
    arrays evaluate a batch. Each integral stops once its error estimate is
    below ``max(abs_tol, rel_tol * |value|)``; pass ``rel_tol`` to resolve
    values far below ``abs_tol``. Much slower than the closed forms. Raises
    :class:`~angmax.quadrature.QuadratureError` when the tolerance is not met.
    """
    kind = TransformKind.parse(kind)
    if not isinstance(f, SimpleFunction):
        raise DomainError("quadrature oracle accepts simple functions only")

    if kind is TransformKind.POISSON:
        x, y = (np.atleast_1d(np.asarray(c, dtype=float)) for c in point)
        x, y = np.broadcast_arrays(x, y)
        if not np.all(y > 0):
            raise DomainError("Poisson transform needs y > 0")
        scalar = np.ndim(point[0]) == 0 and np.ndim(point[1]) == 0
        out = _oracle_integrate(
            f, x, lambda t, i: y[i, None] / ((t - x[i, None]) ** 2 + y[i, None] ** 2) / math.pi,
            abs_tol, max_sweeps, rel_tol)

    elif kind in (TransformKind.STIELTJES, TransformKind.CAUCHY_INTEGRAL):
        z = np.atleast_1d(np.asarray(point, dtype=complex))
        scalar = np.ndim(point) == 0
        if kind is TransformKind.CAUCHY_INTEGRAL and np.any(z.imag == 0):
            raise DomainError("Cauchy integral needs Im z != 0")
        _check_off_support(f, z.real, z.imag)
        factor = 1.0 if kind is TransformKind.STIELTJES else 1.0 / (2j * math.pi)
        out = _oracle_integrate(f, z.real, lambda t, i: factor / (t - z[i, None]),
                                abs_tol, max_sweeps, rel_tol)

    elif kind is TransformKind.LAPLACE_RAY:
        rho, theta = (np.atleast_1d(np.asarray(c, dtype=float)) for c in point)
        rho, theta = np.broadcast_arrays(rho, theta)
        scalar = np.ndim(point[0]) == 0 and np.ndim(point[1]) == 0
        if not (np.all(rho > 0) and np.all(np.abs(theta) < math.pi / 2)):
            raise DomainError("Laplace ray transform needs rho > 0 and |theta| < pi/2")
        z = rho * np.exp(1j * theta)
        out = _oracle_integrate(f, np.full(len(z), -1.0), lambda t, i: np.exp(-t * z[i, None]),
                                abs_tol, max_sweeps, rel_tol)

    elif kind is TransformKind.HILBERT:
        x = np.atleast_1d(np.asarray(point, dtype=float))
        scalar = np.ndim(point) == 0
        if np.any(np.isin(x, f.breakpoints)):
            raise DomainError("Hilbert transform is singular at a breakpoint")
        out = _hilbert_excision(f, x, abs_tol, max_sweeps, rel_tol)
    else:  # pragma: no cover
        raise DomainError(f"unsupported kind {kind}")

    if f.is_real and kind in (TransformKind.POISSON, TransformKind.HILBERT):
        out = out.real
    return out[0] if scalar else out


def _hilbert_excision(f, x, abs_tol, max_sweeps, rel_tol=0.0):
    """Symmetric excision ``|t - x| > eps`` at two radii plus Richardson extrapolation."""
    bps = f.breakpoints
    dist = np.min(np.abs(x[:, None] - bps[None, :]), axis=1)
    eps0 = 0.5 * dist
    lo, hi, owner = [], [], []
    n = len(x)
    for level, eps in enumerate((eps0, 0.5 * eps0)):
        for k in range(n):
            edges = np.sort(np.concatenate([bps, [x[k] - eps[k], x[k] + eps[k]]]))
            a, b = edges[:-1], edges[1:]
            keep = ~((a >= x[k] - eps[k]) & (b <= x[k] + eps[k]))
            lo.append(a[keep])
            hi.append(b[keep])
            owner.append(np.full(np.count_nonzero(keep), level * n + k))
    lo, hi, owner = np.concatenate(lo), np.concatenate(hi), np.concatenate(owner)
    xs = np.concatenate([x, x])

    def integrand(t, idx):
        return f(t) / (xs[idx, None] - t) / math.pi

    vals, _ = quad_batch(integrand, lo, hi, owner, n_problems=2 * n,
                         abs_tol=abs_tol / 2, rel_tol=rel_tol / 2, max_sweeps=max_sweeps)
    coarse, fine = vals[:n], vals[n:]
    return (4.0 * fine - coarse) / 3.0
