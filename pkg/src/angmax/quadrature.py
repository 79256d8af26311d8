"""Batched adaptive Gauss-Kronrod (7/15) quadrature.

Many independent integrals are refined simultaneously: every subinterval
carries the index of the problem it belongs to, and each sweep evaluates the
integrand on all active subintervals in one vectorized call. A problem is
finished once the sum of its embedded-rule error estimates is below
``max(abs_tol, rel_tol * |I|)``; until then, every subinterval whose error
exceeds the problem's tolerance divided by its interval count is bisected.
"""

from __future__ import annotations

import numpy as np

from .func_model import AngmaxError

__all__ = ["QuadratureError", "quad_batch", "quad", "quad_semi_infinite"]

_XK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
# Gauss weights on the odd Kronrod nodes
_WG = np.zeros(15)
_WG[1::2] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
]


class QuadratureError(AngmaxError):
    """Tolerance not met; carries the best estimates and error bounds."""

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


def _gk15(func, lo, hi, owner):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    t = mid[:, None] + half[:, None] * _XK[None, :]
    fx = func(t, owner)
    k = (fx @ _WK) * half
    g = (fx @ _WG) * half
    return k, np.abs(k - g)


def quad_batch(func, lo, hi, owner=None, n_problems=None, abs_tol=1e-10,
               rel_tol=0.0, max_sweeps=80, max_intervals=4_000_000):
    """Integrate a batch of problems.

    Parameters
    ----------
    func : callable
        ``func(t, owner)`` where ``t`` has shape (k, 15) and ``owner`` has
        shape (k,) giving the problem index of each row. Must return an array
        of shape (k, 15), real or complex.
    lo, hi : array_like
        Initial subintervals (finite). Several may share a problem, e.g. to
        split at known kinks.
    owner : array_like of int, optional
        Problem index of each initial subinterval; defaults to ``arange``.
    n_problems : int, optional
        Number of problems; defaults to ``owner.max() + 1``.

    Returns
    -------
    values, errors : ndarray
        Integral estimates and summed error estimates, one per problem.

    Raises
    ------
    QuadratureError
        If some problem has not converged after ``max_sweeps`` bisections.
    """
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    owner = np.arange(len(lo)) if owner is None else np.asarray(owner, dtype=np.intp).ravel()
    if n_problems is None:
        n_problems = int(owner.max()) + 1 if len(owner) else 0

    val, err = _gk15(func, lo, hi, owner)
    done_val = np.zeros(n_problems, dtype=val.dtype)
    done_err = np.zeros(n_problems)
    finished = np.zeros(n_problems, dtype=bool)

    for _ in range(max_sweeps + 1):
        tot_val = done_val + np.bincount(owner, weights=val.real, minlength=n_problems)
        if np.iscomplexobj(val):
            tot_val = tot_val + 1j * np.bincount(owner, weights=val.imag, minlength=n_problems)
        tot_err = done_err + np.bincount(owner, weights=err, minlength=n_problems)
        count = np.bincount(owner, minlength=n_problems)
        tol = np.maximum(abs_tol, rel_tol * np.abs(tot_val))
        converged = (tot_err <= tol) & ~finished

        # retire converged problems
        if np.any(converged):
            done_val[converged] = tot_val[converged]
            done_err[converged] = tot_err[converged]
            finished |= converged
            keep = ~finished[owner]
            lo, hi, owner, val, err = lo[keep], hi[keep], owner[keep], val[keep], err[keep]
        if len(lo) == 0:
            return done_val, done_err

        thresh = tol / np.maximum(count, 1)
        split = err > thresh[owner]
        width = hi - lo
        tiny = width <= 8 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi))
        split &= ~tiny
        if not np.any(split) or len(lo) + np.count_nonzero(split) > max_intervals:
            break

        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_owner = np.concatenate([owner[split], owner[split]])
        new_val, new_err = _gk15(func, new_lo, new_hi, new_owner)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        owner = np.concatenate([owner[keep], new_owner])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])

    pending = ~finished
    est = done_val.copy()
    bound = done_err.copy()
    est[pending] = tot_val[pending]
    bound[pending] = tot_err[pending]
    raise QuadratureError(
        f"{np.count_nonzero(pending)} of {n_problems} integrals did not reach tolerance",
        est, bound)


def quad(func, a, b, points=(), abs_tol=1e-10, rel_tol=0.0, **kw):
    """Single finite integral of a vectorized ``func(t)``, split at ``points``."""
    edges = np.unique(np.concatenate([[a, b], [p for p in points if a < p < b]]))
    val, err = quad_batch(lambda t, _o: func(t), edges[:-1], edges[1:],
                          abs_tol=abs_tol, rel_tol=rel_tol, n_problems=None,
                          owner=np.zeros(len(edges) - 1, dtype=np.intp), **kw)
    return val[0], err[0]


def quad_semi_infinite(func, a, points=(), abs_tol=1e-10, rel_tol=0.0, **kw):
    """Integral of ``func`` over ``[a, inf)``.

    ``[a, c]`` (c the last of ``points``, or ``a``) is integrated directly;
    the remainder uses ``t = c + u / (1 - u)`` on ``u in [0, 1)``.
    """
    pts = sorted(p for p in points if p > a)
    c = pts[-1] if pts else a
    total, total_err = 0.0, 0.0
    if pts:
        v, e = quad(func, a, c, points=pts[:-1], abs_tol=abs_tol / 2, rel_tol=rel_tol, **kw)
        total, total_err = v, e

    def mapped(u):
        one_minus = 1.0 - u
        return func(c + u / one_minus) / (one_minus * one_minus)

    v, e = quad(mapped, 0.0, 1.0, abs_tol=abs_tol / 2, rel_tol=rel_tol, **kw)
    return total + v, total_err + e

