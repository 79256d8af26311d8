"""Angular maximal functions, level-set measures and the Hardy-Littlewood maximal function.

The supremum over an open angular interval is approached from a fixed sample
set (a uniform interior grid plus geometric boundary layers that stop at a
relative offset of ``1e-8`` from each endpoint), followed by ternary
refinement around the best sample. Sector endpoints are never evaluated, so
a reported value is a lower bound of the supremum.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .func_model import DomainError, RadialGrid, Sector, SimpleFunction
from .transforms import TransformKind, evaluate_polar

__all__ = [
    "AngleSearchConfig",
    "RadialProfile",
    "DistributionSummary",
    "ProfileNorm",
    "DECAY_EXPONENT",
    "angle_samples",
    "angular_max",
    "max_profile",
    "angular_max_nodes",
    "level_set_measure",
    "distribution",
    "lp_norm_profile",
    "interval_average",
    "hl_maximal",
    "format_float",
]

# power-law decay rate rho**-k of each maximal profile at large rho
DECAY_EXPONENT = {
    TransformKind.POISSON: 1.0,
    TransformKind.STIELTJES: 1.0,
    TransformKind.CAUCHY_INTEGRAL: 1.0,
    TransformKind.LAPLACE_RAY: 1.0,
}

_CHUNK_ELEMENTS = 1 << 20


@dataclass(frozen=True)
class AngleSearchConfig:
    coarse_count: int = 512
    boundary_layers: int = 24
    refine_iters: int = 40
    min_offset: float = 1e-8

    def __post_init__(self):
        if self.coarse_count < 8:
            raise DomainError("coarse_count must be >= 8")
        if self.boundary_layers < 0 or self.refine_iters < 0:
            raise DomainError("boundary_layers and refine_iters must be >= 0")
        if not 0 < self.min_offset < 0.5:
            raise DomainError("min_offset must lie in (0, 0.5)")

    def doubled(self) -> "AngleSearchConfig":
        return AngleSearchConfig(2 * self.coarse_count, 2 * self.boundary_layers,
                                 self.refine_iters, self.min_offset)


def angle_samples(sector: Sector, cfg: AngleSearchConfig) -> np.ndarray:
    """Sorted sample angles strictly inside ``sector``.

    Doubling ``coarse_count`` and ``boundary_layers`` yields a superset.
    """
    w = sector.width
    k = np.arange(1, cfg.coarse_count)
    coarse = sector.theta_lo + w * k / cfg.coarse_count
    if cfg.boundary_layers:
        j = np.arange(1, cfg.boundary_layers + 1)
        offsets = w * cfg.min_offset ** (j / cfg.boundary_layers)
        layers = np.concatenate([sector.theta_lo + offsets, sector.theta_hi - offsets])
    else:
        layers = np.empty(0)
    return np.unique(np.concatenate([coarse, layers]))


def _resolve_sector(kind: TransformKind, sector):
    natural = kind.sector
    if natural is None:
        raise DomainError(f"{kind.value} has no angular sector")
    if sector is None:
        return natural
    if not sector.within(natural):
        raise DomainError(f"sector {sector} leaves the natural sector {natural} of {kind.value}")
    return sector


def _search(kind, f, rhos, sector, cfg):
    thetas = angle_samples(sector, cfg)
    rhos = np.asarray(rhos, dtype=float)
    vals = np.abs(evaluate_polar(kind, f, rhos[:, None], thetas[None, :]))
    j = np.argmax(vals, axis=1)
    rows = np.arange(len(rhos))
    best = vals[rows, j]
    best_theta = thetas[j]
    left = thetas[np.maximum(j - 1, 0)]
    right = thetas[np.minimum(j + 1, len(thetas) - 1)]
    for _ in range(cfg.refine_iters):
        third = (right - left) / 3.0
        m1 = left + third
        m2 = right - third
        v1 = np.abs(evaluate_polar(kind, f, rhos, m1))
        v2 = np.abs(evaluate_polar(kind, f, rhos, m2))
        up = v1 > best
        best = np.where(up, v1, best)
        best_theta = np.where(up, m1, best_theta)
        up = v2 > best
        best = np.where(up, v2, best)
        best_theta = np.where(up, m2, best_theta)
        go_left = v1 >= v2
        right = np.where(go_left, m2, right)
        left = np.where(go_left, left, m1)
    return best, best_theta


def angular_max(kind, f, rho: float, sector: Sector | None = None,
                cfg: AngleSearchConfig | None = None) -> tuple[float, float]:
    """``sup |T f(rho e^{i theta})|`` over the open sector, with an achieving angle."""
    kind = TransformKind.parse(kind)
    sector = _resolve_sector(kind, sector)
    cfg = cfg or AngleSearchConfig()
    if not rho > 0:
        raise DomainError("rho must be positive")
    val, theta = _search(kind, f, np.array([rho]), sector, cfg)
    return float(val[0]), float(theta[0])


@dataclass(frozen=True, eq=False)
class RadialProfile:
    grid: RadialGrid
    values: np.ndarray
    arg_theta: np.ndarray
    kind: TransformKind
    sector: Sector

    @property
    def rho(self) -> np.ndarray:
        return self.grid.nodes

    def to_csv(self) -> str:
        lines = ["rho,value,theta_argmax"]
        for r, v, t in zip(self.grid.nodes, self.values, self.arg_theta):
            lines.append(f"{format_float(r)},{format_float(v)},{format_float(t)}")
        return "\n".join(lines) + "\n"


def angular_max_nodes(kind, f, rhos, sector: Sector | None = None,
                      cfg: AngleSearchConfig | None = None, jobs: int = 1):
    """Vectorized :func:`angular_max` over arbitrary positive radii.

    Radii are processed in fixed chunks; with ``jobs > 1`` chunks run in a
    thread pool. The output does not depend on ``jobs``.
    """
    kind = TransformKind.parse(kind)
    sector = _resolve_sector(kind, sector)
    cfg = cfg or AngleSearchConfig()
    rhos = np.asarray(rhos, dtype=float).ravel()
    if not np.all(rhos > 0):
        raise DomainError("radii must be positive")
    n_angles = len(angle_samples(sector, cfg))
    step = max(1, _CHUNK_ELEMENTS // n_angles)
    chunks = [rhos[i:i + step] for i in range(0, len(rhos), step)]

    def work(chunk):
        return _search(kind, f, chunk, sector, cfg)

    if jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    if not parts:
        return np.empty(0), np.empty(0)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def max_profile(kind, f, grid: RadialGrid | None = None, sector: Sector | None = None,
                cfg: AngleSearchConfig | None = None, jobs: int = 1) -> RadialProfile:
    """Angular maximal function at every node of ``grid``."""
    kind = TransformKind.parse(kind)
    sector = _resolve_sector(kind, sector)
    grid = grid or RadialGrid()
    values, thetas = angular_max_nodes(kind, f, grid.nodes, sector, cfg, jobs)
    values.setflags(write=False)
    thetas.setflags(write=False)
    return RadialProfile(grid, values, thetas, kind, sector)


class DistributionSummary(NamedTuple):
    lambdas: np.ndarray
    measures: np.ndarray
    weak_norm: float


def level_set_measure(rho, values, lambdas) -> np.ndarray:
    """Measure of ``{values > lam}`` on ``[rho[0], rho[-1]]`` under linear interpolation."""
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(values, dtype=float)
    lam = np.asarray(lambdas, dtype=float)[:, None]
    h = np.diff(rho)[None, :]
    v0, v1 = v[None, :-1], v[None, 1:]
    above0, above1 = v0 > lam, v1 > lam
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(above0, (v0 - lam) / (v0 - v1), (v1 - lam) / (v1 - v0))
    frac = np.where(above0 & above1, 1.0, np.where(above0 | above1, frac, 0.0))
    return np.sum(frac * h, axis=1)


def distribution(profile, lambdas) -> DistributionSummary:
    """Level-set measures ``mu(lam)`` of a profile and ``sup lam * mu(lam)``.

    ``profile`` is a :class:`RadialProfile` or a ``(rho, values)`` pair.
    Lambdas are returned in decreasing order.
    """
    lam = np.sort(np.asarray(lambdas, dtype=float).ravel())[::-1]
    if lam.size == 0:
        raise DomainError("need at least one lambda")
    if not np.all(lam > 0):
        raise DomainError("lambdas must be positive")
    if isinstance(profile, RadialProfile):
        rho, values = profile.rho, profile.values
    else:
        rho, values = profile
    if not np.all(np.isfinite(values)):
        raise DomainError("profile contains non-finite values")
    mu = level_set_measure(rho, values, lam)
    # interpolation can break monotonicity only by rounding
    mu = np.maximum.accumulate(mu)
    return DistributionSummary(lam, mu, float(np.max(lam * mu)))


class ProfileNorm(NamedTuple):
    norm: float
    tail: float


def lp_norm_profile(profile: RadialProfile, p: float, tail_policy: str = "ignore"):
    """Trapezoid L^p norm of a profile over its grid window.

    With ``tail_policy="report"`` a :class:`ProfileNorm` is returned whose
    ``tail`` is the estimated relative increase of the norm from the mass
    outside the window: below ``rho_min`` the profile is taken as its first
    node value, above ``rho_max`` it is continued as ``v_last (rho_max/rho)**k``
    with ``k`` from :data:`DECAY_EXPONENT`. The tail is infinite when
    ``k p <= 1``.
    """
    if not p >= 1:
        raise DomainError(f"exponent must satisfy p >= 1, got {p!r}")
    if tail_policy not in ("ignore", "report"):
        raise DomainError("tail_policy must be 'ignore' or 'report'")
    v = np.asarray(profile.values, dtype=float)
    rho = profile.rho
    if math.isinf(p):
        norm = float(np.max(v))
        return ProfileNorm(norm, 0.0) if tail_policy == "report" else norm
    mass = float(np.trapezoid(v ** p, rho))
    norm = mass ** (1.0 / p)
    if tail_policy == "ignore":
        return norm
    k = DECAY_EXPONENT.get(profile.kind, 1.0)
    lower = v[0] ** p * rho[0]
    if k * p <= 1:
        upper = math.inf if v[-1] > 0 else 0.0
    else:
        upper = v[-1] ** p * rho[-1] / (k * p - 1)
    if mass == 0:
        tail = 0.0 if lower + upper == 0 else math.inf
    else:
        tail = ((mass + lower + upper) / mass) ** (1.0 / p) - 1.0
    return ProfileNorm(norm, float(tail))


def _cumulative(f: SimpleFunction, t):
    """``int_{-inf}^t f``, exact for simple functions."""
    t = np.asarray(t, dtype=float)
    a = f.breakpoints[:-1]
    d = f.widths
    cover = np.clip(t[..., None] - a, 0.0, d)
    return cover @ f.values.real


def interval_average(f: SimpleFunction, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (_cumulative(f, b) - _cumulative(f, a)) / (b - a)


def hl_maximal(f: SimpleFunction, x: float) -> float:
    """Non-centred Hardy-Littlewood maximal function of a nonnegative simple function.

    For fixed right endpoint the average is a linear-fractional, hence
    monotone, function of the left endpoint on each piece (and vice versa),
    so the supremum is attained with both endpoints in the breakpoints
    together with ``x``, or in the limit of intervals shrinking to ``x``.
    """
    if not f.is_nonnegative:
        raise DomainError("hl_maximal needs a real nonnegative function")
    x = float(x)
    bps = f.breakpoints
    lefts = np.append(bps[bps <= x], x)
    rights = np.append(bps[bps >= x], x)
    A, B = np.meshgrid(lefts, rights, indexing="ij")
    ok = B > A
    best = 0.0
    if np.any(ok):
        best = float(np.max(interval_average(f, A[ok], B[ok])))
    vals = f.values.real
    i_right = np.searchsorted(bps, x, side="right") - 1
    i_left = np.searchsorted(bps, x, side="left") - 1
    for i in (i_left, i_right):
        if 0 <= i < f.n_pieces:
            best = max(best, float(vals[i]))
    return best


def format_float(v) -> str:
    """17 significant digits; scientific notation outside ``[1e-4, 1e6)``, zero as ``0``."""
    v = float(v)
    if v == 0:
        return "-0" if math.copysign(1.0, v) < 0 else "0"
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    a = abs(v)
    if 1e-4 <= a < 1e6:
        return f"{v:.17g}"
    return f"{v:.16e}"
