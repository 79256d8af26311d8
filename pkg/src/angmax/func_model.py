"""Input functions on the half-line, sectors, polar points and radial grids.

Everything here is immutable. Simple functions are stored as numpy arrays of
breakpoints (float64) and piece values (complex128); a function vanishes
outside ``[t_0, t_n]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "AngmaxError",
    "DomainError",
    "BreakpointOrderError",
    "NegativeSupportError",
    "NonFiniteError",
    "ShapeMismatchError",
    "SimpleFunction",
    "ExpFunction",
    "Sector",
    "SLIT_PLANE",
    "UPPER_HALF_PLANE",
    "RIGHT_HALF_PLANE",
    "PolarPoint",
    "RadialGrid",
    "make_simple",
    "lp_norm",
    "dilate",
    "combine",
    "scale",
    "zero_function",
    "indicator",
]


class AngmaxError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(AngmaxError, ValueError):
    """An argument lies outside the domain of an operation."""


class BreakpointOrderError(DomainError):
    pass


class NegativeSupportError(DomainError):
    pass


class NonFiniteError(DomainError):
    pass


class ShapeMismatchError(DomainError):
    pass


@dataclass(frozen=True, eq=False)
class SimpleFunction:
    """Piecewise-constant function with finite support in ``[0, inf)``.

    ``values[i]`` is the value on ``(breakpoints[i], breakpoints[i+1])``.
    Construct through :func:`make_simple`, which validates the input.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.breakpoints.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def n_pieces(self) -> int:
        return len(self.values)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0))

    @property
    def is_nonnegative(self) -> bool:
        return self.is_real and bool(np.all(self.values.real >= 0))

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0))

    def __call__(self, t):
        """Pointwise value; pieces are closed on the left, open on the right."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        inside = (idx >= 0) & (idx < self.n_pieces)
        out = np.zeros(t.shape, dtype=complex)
        out[inside] = self.values[idx[inside]]
        return out

    def __eq__(self, other):
        if not isinstance(other, SimpleFunction):
            return NotImplemented
        return (np.array_equal(self.breakpoints, other.breakpoints)
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def __repr__(self):
        return (f"SimpleFunction(breakpoints={self.breakpoints.tolist()}, "
                f"values={self.values.tolist()})")

    def to_dict(self) -> dict:
        return {
            "breakpoints": [float(t) for t in self.breakpoints],
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SimpleFunction":
        try:
            bps = data["breakpoints"]
            raw = data["values"]
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed simple function object: {exc}") from None
        values = []
        for v in raw:
            if isinstance(v, (list, tuple)):
                if len(v) != 2:
                    raise ShapeMismatchError(f"value entry {v!r} is not [re, im]")
                values.append(complex(float(v[0]), float(v[1])))
            else:
                values.append(complex(v))
        return make_simple(bps, values)

    @classmethod
    def from_json(cls, text: str) -> "SimpleFunction":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"invalid JSON for simple function: {exc}") from None
        return cls.from_dict(data)


@dataclass(frozen=True)
class ExpFunction:
    """``t -> amplitude * exp(-rate * t)`` on the half-line."""

    amplitude: complex = 1.0
    rate: float = 1.0

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise DomainError(f"rate must be positive and finite, got {self.rate!r}")
        if not np.isfinite(complex(self.amplitude)):
            raise NonFiniteError("amplitude must be finite")

    @property
    def is_real(self) -> bool:
        return complex(self.amplitude).imag == 0

    @property
    def is_nonnegative(self) -> bool:
        return self.is_real and complex(self.amplitude).real >= 0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0, complex(self.amplitude) * np.exp(-self.rate * t), 0.0)


Function = Union[SimpleFunction, ExpFunction]


@dataclass(frozen=True)
class Sector:
    """Open sector ``theta_lo < arg z < theta_hi``."""

    theta_lo: float
    theta_hi: float

    def __post_init__(self):
        if not (self.theta_lo < self.theta_hi):
            raise DomainError("sector requires theta_lo < theta_hi")
        if self.theta_hi - self.theta_lo > 2 * math.pi:
            raise DomainError("sector opening exceeds 2*pi")

    @property
    def width(self) -> float:
        return self.theta_hi - self.theta_lo

    def contains(self, theta) -> bool:
        theta = np.asarray(theta)
        return bool(np.all((theta > self.theta_lo) & (theta < self.theta_hi)))

    def within(self, other: "Sector") -> bool:
        return other.theta_lo <= self.theta_lo and self.theta_hi <= other.theta_hi


SLIT_PLANE = Sector(0.0, 2 * math.pi)
UPPER_HALF_PLANE = Sector(0.0, math.pi)
RIGHT_HALF_PLANE = Sector(-math.pi / 2, math.pi / 2)


@dataclass(frozen=True)
class PolarPoint:
    rho: float
    theta: float

    def __post_init__(self):
        if not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho!r}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @property
    def x(self) -> float:
        return self.rho * math.cos(self.theta)

    @property
    def y(self) -> float:
        return self.rho * math.sin(self.theta)


@dataclass(frozen=True)
class RadialGrid:
    """Log-spaced nodes on ``[rho_min, rho_max]``."""

    rho_min: float = 1e-3
    rho_max: float = 1e3
    count: int = 2048
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0 < self.rho_min < self.rho_max) or not math.isfinite(self.rho_max):
            raise DomainError("grid requires 0 < rho_min < rho_max < inf")
        if int(self.count) != self.count or self.count < 2:
            raise DomainError("grid count must be an integer >= 2")
        nodes = np.geomspace(self.rho_min, self.rho_max, int(self.count))
        # geomspace may round the endpoints
        nodes[0], nodes[-1] = self.rho_min, self.rho_max
        if not np.all(np.diff(nodes) > 0):
            raise DomainError("grid nodes are not strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    def restrict(self, lo: float, hi: float) -> "RadialGrid":
        """Same node density, restricted to ``[lo, hi]``."""
        per_decade = (self.count - 1) / math.log10(self.rho_max / self.rho_min)
        count = max(2, int(round(per_decade * math.log10(hi / lo))) + 1)
        return RadialGrid(lo, hi, count)


def make_simple(breakpoints, values) -> SimpleFunction:
    bps = np.array(breakpoints, dtype=float).ravel()
    vals = np.array(values, dtype=complex).ravel()
    if len(vals) < 1 or len(bps) != len(vals) + 1:
        raise ShapeMismatchError(
            f"need n+1 breakpoints for n >= 1 values, got {len(bps)} and {len(vals)}")
    if not (np.all(np.isfinite(bps)) and np.all(np.isfinite(vals))):
        raise NonFiniteError("breakpoints and values must be finite")
    if np.any(np.diff(bps) <= 0):
        raise BreakpointOrderError("breakpoints must be strictly increasing")
    if bps[0] < 0:
        raise NegativeSupportError("support must lie in [0, inf)")
    return SimpleFunction(bps, vals)


def zero_function(a: float = 0.0, b: float = 1.0) -> SimpleFunction:
    return make_simple([a, b], [0.0])


def indicator(a: float, b: float, value: complex = 1.0) -> SimpleFunction:
    return make_simple([a, b], [value])


def lp_norm(f: Function, p: float) -> float:
    """Exact L^p norm of a simple or exponential function."""
    if not p >= 1:
        raise DomainError(f"exponent must satisfy p >= 1, got {p!r}")
    if isinstance(f, ExpFunction):
        amp = abs(complex(f.amplitude))
        if math.isinf(p):
            return amp
        return amp * (p * f.rate) ** (-1.0 / p)
    mags = np.abs(f.values)
    if math.isinf(p):
        return float(mags.max())
    if p == 1:
        return float(np.sum(mags * f.widths))
    return float(np.sum(mags ** p * f.widths) ** (1.0 / p))


def dilate(f: Function, s: float) -> Function:
    """Return ``t -> f(s t)``."""
    if not s > 0:
        raise DomainError(f"dilation factor must be positive, got {s!r}")
    if isinstance(f, ExpFunction):
        return ExpFunction(f.amplitude, f.rate * s)
    return SimpleFunction(f.breakpoints / s, f.values.copy())


def scale(c: complex, f: SimpleFunction) -> SimpleFunction:
    return SimpleFunction(f.breakpoints.copy(), complex(c) * f.values)


def combine(a: complex, f: SimpleFunction, b: complex, g: SimpleFunction) -> SimpleFunction:
    """Exact piecewise-constant ``a f + b g`` on the merged breakpoints."""
    bps = np.union1d(f.breakpoints, g.breakpoints)
    mids = 0.5 * (bps[:-1] + bps[1:])
    vals = complex(a) * f(mids) + complex(b) * g(mids)
    return SimpleFunction(bps, vals)
