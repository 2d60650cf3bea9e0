"""Green functions and limit potentials.

A limit potential ``V`` determines the limiting zero distribution through
``(1/2pi) Laplacian V``. All built-in limits are radial, so the limit measure
is fixed by its radial CDF ``F(r)``, the right derivative of ``s -> V(e^s)``
at ``s = log r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np


class SetKind(str, Enum):
    UNIT_CIRCLE = "UnitCircle"
    INTERVAL = "Interval"
    CIRCLE_OF_RADIUS = "CircleOfRadius"
    TORUS2 = "Torus2"


@dataclass(frozen=True)
class CompactSetModel:
    kind: SetKind
    a: float = -1.0
    b: float = 1.0
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SetKind(self.kind))
        if self.kind is SetKind.INTERVAL and not self.a < self.b:
            raise ValueError("Interval needs a < b")
        if self.kind is SetKind.CIRCLE_OF_RADIUS and not self.radius > 0:
            raise ValueError("CircleOfRadius needs R > 0")

    @classmethod
    def unit_circle(cls):
        return cls(SetKind.UNIT_CIRCLE)

    @classmethod
    def interval(cls, a: float = -1.0, b: float = 1.0):
        return cls(SetKind.INTERVAL, a=float(a), b=float(b))

    @classmethod
    def circle(cls, radius: float):
        return cls(SetKind.CIRCLE_OF_RADIUS, radius=float(radius))

    @classmethod
    def torus2(cls):
        return cls(SetKind.TORUS2)


def green_value(K: CompactSetModel, z):
    """Green function of ``K`` with pole at infinity (vectorized over ``z``)."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore"):
        if K.kind is SetKind.UNIT_CIRCLE:
            out = np.maximum(0.0, np.log(np.abs(z)))
        elif K.kind is SetKind.CIRCLE_OF_RADIUS:
            out = np.maximum(0.0, np.log(np.abs(z) / K.radius))
        elif K.kind is SetKind.INTERVAL:
            w = (2 * z - (K.a + K.b)) / (K.b - K.a)
            s = np.sqrt(w * w - 1)
            # (w + s)(w - s) = 1, so the larger of the two has modulus >= 1
            out = np.maximum(np.log(np.abs(w + s)), np.log(np.abs(w - s)))
            out = np.maximum(out, 0.0)
        else:
            raise ValueError("green_value needs a one-variable set; use green_value_2")
    return out[()] if out.ndim == 0 else out


def green_value_2(z1, z2):
    """Green function of the unit torus in C^2: ``max(0, log|z1|, log|z2|)``."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    with np.errstate(divide="ignore"):
        out = np.maximum(0.0, np.maximum(np.log(np.abs(z1)), np.log(np.abs(z2))))
    return out[()] if out.ndim == 0 else out


# profiles ------------------------------------------------------------------

def _entropy_half(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(t > 0, t * np.log(t), 0.0) - np.where(t < 1, (1 - t) * np.log1p(-t), 0.0)
    return 0.5 * h


@dataclass(frozen=True, eq=False)
class Profile:
    """Exponential growth profile ``f`` on [0, 1], held as ``log f``.

    ``log_f`` must accept arrays. The tabulation drives the coarse search of
    the Legendre transform; the evaluator refines it.
    """

    log_f: Callable[[np.ndarray], np.ndarray]
    label: str = "profile"
    grid_size: int = 2049
    t: np.ndarray = field(init=False, repr=False)
    log_f_grid: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.grid_size < 1025:
            raise ValueError("profile tabulation needs at least 1025 points")
        t = np.linspace(0.0, 1.0, self.grid_size)
        lf = np.asarray(self.log_f(t), dtype=float)
        if not np.all(np.isfinite(lf)):
            raise ValueError("profile must be positive and finite on [0, 1]")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "log_f_grid", lf)

    def f(self, t):
        return np.exp(self.log_f(np.asarray(t, dtype=float)))

    @classmethod
    def constant(cls, c: float = 1.0, label: str | None = None):
        lc = math.log(c)
        return cls(lambda t: np.full(np.shape(t), lc), label=label or f"const:{c:g}")

    @classmethod
    def elliptic(cls):
        """``f(t) = exp(H(t)/2)`` with ``H`` the binary entropy in nats."""
        return cls(_entropy_half, label="elliptic")

    @classmethod
    def exp_decay(cls):
        return cls(lambda t: -np.asarray(t, dtype=float), label="exp-decay")


def profile_potential(p: Profile, z):
    """``V(z) = sup_{t in [0,1]} (t log|z| + log f(t))``, vectorized over ``z``."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore"):
        s = np.log(np.abs(z)).ravel()
    out = np.empty_like(s)
    zero = np.isneginf(s)
    # z = 0: the sup is attained at t = 0
    out[zero] = p.log_f_grid[0]
    if (~zero).any():
        out[~zero] = _legendre(p, s[~zero])
    out = out.reshape(z.shape)
    return out[()] if out.ndim == 0 else out


def _legendre(p: Profile, s: np.ndarray, chunk: int = 2048) -> np.ndarray:
    res = np.empty_like(s)
    for start in range(0, s.size, chunk):
        res[start:start + chunk] = _legendre_chunk(p, s[start:start + chunk])
    return res


def _legendre_chunk(p: Profile, s: np.ndarray) -> np.ndarray:
    t = p.t
    vals = s[:, None] * t[None, :] + p.log_f_grid[None, :]
    i = np.argmax(vals, axis=1)
    best = vals[np.arange(s.size), i]
    h = t[1] - t[0]
    lo = np.clip(t[i] - h, 0.0, 1.0)
    hi = np.clip(t[i] + h, 0.0, 1.0)

    def g(x):
        return s * x + p.log_f(x)

    # ternary search on the bracketing cells; exact for concave log f
    for _ in range(64):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        left = g(m1) >= g(m2)
        hi = np.where(left, m2, hi)
        lo = np.where(left, lo, m1)
    return np.maximum(best, g(0.5 * (lo + hi)))


# limit potentials -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LimitPotential:
    """Limit potential from a compact set's Green function or a profile."""

    source: CompactSetModel | Profile

    @classmethod
    def of(cls, source):
        return cls(source)

    @property
    def radial(self) -> bool:
        return isinstance(self.source, Profile) or self.source.kind in (
            SetKind.UNIT_CIRCLE, SetKind.CIRCLE_OF_RADIUS)

    @property
    def label(self) -> str:
        if isinstance(self.source, Profile):
            return f"profile:{self.source.label}"
        return self.source.kind.value

    def potential(self, z):
        if isinstance(self.source, Profile):
            return profile_potential(self.source, z)
        return green_value(self.source, z)

    def radial_cdf(self, r):
        return radial_limit_cdf(self, r)

    def atoms(self) -> tuple[float, ...]:
        """Radii carrying positive limit mass (jumps of ``F``)."""
        if isinstance(self.source, CompactSetModel):
            if self.source.kind is SetKind.UNIT_CIRCLE:
                return (1.0,)
            if self.source.kind is SetKind.CIRCLE_OF_RADIUS:
                return (self.source.radius,)
            return ()
        return _profile_atoms(self.source)

    def support_radii(self) -> tuple[float, float]:
        """Smallest and largest radius of the limit measure's support."""
        if isinstance(self.source, CompactSetModel):
            R = self.source.radius if self.source.kind is SetKind.CIRCLE_OF_RADIUS else 1.0
            return (R, R)
        # the maximizer t*(s) leaves 0 / reaches 1 where F leaves 0 / reaches 1
        s = np.linspace(-40.0, 40.0, 8001)
        F = radial_limit_cdf(self, np.exp(s))
        pos = np.nonzero(F > 0)[0]
        full = np.nonzero(F < 1)[0]
        lo = math.exp(s[pos[0]]) if pos.size else math.inf
        hi = math.exp(s[full[-1] + 1]) if full.size and full[-1] + 1 < s.size else math.inf
        return (lo, hi)


def _profile_atoms(p: Profile) -> tuple[float, ...]:
    # a linear piece of the concave envelope of log f with slope -log R puts
    # mass (its width) on the circle of radius R; strictly concave pieces span
    # a single grid cell
    cell = p.t[1] - p.t[0]
    return tuple(math.exp(-slope) for slope, width in _segments(p.t, p.log_f_grid)
                 if width > 2 * cell + 1e-12)


def _segments(t, y):
    hull = []
    for i in range(len(t)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or below the chord a -> i
            if (y[b] - y[a]) * (t[i] - t[a]) <= (y[i] - y[a]) * (t[b] - t[a]) + 1e-14:
                hull.pop()
            else:
                break
        hull.append(i)
    segs = []
    for a, b in zip(hull[:-1], hull[1:]):
        segs.append(((y[b] - y[a]) / (t[b] - t[a]), t[b] - t[a]))
    return segs


_KINK = 1e-3
_STEP = 1e-5


def radial_limit_cdf(limit: LimitPotential, r):
    """Limit mass of the closed disk of radius ``r``.

    Numerical right derivative of ``s -> V(e^s)`` at ``s = log r``: centred
    differences away from kinks, one-sided where the slope jumps by more
    than 1e-3 across the step. Vectorized over ``r``.
    """
    if not limit.radial:
        raise ValueError(f"{limit.label} is not radial")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radius must be positive")
    s = np.log(r).ravel()
    if isinstance(limit.source, CompactSetModel):
        R = limit.source.radius if limit.source.kind is SetKind.CIRCLE_OF_RADIUS else 1.0
        F = (r.ravel() >= R).astype(float)
    else:
        h = _STEP
        v0 = _vs(limit, s)
        vl = _vs(limit, s - h)
        vr = _vs(limit, s + h)
        left = (v0 - vl) / h
        right = (vr - v0) / h
        centred = (vr - vl) / (2 * h)
        F = np.where(np.abs(right - left) > _KINK, right, centred)
        F = np.clip(F, 0.0, 1.0)
    F = F.reshape(r.shape)
    return F[()] if F.ndim == 0 else F


def _vs(limit: LimitPotential, s):
    return limit.potential(np.exp(s).astype(complex))


def small_value_area_bound(n: int, leading: float, r: float) -> float:
    """Upper bound ``pi n r^2 c^(-2/n)`` on the area of ``{|P| <= r^n}``."""
    if n < 1 or not leading > 0 or r < 0:
        raise ValueError("need n >= 1, leading > 0, r >= 0")
    return math.pi * n * r * r * leading ** (-2.0 / n)
