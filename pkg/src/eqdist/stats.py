"""Discrepancies between zero-counting measures and their limits, plus the
small-ball diagnostics (concentration function, covering numbers).
"""
from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .bases import CoefficientArray
from .ensembles import PolynomialSample, PolynomialSample2, log_abs_eval, log_abs_grid_2
from .potential import CompactSetModel, LimitPotential, SetKind, green_value_2
from .roots import RootSet

CLIP = -20.0


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    atoms: np.ndarray
    nominal_n: int

    def __post_init__(self):
        object.__setattr__(self, "atoms", np.asarray(self.atoms, dtype=complex).ravel())
        if self.nominal_n < 1:
            raise ValueError("nominal_n must be >= 1")
        if self.atoms.size > self.nominal_n:
            raise ValueError("more atoms than the nominal degree")

    @classmethod
    def from_roots(cls, rs: RootSet):
        return cls(rs.roots, rs.nominal_n)

    @property
    def weight(self) -> float:
        return 1.0 / self.nominal_n

    @property
    def mass(self) -> float:
        return self.atoms.size / self.nominal_n


@dataclass
class DiscrepancyReport:
    radial_ks: float | None = None
    weyl: list[float] | None = None
    annulus_mass: float | None = None
    potential_l1: float | None = None
    bl_estimate: float | None = None
    clip_bias: float | None = None

    def to_json(self) -> dict:
        return asdict(self)


# radial distances -------------------------------------------------------------

def ks_distance(emp: EmpiricalMeasure, cdf) -> float:
    """``sup_r |F_emp(r) - F(r)|`` for a continuous limit CDF ``F``."""
    r = np.sort(np.abs(emp.atoms))
    w = emp.weight
    if r.size == 0:
        return 1.0
    pos = r > 0
    F = np.zeros(r.size)
    if pos.any():
        F[pos] = cdf(r[pos])
    i = np.arange(1, r.size + 1)
    d = max(np.max(np.abs(i * w - F)), np.max(np.abs((i - 1) * w - F)))
    return float(max(d, 1.0 - emp.mass))


def levy_distance(emp: EmpiricalMeasure, cdf, tol: float = 1e-12) -> float:
    """Levy distance between the empirical radial CDF and ``cdf``."""
    r = np.sort(np.abs(emp.atoms))
    w = emp.weight
    m = r.size
    G = np.arange(1, m + 1) * w
    G_left = np.arange(0, m + 1) * w  # value of F_emp just below r_{i+1}; last is the total mass
    upper = np.append(r, np.inf)

    def F_at(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        fin = np.isfinite(x) & (x > 0)
        out[np.isinf(x)] = 1.0
        if fin.any():
            out[fin] = cdf(x[fin])
        return out

    def ok(eps):
        if m and np.any(G > F_at(r + eps) + eps + 1e-15):
            return False
        below = np.nextafter(upper - eps, -np.inf)
        return not np.any(F_at(below) - eps > G_left + 1e-15)

    if ok(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return float(hi)


def radial_ks(emp: EmpiricalMeasure, limit: LimitPotential) -> float:
    """Radial distance between the root measure and the limit.

    Kolmogorov-Smirnov when the limit radial CDF is continuous; Levy distance
    when the limit puts mass on circles, where the sup distance cannot
    converge for roots approaching the circle from both sides.
    """
    if not limit.radial:
        raise ValueError(f"{limit.label} has no radial CDF")
    if limit.atoms():
        return levy_distance(emp, limit.radial_cdf)
    return ks_distance(emp, limit.radial_cdf)


def weyl_sums(emp: EmpiricalMeasure, k_max: int) -> list[float]:
    """``|sum_atoms e^{i k arg(atom)}| / n`` for ``k = 1..k_max``; atoms at 0 carry no angle."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    a = emp.atoms[emp.atoms != 0]
    u = a / np.abs(a)
    out = []
    for k in range(1, k_max + 1):
        out.append(float(abs(np.sum(u ** k)) / emp.nominal_n))
    return out


def annulus_mass(emp: EmpiricalMeasure, r_lo: float, r_hi: float) -> float:
    if not 0 <= r_lo < r_hi:
        raise ValueError("need 0 <= r_lo < r_hi")
    r = np.abs(emp.atoms)
    return float(np.count_nonzero((r > r_lo) & (r < r_hi)) / emp.nominal_n)


# potential L1 --------------------------------------------------------------------

class Grid(NamedTuple):
    points: np.ndarray
    areas: np.ndarray


def polar_grid(r_lo: float, r_hi: float, n_r: int = 64, n_theta: int = 64) -> Grid:
    """Cell midpoints of a polar grid on ``r_lo <= |z| <= r_hi`` with their areas."""
    edges = np.linspace(r_lo, r_hi, n_r + 1)
    r = 0.5 * (edges[1:] + edges[:-1])
    dr = np.diff(edges)
    th = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    R, T = np.meshgrid(r, th, indexing="ij")
    pts = R * np.exp(1j * T)
    areas = (r * dr)[:, None] * np.full((1, n_theta), 2 * np.pi / n_theta)
    return Grid(pts.ravel(), areas.ravel())


def default_grid() -> Grid:
    return polar_grid(0.25, 2.5, 64, 64)


def default_grid_2(per_axis: int = 16) -> tuple[Grid, Grid]:
    """Per-variable factors of the product grid on ``0.5 <= |z_i| <= 1.5``."""
    g = polar_grid(0.5, 1.5, per_axis, per_axis)
    return g, g


def potential_l1_report(p, V=None, grid=None) -> tuple[float, float]:
    """``(error, clip_bias)`` of ``(1/n) log|p|`` against ``V`` on ``grid``.

    Values of ``(1/n) log|p|`` below -20 (including exact zeros) are clipped
    to -20; ``clip_bias`` is 20 times the area fraction of clipped cells.
    """
    if isinstance(p, PolynomialSample2):
        g1, g2 = grid if grid is not None else default_grid_2()
        u = log_abs_grid_2(p, g1.points, g2.points) / p.n
        v = green_value_2(g1.points[:, None], g2.points[None, :])
        area = g1.areas[:, None] * g2.areas[None, :]
    else:
        g = grid if grid is not None else default_grid()
        if V is None:
            V = LimitPotential(CompactSetModel.unit_circle())
        u = log_abs_eval(p, g.points) / p.n
        v = V.potential(g.points) if isinstance(V, LimitPotential) else V(g.points)
        area = g.areas
    clipped = u < CLIP
    u = np.where(clipped, CLIP, u)
    total = area.sum()
    err = float(np.sum(area * np.abs(u - v)) / total)
    bias = float(-CLIP * np.sum(area[clipped]) / total)
    return err, bias


def potential_l1_error(p, V=None, grid=None) -> float:
    return potential_l1_report(p, V, grid)[0]


# bounded-Lipschitz auxiliary ---------------------------------------------------

_BL_CENTERS = np.array([complex(x, y) for x in np.linspace(-2.5, 2.5, 21)
                        for y in np.linspace(-2.5, 2.5, 21)])
_BL_WIDTH = 0.5


def _tents(points: np.ndarray) -> np.ndarray:
    d = np.abs(points[:, None] - _BL_CENTERS[None, :])
    # sup norm 1 plus Lipschitz constant 1/width, normalized to BL norm 1
    return np.maximum(0.0, 1.0 - d / _BL_WIDTH) / (1.0 + 1.0 / _BL_WIDTH)


@functools.lru_cache(maxsize=32)
def _limit_tent_integrals(limit: LimitPotential) -> np.ndarray:
    nodes, weights = limit_quadrature(limit)
    out = np.zeros(_BL_CENTERS.size)
    for start in range(0, nodes.size, 8192):
        sl = slice(start, start + 8192)
        out += weights[sl] @ _tents(nodes[sl])
    return out


def limit_quadrature(limit: LimitPotential, n_angle: int = 128):
    """Nodes and weights approximating the limit measure."""
    src = limit.source
    if isinstance(src, CompactSetModel) and src.kind is SetKind.INTERVAL:
        m = 2048
        x = np.cos((2 * np.arange(m) + 1) * np.pi / (2 * m))
        nodes = 0.5 * (src.a + src.b) + 0.5 * (src.b - src.a) * x
        return nodes.astype(complex), np.full(m, 1.0 / m)
    th = 2 * np.pi * (np.arange(n_angle) + 0.5) / n_angle
    ang = np.exp(1j * th)
    atoms = limit.atoms()
    if isinstance(src, CompactSetModel):
        r = np.array(atoms)
        mass = np.ones(1)
    else:
        edges = np.exp(np.linspace(-6.0, 6.0, 1201))
        F = limit.radial_cdf(edges)
        mass = np.diff(F)
        r = np.sqrt(edges[1:] * edges[:-1])
        for a in atoms:
            # put each atom's jump exactly on its circle
            j = np.searchsorted(edges, a) - 1
            if 0 <= j < r.size:
                r[j] = a
    nodes = (r[:, None] * ang[None, :]).ravel()
    weights = (mass[:, None] * np.full((1, n_angle), 1.0 / n_angle)).ravel()
    return nodes, weights


def bl_estimate(emp: EmpiricalMeasure, limit: LimitPotential) -> float:
    """Max over a fixed 21x21 family of tent functions of the integral difference."""
    mine = emp.weight * _tents(emp.atoms).sum(axis=0) if emp.atoms.size else np.zeros(_BL_CENTERS.size)
    return float(np.max(np.abs(mine - _limit_tent_integrals(limit))))


# small-ball diagnostics ----------------------------------------------------------

def concentration_estimate(samples, r: float) -> float:
    """Largest fraction of samples in an open ball of radius ``r`` centred at a sample.

    A lower estimate of the concentration function ``Q(X; r)``.
    """
    x = np.asarray(samples, dtype=complex).ravel()
    if x.size == 0:
        raise ValueError("samples must be nonempty")
    uniq, counts = np.unique(x, return_counts=True)
    pts = np.column_stack([uniq.real, uniq.imag])
    tree = cKDTree(pts)
    # open ball: shrink the closed query radius by one ulp
    neigh = tree.query_ball_point(pts, np.nextafter(r, 0.0))
    best = max(int(counts[idx].sum()) for idx in neigh)
    return best / x.size


class KRCheck(NamedTuple):
    bound: float
    satisfied: bool


class DegenerateTerms(ValueError):
    pass


def kr_bound_check(per_term_Q: Sequence[float], sum_Q: float, C: float) -> KRCheck:
    """Compare ``Q(sum; r)`` with ``C / sqrt(sum_i (1 - Q(X_i; r)))``."""
    q = np.asarray(per_term_Q, dtype=float)
    if np.any(q <= 0) or np.any(q > 1):
        raise ValueError("per-term concentrations must lie in (0, 1]")
    spread = float(np.sum(1.0 - q))
    if spread == 0:
        raise DegenerateTerms("every term is fully concentrated")
    bound = C / math.sqrt(spread)
    return KRCheck(bound, bool(sum_Q <= bound))


def covering_number(points, radius: float) -> int:
    """Greedy count of closed ``radius``-balls centred at uncovered points covering all points.

    An upper bound on the minimal cover.
    """
    x = np.asarray(points, dtype=complex).ravel()
    if x.size == 0:
        raise ValueError("points must be nonempty")
    pts = np.column_stack([x.real, x.imag])
    neigh = [np.asarray(nb, dtype=int) for nb in cKDTree(pts).query_ball_point(pts, radius)]
    uncovered = np.ones(x.size, dtype=bool)
    count = 0
    while uncovered.any():
        # centres are drawn from the uncovered points; argmax keeps the lowest index on ties
        gains = np.array([np.count_nonzero(uncovered[nb]) if uncovered[i] else -1
                          for i, nb in enumerate(neigh)])
        best = int(np.argmax(gains))
        uncovered[neigh[best]] = False
        count += 1
    return count


def normalized_coefficient_points(p, z) -> np.ndarray:
    """``a_k / ||a||_2`` for the terms ``a_k = c_k z^k`` of a sample or array."""
    z = complex(z)
    if isinstance(p, CoefficientArray):
        logmod = p.log_f.copy()
        unit = np.where(np.isfinite(logmod), 1.0 + 0j, 0j)
    else:
        c = np.asarray(p.coeffs, dtype=complex)
        mag = np.abs(c)
        with np.errstate(divide="ignore"):
            logmod = np.log(mag)
        unit = np.where(mag > 0, np.exp(1j * np.angle(c)), 0)
    k = np.arange(logmod.size)
    if z == 0:
        logmod = np.where(k == 0, logmod, -np.inf)
    else:
        logmod = logmod + k * math.log(abs(z))
        unit = unit * np.exp(1j * k * np.angle(z))
    if not np.any(np.isfinite(logmod)):
        raise ValueError("all terms vanish at z")
    top = np.max(logmod)
    with np.errstate(under="ignore"):
        mag = np.exp(logmod - top)
    mag = mag / np.sqrt(np.sum(mag ** 2))
    return np.where(unit != 0, mag * unit, 0j)
