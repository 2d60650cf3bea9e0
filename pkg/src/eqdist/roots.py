"""All complex zeros of a one-variable polynomial.

Ehrlich-Aberth simultaneous iteration started from the Newton polygon of
``(k, log|c_k|)``. Coefficients are normalized to unit max modulus; ``p`` is
evaluated by Horner in ``z`` inside the unit disk and by the reversed
polynomial in ``1/z`` outside it, so no intermediate exceeds ``n + 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .ensembles import IdenticallyZero, PolynomialSample

TRIM = 1e-300
RESIDUAL_MAX = 1e-8


class NoConvergence(RuntimeError):
    """Root iteration failed; ``partial`` holds the last iterate's diagnostics."""

    def __init__(self, msg, partial: "RootSet | None" = None):
        super().__init__(msg)
        self.partial = partial


@dataclass(frozen=True, eq=False)
class RootSet:
    roots: np.ndarray
    realized_degree: int
    dropped_leading: int
    residuals: np.ndarray
    nominal_n: int
    iterations: int = 0

    @property
    def zero_roots(self) -> int:
        return int(np.count_nonzero(self.roots == 0))


@njit(cache=True, nogil=True)
def _newton_ratio(c, z):
    n = c.size - 1
    if abs(z) <= 1.0:
        p = c[n]
        dp = 0j
        for k in range(n - 1, -1, -1):
            dp = dp * z + p
            p = p * z + c[k]
        if dp == 0:
            return complex(np.nan, np.nan) if p != 0 else 0j
        return p / dp
    # p(z) = z^n r(1/z) with r(w) = sum_k c_k w^(n-k)
    w = 1.0 / z
    r = c[0]
    dr = 0j
    for k in range(1, n + 1):
        dr = dr * w + r
        r = r * w + c[k]
    den = n * r - w * dr
    if den == 0:
        return complex(np.nan, np.nan) if r != 0 else 0j
    return z * r / den


@njit(cache=True, nogil=True)
def _backward_error(c, z):
    n = c.size - 1
    if abs(z) <= 1.0:
        p = c[n]
        a = abs(c[n])
        az = abs(z)
        for k in range(n - 1, -1, -1):
            p = p * z + c[k]
            a = a * az + abs(c[k])
    else:
        w = 1.0 / z
        aw = abs(w)
        p = c[0]
        a = abs(c[0])
        for k in range(1, n + 1):
            p = p * w + c[k]
            a = a * aw + abs(c[k])
    if a == 0:
        return np.inf
    return abs(p) / a


@njit(cache=True, nogil=True)
def _aberth(c, z, tol, max_iter):
    n = z.size
    floor = 4.0 * (n + 1) * 2.220446049250313e-16
    done = np.zeros(n, dtype=np.bool_)
    for it in range(max_iter):
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            N = _newton_ratio(c, zi)
            if N == 0:
                done[i] = True
                continue
            if not (np.isfinite(N.real) and np.isfinite(N.imag)):
                continue
            s = 0j
            for j in range(n):
                if j != i:
                    d = zi - z[j]
                    if d != 0:
                        s += 1.0 / d
            corr = N / (1.0 - N * s)
            if not (np.isfinite(corr.real) and np.isfinite(corr.imag)):
                corr = N
            znew = zi - corr
            z[i] = znew
            # stop on a small step, or once the backward error is at rounding
            # level (ill-conditioned roots never settle to a small step)
            if abs(corr) <= tol * abs(znew) or _backward_error(c, znew) <= floor:
                done[i] = True
        if done.all():
            return it + 1, True
    return max_iter, False


@njit(cache=True, nogil=True)
def _polish(c, z, steps):
    for i in range(z.size):
        for _ in range(steps):
            N = _newton_ratio(c, z[i])
            if N == 0 or not (np.isfinite(N.real) and np.isfinite(N.imag)):
                break
            cand = z[i] - N
            if _backward_error(c, cand) <= _backward_error(c, z[i]):
                z[i] = cand
            else:
                break


def newton_polygon_radii(c: np.ndarray) -> list[tuple[int, float]]:
    """Upper hull of ``(k, log|c_k|)`` as ``(multiplicity, radius)`` per edge."""
    with np.errstate(divide="ignore"):
        lc = np.log(np.abs(c))
    pts = [k for k in range(c.size) if np.isfinite(lc[k])]
    hull: list[int] = []
    for k in pts:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (lc[b] - lc[a]) * (k - a) <= (lc[k] - lc[a]) * (b - a):
                hull.pop()
            else:
                break
        hull.append(k)
    out = []
    for a, b in zip(hull[:-1], hull[1:]):
        out.append((b - a, math.exp((lc[a] - lc[b]) / (b - a))))
    return out


def initial_guesses(c: np.ndarray) -> np.ndarray:
    n = c.size - 1
    z = np.empty(n, dtype=complex)
    pos = 0
    sigma = 0.7
    for mult, radius in newton_polygon_radii(c):
        ang = 2 * np.pi * np.arange(mult) / mult + 2 * np.pi * pos / n + sigma
        z[pos:pos + mult] = radius * np.exp(1j * ang)
        pos += mult
    return z


def log_residuals(c: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """``|p(r)| / sum_k |c_k| |r|^k`` evaluated in log space."""
    from .ensembles import _scaled_horner

    out = np.zeros(roots.size)
    nz = roots != 0
    if not nz.any():
        return out
    acc, M = _scaled_horner(c, roots[nz])
    with np.errstate(divide="ignore"):
        logc = np.log(np.abs(c))
    k = np.arange(c.size)
    lr = np.log(np.abs(roots[nz]))
    with np.errstate(under="ignore"):
        den = np.exp(logc[None, :] + k[None, :] * lr[:, None] - M[:, None]).sum(axis=1)
    out[nz] = np.abs(acc) / den
    return out


def find_roots(p, tol: float = 1e-10, max_iter: int = 200) -> RootSet:
    """Roots of ``p`` (a :class:`PolynomialSample` or ascending coefficients).

    Leading and trailing coefficients below ``1e-300`` relative to the
    largest are trimmed; trailing trims become exact roots at 0, leading
    trims lower the realized degree.
    """
    if isinstance(p, PolynomialSample):
        c = np.asarray(p.coeffs, dtype=complex)
        nominal = p.n
    else:
        c = np.asarray(p, dtype=complex)
        nominal = c.size - 1
    m = np.max(np.abs(c)) if c.size else 0.0
    if m == 0:
        raise IdenticallyZero("polynomial is identically zero")
    c = c / m
    big = np.nonzero(np.abs(c) >= TRIM)[0]
    lo, hi = int(big[0]), int(big[-1])
    dropped = nominal - hi
    core = np.ascontiguousarray(c[lo:hi + 1])
    deg = core.size - 1
    zeros = np.zeros(lo, dtype=complex)
    if deg == 0:
        return RootSet(zeros, lo, dropped, np.zeros(lo), nominal, 0)
    z = initial_guesses(core)
    iters, ok = _aberth(core, z, tol, max_iter)
    _polish(core, z, 2)
    res = log_residuals(core, z)
    roots = np.concatenate([zeros, z])
    residuals = np.concatenate([np.zeros(lo), res])
    rs = RootSet(roots, hi, dropped, residuals, nominal, iters)
    if not ok:
        raise NoConvergence(f"no convergence after {max_iter} iterations", rs)
    if not np.all(np.isfinite(z)) or res.max() > RESIDUAL_MAX:
        raise NoConvergence(f"residual {np.nanmax(res):.3g} exceeds {RESIDUAL_MAX}", rs)
    return rs


def root_statistic_degree_policy(rs: RootSet, nominal_n: int | None = None) -> float:
    """Mass per root: ``1/n`` for the nominal degree, whatever the realized degree."""
    n = rs.nominal_n if nominal_n is None else nominal_n
    return 1.0 / n
