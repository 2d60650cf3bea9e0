"""Random polynomial ensembles.

Samples hold monomial coefficients normalized to unit max modulus together
with the log of the removed scale, so heavy-tailed draws whose moduli
overflow a double are still represented exactly up to rounding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rngdist
from .bases import CoefficientArray, OrthoBasis
from .rngdist import DistributionSpec


class IdenticallyZero(ValueError):
    """A drawn polynomial has all coefficients zero."""


@dataclass(frozen=True, eq=False)
class PolynomialSample:
    n: int
    coeffs: np.ndarray  # lowest degree first, max modulus 1
    log_scale: float = 0.0
    ensemble_label: str = "explicit"
    seed: int = 0
    trial: int = 0

    @property
    def monomial_coeffs(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.coeffs * np.exp(self.log_scale)

    @classmethod
    def from_coeffs(cls, coeffs, label: str = "explicit", **kw):
        c = np.asarray(coeffs, dtype=complex)
        c, log_scale = _normalize(c)
        return cls(len(c) - 1, c, log_scale, label, **kw)

    def __call__(self, z):
        return np.exp(self.log_scale) * np.polyval(self.coeffs[::-1], z)


@dataclass(frozen=True, eq=False)
class PolynomialSample2:
    n: int
    coeffs: np.ndarray  # (n+1, n+1); entry (i, j) multiplies z1^i z2^j, zero when i+j > n
    log_scale: float = 0.0
    seed: int = 0
    trial: int = 0
    ensemble_label: str = "kac2"

    def items(self):
        for i, j in _lex_indices(self.n):
            yield (i, j), self.coeffs[i, j] * np.exp(self.log_scale)


def _normalize(c: np.ndarray) -> tuple[np.ndarray, float]:
    m = np.max(np.abs(c))
    if m == 0:
        raise IdenticallyZero("polynomial is identically zero")
    if not np.isfinite(m):
        raise ValueError("coefficients must be finite; use the log-polar constructors")
    return c / m, float(np.log(m))


def _from_logpolar(logmod: np.ndarray, unit: np.ndarray) -> tuple[np.ndarray, float]:
    live = unit != 0
    if not np.any(live & np.isfinite(logmod)):
        raise IdenticallyZero("polynomial is identically zero")
    top = float(np.max(logmod[live]))
    with np.errstate(under="ignore"):
        c = np.where(live, np.exp(np.where(live, logmod - top, 0.0)) * unit, 0j)
    return c, top


def _draws(dist: DistributionSpec, seed: int, trial: int, count: int, key):
    rng = rngdist.stream(seed, *(key if key is not None else (trial,)))
    return rngdist.sample_logpolar(dist, rng, count)


def draw_kac(n: int, dist: DistributionSpec, seed: int, trial: int = 0, key=None) -> PolynomialSample:
    """``sum_j xi_j z^j``; ``key`` overrides the default stream key ``(trial,)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lp = _draws(dist, seed, trial, n + 1, key)
    c, top = _from_logpolar(lp.logmod, lp.unit)
    return PolynomialSample(n, c, top, "kac", seed, trial)


def draw_ortho(n: int, basis: OrthoBasis, dist: DistributionSpec, seed: int, trial: int = 0,
               key=None) -> PolynomialSample:
    """``sum_j xi_j q_j(z)`` converted to monomial coefficients."""
    if basis.degree < n:
        raise ValueError(f"basis degree {basis.degree} < {n}")
    lp = _draws(dist, seed, trial, n + 1, key)
    xi, top = _from_logpolar(lp.logmod, lp.unit)
    C = basis.coeffs[:n + 1, :n + 1]
    mono = xi @ C
    c, extra = _normalize(mono)
    return PolynomialSample(n, c, top + extra, f"ortho:{basis.label}", seed, trial)


def draw_array(n: int, arr: CoefficientArray, dist: DistributionSpec, seed: int, trial: int = 0,
               key=None) -> PolynomialSample:
    """``sum_k xi_k f_{n,k} z^k``."""
    if arr.n != n:
        raise ValueError(f"array has degree {arr.n}, expected {n}")
    lp = _draws(dist, seed, trial, n + 1, key)
    unit = np.where(np.isfinite(arr.log_f), lp.unit, 0j)
    c, top = _from_logpolar(lp.logmod + np.where(np.isfinite(arr.log_f), arr.log_f, 0.0), unit)
    return PolynomialSample(n, c, top, f"array:{arr.provenance}", seed, trial)


def _lex_indices(n: int):
    return [(i, j) for i in range(n + 1) for j in range(n + 1 - i)]


def draw_kac2(n: int, dist: DistributionSpec, seed: int, trial: int = 0, key=None) -> PolynomialSample2:
    """``sum_{i+j<=n} xi_ij z1^i z2^j`` with coefficients drawn in lexicographic order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = _lex_indices(n)
    lp = _draws(dist, seed, trial, len(idx), key)
    c, top = _from_logpolar(lp.logmod, lp.unit)
    dense = np.zeros((n + 1, n + 1), dtype=complex)
    ii, jj = np.array(idx).T
    dense[ii, jj] = c
    return PolynomialSample2(n, dense, top, seed, trial)


# evaluation -----------------------------------------------------------------

def _scaled_horner(coeffs: np.ndarray, z: np.ndarray, chunk: int = 1024):
    """Return ``(acc, M)`` with ``p(z) = acc * exp(M)`` and ``|acc| <= n + 1``.

    The largest term ``|c_k z^k|`` is factored out (as ``M``) before Horner
    runs on the rescaled polynomial in ``z / |z|``.
    """
    z = np.asarray(z, dtype=complex).ravel()
    n = coeffs.size - 1
    with np.errstate(divide="ignore"):
        logc = np.log(np.abs(coeffs))
        rho = np.abs(z)
        logrho = np.log(rho)
    mag = np.abs(coeffs)
    # via the angle: dividing a subnormal complex by its modulus can overflow
    unitc = np.where(mag > 0, np.exp(1j * np.angle(coeffs)), 0)
    k = np.arange(n + 1)
    acc_out = np.empty(z.size, dtype=complex)
    M_out = np.empty(z.size)
    for start in range(0, z.size, chunk):
        sl = slice(start, start + chunk)
        lr = logrho[sl]
        zero = np.isneginf(lr)
        expo = logc[None, :] + k[None, :] * np.where(zero, 0.0, lr)[:, None]
        expo[zero, 1:] = -np.inf
        M = np.max(expo, axis=1)
        M[np.isneginf(M)] = 0.0  # p(0) = 0 exactly
        with np.errstate(under="ignore", invalid="ignore"):
            d = np.exp(expo - M[:, None]) * unitc[None, :]
        u = np.where(zero, 1.0, z[sl] / np.where(zero, 1.0, rho[sl]))
        acc = d[:, n].copy()
        for j in range(n - 1, -1, -1):
            acc = acc * u + d[:, j]
        acc_out[sl] = acc
        M_out[sl] = M
    return acc_out, M_out


def _scaled_log_abs(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc, M = _scaled_horner(coeffs, z)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(acc)) + M


def log_abs_eval(p: PolynomialSample, z):
    """``log|p(z)|``; ``-inf`` marks an exact zero. Vectorized over ``z``."""
    z = np.asarray(z, dtype=complex)
    out = (_scaled_log_abs(p.coeffs, z) + p.log_scale).reshape(z.shape)
    return out[()] if out.ndim == 0 else out


def log_abs_eval_2(p: PolynomialSample2, z1, z2):
    """``log|p(z1, z2)|``, vectorized over broadcast ``z1``, ``z2``.

    Evaluated as a polynomial in ``z1`` whose coefficients are the inner
    polynomials in ``z2``, each by scaled evaluation.
    """
    z1, z2 = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))
    shape = z1.shape
    z1 = z1.ravel()
    z2 = z2.ravel()
    n = p.n
    # inner polynomials P_i(z2) as (scaled value, log scale) pairs
    inner = np.zeros((z2.size, n + 1), dtype=complex)
    logs = np.full((z2.size, n + 1), -np.inf)
    for i in range(n + 1):
        row = p.coeffs[i, : n + 1 - i]
        if np.any(row):
            inner[:, i], logs[:, i] = _scaled_horner(row, z2)
    out = np.empty(z1.size)
    for m in range(z1.size):
        live = inner[m] != 0
        if not live.any():
            out[m] = -np.inf
            continue
        top = np.max(logs[m][live])
        with np.errstate(under="ignore"):
            coef = np.where(live, inner[m] * np.exp(np.where(live, logs[m] - top, 0.0)), 0j)
        out[m] = _scaled_log_abs(coef, z1[m:m + 1])[0] + top
    out = out.reshape(shape) + p.log_scale
    return out[()] if out.ndim == 0 else out


def log_abs_grid_2(p: PolynomialSample2, z1, z2) -> np.ndarray:
    """``log|p|`` on the product grid ``z1 x z2`` (shape ``(len(z1), len(z2))``).

    Dense matrix evaluation with per-point power scaling; valid while
    ``n * log(max|z|)`` stays well inside double range, which covers the
    shell grids used by the diagnostics.
    """
    z1 = np.asarray(z1, dtype=complex).ravel()
    z2 = np.asarray(z2, dtype=complex).ravel()
    n = p.n
    if n * max(1.0, np.log(max(np.abs(z1).max(), np.abs(z2).max(), 1.0))) > 600:
        Z1, Z2 = np.meshgrid(z1, z2, indexing="ij")
        return log_abs_eval_2(p, Z1, Z2)
    s1 = np.maximum(1.0, np.abs(z1))
    s2 = np.maximum(1.0, np.abs(z2))
    k = np.arange(n + 1)
    P1 = (z1[:, None] / s1[:, None]) ** k[None, :] * s1[:, None] ** (k[None, :] - n)
    P2 = (z2[:, None] / s2[:, None]) ** k[None, :]
    # divide by s1^n * s2^n: row i needs s2^j, j <= n - i, scaled by s2^{-n}
    P2 = P2 * s2[:, None] ** (k[None, :] - n)
    vals = P1 @ p.coeffs @ P2.T
    with np.errstate(divide="ignore"):
        return (np.log(np.abs(vals)) + n * np.log(s1)[:, None] + n * np.log(s2)[None, :]
                + p.log_scale)
