"""Orthonormal polynomial bases and coefficient arrays.

Bases are stored as lower-triangular monomial coefficient matrices: row ``j``
of ``coeffs`` holds the coefficients of ``q_j``. Coefficient arrays
``f_{n,k}`` are stored as logarithms since ``f_{n,k} = f(k/n)^n`` and the
weighted-radial integrals leave double range for moderate ``n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev
from scipy.special import logsumexp

from .potential import Profile


class IllConditionedMeasure(ValueError):
    """The discretized measure cannot support the requested degree."""


@dataclass(frozen=True, eq=False)
class MeasureSpec:
    nodes: np.ndarray
    weights: np.ndarray
    label: str = "measure"
    closed_form: tuple | None = None  # ("circle", R) or ("arcsine",)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=complex)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d and of equal length")
        if np.any(weights <= 0) or not np.isfinite(weights.sum()):
            raise ValueError("weights must be positive and finite")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    @classmethod
    def circle_uniform(cls, radius: float = 1.0, m: int = 4097):
        """Normalized arc length on ``|z| = radius`` by the ``m``-point trapezoid rule."""
        theta = 2 * np.pi * np.arange(m) / m
        return cls(radius * np.exp(1j * theta), np.full(m, 1.0 / m),
                   label=f"circle:{radius:g}", closed_form=("circle", float(radius)))

    @classmethod
    def interval_arcsine(cls, m: int = 4097):
        """Arcsine law ``dx / (pi sqrt(1 - x^2))`` on [-1, 1] via Gauss-Chebyshev nodes."""
        k = np.arange(m)
        x = np.cos((2 * k + 1) * np.pi / (2 * m))
        return cls(x.astype(complex), np.full(m, 1.0 / m), label="arcsine",
                   closed_form=("arcsine",))

    def inner(self, f_vals, g_vals) -> complex:
        return complex(np.sum(self.weights * f_vals * np.conj(g_vals)))


@dataclass(frozen=True, eq=False)
class OrthoBasis:
    coeffs: np.ndarray  # (n+1, n+1) lower triangular, real positive diagonal
    label: str = "basis"

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def evaluate(self, z) -> np.ndarray:
        """``q_j(z)`` for all ``j``; shape ``z.shape + (n+1,)``."""
        z = np.asarray(z, dtype=complex)
        powers = z[..., None] ** np.arange(self.degree + 1)
        return powers @ self.coeffs.T

    @classmethod
    def monomial(cls, n: int, radius: float = 1.0):
        """``q_j = (z / radius)^j``, orthonormal for arc length on ``|z| = radius``."""
        return cls(np.diag(float(radius) ** -np.arange(n + 1.0)).astype(complex),
                   label=f"circle:{radius:g}")

    @classmethod
    def chebyshev(cls, n: int):
        """``q_0 = 1``, ``q_j = sqrt(2) T_j``, orthonormal for the arcsine law."""
        C = np.zeros((n + 1, n + 1), dtype=complex)
        for j in range(n + 1):
            e = np.zeros(j + 1)
            e[j] = 1.0
            C[j, :j + 1] = chebyshev.cheb2poly(e) * (1.0 if j == 0 else math.sqrt(2.0))
        return cls(C, label="arcsine")


def gram_schmidt_basis(measure: MeasureSpec, n: int) -> OrthoBasis:
    """Orthonormalize ``1, z, ..., z^n`` in ``L^2(measure)``.

    Realized as a Cholesky factorization of the (diagonally equilibrated)
    monomial Gram matrix followed by one reorthogonalization pass.
    Closed-form measures skip the numerics.
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    if measure.nodes.size < 2 * n + 1:
        raise IllConditionedMeasure(
            f"{measure.nodes.size} nodes cannot resolve degree {n} (need {2 * n + 1})")
    if measure.closed_form is not None:
        kind = measure.closed_form[0]
        scale = 1.0 / math.sqrt(measure.mass)
        if kind == "circle":
            b = OrthoBasis.monomial(n, measure.closed_form[1])
        elif kind == "arcsine":
            b = OrthoBasis.chebyshev(n)
        else:
            raise ValueError(f"unknown closed form {kind!r}")
        return OrthoBasis(b.coeffs * scale, label=measure.label)

    w = measure.weights
    z = measure.nodes
    with np.errstate(divide="ignore"):
        logabs = np.log(np.abs(z))
    # column norms of the Vandermonde matrix, computed in log space
    k = np.arange(n + 1)
    lognorm = 0.5 * logsumexp(np.log(w)[:, None] + 2 * k[None, :] * logabs[:, None], axis=0)
    V = _scaled_vandermonde(z, n, lognorm)
    G = (V.conj().T * w) @ V
    G = 0.5 * (G + G.conj().T)
    ev = np.linalg.eigvalsh(G)
    if not ev[0] > 1e-13 * ev[-1]:
        raise IllConditionedMeasure(
            f"monomial Gram matrix is numerically singular at degree {n} "
            f"(eigenvalue ratio {ev[0] / ev[-1]:.2e})")
    L = np.linalg.cholesky(G)
    R = np.linalg.inv(L)
    # reorthogonalize: Q = V R^H; Gram of Q should be the identity
    Q = V @ R.conj().T
    G2 = (Q.conj().T * w) @ Q
    G2 = 0.5 * (G2 + G2.conj().T)
    L2 = np.linalg.cholesky(G2)
    R = np.linalg.inv(L2) @ R
    # q_j(z) = sum_i conj(R[j, i]) z^i / exp(lognorm[i])
    C = np.tril(np.conj(R)) * np.exp(-lognorm)[None, :]
    d = np.real(np.diag(C)).copy()
    C[np.diag_indices(n + 1)] = d
    return OrthoBasis(C, label=measure.label)


def _scaled_vandermonde(z, n, lognorm):
    V = np.empty((z.size, n + 1), dtype=complex)
    V[:, 0] = 1.0
    for j in range(1, n + 1):
        V[:, j] = V[:, j - 1] * z
    return V * np.exp(-lognorm)[None, :]


def gram_residual(basis: OrthoBasis, measure: MeasureSpec) -> float:
    """``max |<q_j, q_k> - delta_jk|`` over the basis."""
    Q = basis.evaluate(measure.nodes)
    G = (Q.conj().T * measure.weights) @ Q
    return float(np.max(np.abs(G - np.eye(basis.degree + 1))))


# coefficient arrays ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoefficientArray:
    n: int
    log_f: np.ndarray  # -inf marks an exact zero
    provenance: str = "explicit"

    def __post_init__(self):
        lf = np.asarray(self.log_f, dtype=float)
        if lf.shape != (self.n + 1,):
            raise ValueError(f"need {self.n + 1} entries, got {lf.shape}")
        if not np.any(np.isfinite(lf)):
            raise ValueError("coefficient array must have a positive entry")
        if np.any(np.isnan(lf)) or np.any(lf == np.inf):
            raise ValueError("coefficient array entries must be finite or zero")
        object.__setattr__(self, "log_f", lf)

    @property
    def f(self) -> np.ndarray:
        return np.exp(self.log_f)

    @classmethod
    def explicit(cls, values: Sequence[float]):
        v = np.asarray(values, dtype=float)
        if np.any(v < 0):
            raise ValueError("array entries must be nonnegative")
        with np.errstate(divide="ignore"):
            return cls(len(v) - 1, np.log(v), provenance="explicit")

    @classmethod
    def kac(cls, n: int):
        return cls(n, np.zeros(n + 1), provenance="kac")


def weighted_radial_coefficients(tau_radial: Sequence[tuple[float, float]],
                                 S: Callable[[float], float], n: int) -> CoefficientArray:
    """``f_{n,j} = (int |z|^{2j} e^{-2nS} dtau)^{-1/2}`` for a rotation-invariant ``tau``.

    ``tau_radial`` lists ``(radius, weight)`` pairs (the radial marginal).
    """
    radii = np.array([r for r, _ in tau_radial], dtype=float)
    weights = np.array([w for _, w in tau_radial], dtype=float)
    if np.any(radii <= 0) or np.any(weights <= 0):
        raise ValueError("radii and weights must be positive")
    svals = np.array([S(r) for r in radii], dtype=float)
    j = np.arange(n + 1)
    terms = (np.log(weights) - 2 * n * svals)[None, :] + 2 * j[:, None] * np.log(radii)[None, :]
    return CoefficientArray(n, -0.5 * logsumexp(terms, axis=1), provenance="weighted-radial")


def profile_array(p: Profile, n: int) -> CoefficientArray:
    """``f_{n,k} = f(k/n)^n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(n + 1)
    return CoefficientArray(n, n * np.asarray(p.log_f(k / n), dtype=float),
                            provenance=f"profile:{p.label}")


def _log_terms(arr, z) -> np.ndarray:
    """``log |q_j(z)|`` per index for an array, or for a basis."""
    z = complex(z)
    if isinstance(arr, CoefficientArray):
        k = np.arange(arr.n + 1)
        if z == 0:
            out = np.full(arr.n + 1, -np.inf)
            out[0] = arr.log_f[0]
            return out
        return arr.log_f + k * math.log(abs(z))
    # basis: evaluate with |z|^n factored out to stay in range
    n = arr.degree
    s = max(1.0, abs(z))
    i = np.arange(n + 1)
    scaled = (z / s) ** i * s ** (i - n)
    vals = arr.coeffs @ scaled
    with np.errstate(divide="ignore"):
        return np.log(np.abs(vals)) + n * math.log(s)


def potential_from_coefficients(arr, z) -> float:
    """``(1/2n) log sum_j |q_j(z)|^2`` for a basis, or with ``q_j = f_{n,j} z^j`` for an array."""
    lt = _log_terms(arr, z)
    n = arr.n if isinstance(arr, CoefficientArray) else arr.degree
    if n == 0:
        return float(logsumexp(2 * lt)) / 2
    return float(logsumexp(2 * lt)) / (2 * n)


def condition_ii_count(arr: CoefficientArray, z, eps: float, V: float) -> int:
    """``#{k : f_{n,k} |z|^k >= e^{n (V - eps)}}``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    lt = _log_terms(arr, z)
    return int(np.count_nonzero(lt >= arr.n * (V - eps)))


def bernstein_markov_ratio(measure: MeasureSpec, n: int, trials: int = 100, seed: int = 0,
                           coeffs: np.ndarray | None = None) -> float:
    """Largest ``sup_nodes |p| / ||p||_{L^2(tau)}`` over random degree-``n`` polynomials.

    ``p`` has standard complex Gaussian monomial coefficients unless
    ``coeffs`` (one row per polynomial, lowest degree first) is given.
    """
    gram_schmidt_basis(measure, n)  # validates the measure at this degree
    if coeffs is None:
        rng = np.random.default_rng(seed)
        coeffs = rng.standard_normal((trials, n + 1)) + 1j * rng.standard_normal((trials, n + 1))
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    powers = measure.nodes[:, None] ** np.arange(coeffs.shape[1])[None, :]
    vals = powers @ coeffs.T
    sup = np.max(np.abs(vals), axis=0)
    l2 = np.sqrt(measure.weights @ np.abs(vals) ** 2)
    return float(np.max(sup / l2))
