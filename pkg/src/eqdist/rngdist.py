"""Coefficient laws for random polynomials.

Every law is an i.i.d. complex distribution whose log-modulus tail
``P(log|xi| > t)`` is known in closed form, so sampler output can be checked
against the exact tail and the integrability conditions can be decided
analytically.

Heavy-tailed laws are sampled in log-polar form (log-modulus, phase) because
``exp(log|xi|)`` overflows double precision long before the interesting
regime ends.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import lambertw


class Kind(str, Enum):
    COMPLEX_GAUSSIAN = "ComplexGaussian"
    UNIFORM_DISK = "UniformDisk"
    RADEMACHER = "Rademacher"
    LOG_PARETO = "LogPareto"
    LOG_PARETO_LOG = "LogParetoLog"
    POINT_PAIRS = "PointPairs"


class DegenerateLaw(ValueError):
    """Raised for laws supported on fewer than two points."""


@dataclass(frozen=True)
class DistributionSpec:
    kind: Kind
    rho: float | None = None
    values: tuple[complex, ...] = ()
    probs: tuple[float, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.LOG_PARETO:
            if self.rho is None or not self.rho > 0:
                raise ValueError("LogPareto needs rho > 0")
        if self.kind is Kind.POINT_PAIRS:
            values = tuple(complex(v) for v in self.values)
            probs = tuple(float(p) for p in self.probs)
            if len(values) != len(probs):
                raise ValueError("PointPairs values and probs differ in length")
            if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-12:
                raise ValueError("PointPairs probabilities must sum to 1")
            support = {v for v, p in zip(values, probs) if p > 0}
            if len(support) < 2:
                raise DegenerateLaw("degenerate law: support has fewer than two points")
            object.__setattr__(self, "values", values)
            object.__setattr__(self, "probs", probs)
        if not self.label:
            object.__setattr__(self, "label", self.canonical_name())

    # constructors -----------------------------------------------------------
    @classmethod
    def gaussian(cls):
        return cls(Kind.COMPLEX_GAUSSIAN)

    @classmethod
    def uniform_disk(cls):
        return cls(Kind.UNIFORM_DISK)

    @classmethod
    def rademacher(cls):
        return cls(Kind.RADEMACHER)

    @classmethod
    def log_pareto(cls, rho: float):
        return cls(Kind.LOG_PARETO, rho=float(rho))

    @classmethod
    def log_pareto_log(cls):
        return cls(Kind.LOG_PARETO_LOG)

    @classmethod
    def point_pairs(cls, values: Sequence[complex], probs: Sequence[float]):
        return cls(Kind.POINT_PAIRS, values=tuple(values), probs=tuple(probs))

    def canonical_name(self) -> str:
        if self.kind is Kind.LOG_PARETO:
            return f"logpareto:{self.rho:g}"
        return {
            Kind.COMPLEX_GAUSSIAN: "gaussian",
            Kind.UNIFORM_DISK: "disk",
            Kind.RADEMACHER: "rademacher",
            Kind.LOG_PARETO_LOG: "logparetolog",
            Kind.POINT_PAIRS: "pointpairs",
        }[self.kind]

    # (de)serialization used by the harness config --------------------------
    def to_json(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.kind is Kind.LOG_PARETO:
            out["rho"] = self.rho
        if self.kind is Kind.POINT_PAIRS:
            out["values"] = [[v.real, v.imag] for v in self.values]
            out["probs"] = list(self.probs)
        if self.label != self.canonical_name():
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, obj) -> "DistributionSpec":
        if isinstance(obj, str):
            return parse_dist(obj)
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError("dist must be a string or an object with 'kind'")
        kind = Kind(obj["kind"])
        values = tuple(complex(*v) if isinstance(v, (list, tuple)) else complex(v)
                       for v in obj.get("values", ()))
        return cls(kind, rho=obj.get("rho"), values=values,
                   probs=tuple(obj.get("probs", ())), label=obj.get("label", ""))


_ALIASES = {
    "gaussian": Kind.COMPLEX_GAUSSIAN,
    "complexgaussian": Kind.COMPLEX_GAUSSIAN,
    "disk": Kind.UNIFORM_DISK,
    "uniformdisk": Kind.UNIFORM_DISK,
    "rademacher": Kind.RADEMACHER,
    "logparetolog": Kind.LOG_PARETO_LOG,
}


def parse_dist(text: str) -> DistributionSpec:
    """Parse the short CLI form, e.g. ``gaussian`` or ``logpareto:0.5``."""
    name, _, arg = text.strip().lower().partition(":")
    if name == "logpareto":
        if not arg:
            raise ValueError("logpareto needs a tail exponent, e.g. logpareto:2")
        return DistributionSpec.log_pareto(float(arg))
    if name in _ALIASES and not arg:
        return DistributionSpec(_ALIASES[name])
    raise ValueError(f"unknown distribution {text!r}")


# random streams ------------------------------------------------------------

def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the substream ``key`` of ``seed``.

    Streams are addressed by their key, not by draw order, so trial ``k`` of a
    sweep sees the same numbers whichever worker runs it.
    """
    ss = np.random.SeedSequence(entropy=int(seed) % 2**64, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


class LogPolar(NamedTuple):
    """Draws as ``exp(logmod) * unit`` with ``|unit| = 1`` (``unit = 0`` for exact zeros)."""

    logmod: np.ndarray
    unit: np.ndarray

    def to_complex(self) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.exp(self.logmod) * self.unit
        return np.where(self.unit == 0, 0j, out)


def _log_pareto_log_quantile(u: np.ndarray) -> np.ndarray:
    # solves t*ln(t) = 1/u, i.e. t = y / W(y)
    y = 1.0 / u
    return (y / lambertw(y).real).astype(float)


def _from_values(v: np.ndarray) -> LogPolar:
    mod = np.abs(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        unit = np.where(mod > 0, v / mod, 0j)
        return LogPolar(np.log(mod), unit)


def sample_logpolar(spec: DistributionSpec, rng: np.random.Generator, count: int) -> LogPolar:
    if count < 1:
        raise ValueError("count must be >= 1")
    kind = spec.kind
    if kind is Kind.COMPLEX_GAUSSIAN:
        z = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / math.sqrt(2.0)
        return _from_values(z)
    if kind is Kind.UNIFORM_DISK:
        u = rng.random(count)
        phase = 2 * np.pi * rng.random(count)
        with np.errstate(divide="ignore"):
            return LogPolar(0.5 * np.log(u), np.exp(1j * phase))
    if kind is Kind.RADEMACHER:
        signs = rng.integers(0, 2, size=count)
        return LogPolar(np.zeros(count), np.where(signs == 1, 1.0, -1.0).astype(complex))
    if kind is Kind.POINT_PAIRS:
        values = np.asarray(spec.values, dtype=complex)
        idx = rng.choice(len(values), size=count, p=np.asarray(spec.probs))
        return _from_values(values[idx])
    # heavy tails: inverse CDF on the log-modulus, independent uniform phase
    u = 1.0 - rng.random(count)  # in (0, 1]
    unit = np.exp(2j * np.pi * rng.random(count))
    if kind is Kind.LOG_PARETO:
        return LogPolar(u ** (-1.0 / spec.rho), unit)
    if kind is Kind.LOG_PARETO_LOG:
        logmod = np.full(count, math.e)
        tail = u < 1.0 / math.e
        if tail.any():
            logmod[tail] = _log_pareto_log_quantile(u[tail])
        return LogPolar(logmod, unit)
    raise AssertionError(kind)


def sample(spec: DistributionSpec, seed: int, count: int) -> np.ndarray:
    """``count`` i.i.d. draws as complex numbers (may overflow to inf for heavy tails)."""
    rng = stream(seed)
    if spec.kind is Kind.POINT_PAIRS:
        # exact support values, no log/exp round trip
        idx = rng.choice(len(spec.values), size=count, p=np.asarray(spec.probs))
        return np.asarray(spec.values, dtype=complex)[idx]
    return sample_logpolar(spec, rng, count).to_complex()


def log_tail(spec: DistributionSpec, t: float) -> float:
    """Exact ``P(log|xi| > t)``."""
    kind = spec.kind
    if kind is Kind.COMPLEX_GAUSSIAN:
        # |xi|^2 ~ Exp(1)
        return math.exp(-math.exp(2 * t)) if t < 354 else 0.0
    if kind is Kind.UNIFORM_DISK:
        return 1.0 - math.exp(2 * t) if t < 0 else 0.0
    if kind is Kind.RADEMACHER:
        return 1.0 if t < 0 else 0.0
    if kind is Kind.LOG_PARETO:
        return 1.0 if t <= 1.0 else t ** (-spec.rho)
    if kind is Kind.LOG_PARETO_LOG:
        return 1.0 if t < math.e else 1.0 / (t * math.log(t))
    if kind is Kind.POINT_PAIRS:
        total = 0.0
        for v, p in zip(spec.values, spec.probs):
            if v != 0 and math.log(abs(v)) > t:
                total += p
        return total
    raise AssertionError(kind)


class Conditions(NamedTuple):
    meas_holds: bool
    elog_power_finite: bool


def classify_conditions(spec: DistributionSpec, d: int = 1) -> Conditions:
    """Decide the tail condition and the log-moment condition in dimension ``d``.

    ``meas_holds``: ``P(log|xi| > t) = o(t^-d)``.
    ``elog_power_finite``: ``E[log(1 + |xi|)]^d < inf``.
    Bounded and Gaussian laws satisfy both; the log-Pareto families are
    decided from their exponents.
    """
    if d not in (1, 2):
        raise ValueError("d must be 1 or 2")
    if spec.kind is Kind.LOG_PARETO:
        ok = spec.rho > d
        return Conditions(ok, ok)
    if spec.kind is Kind.LOG_PARETO_LOG:
        # 1/(t ln t) is o(1/t) but not o(1/t^2); int dt/(t ln t) diverges
        return Conditions(d == 1, False)
    return Conditions(True, True)


def empirical_tail_report(samples, t_grid, spec: DistributionSpec | None = None):
    """Rows ``(t, fraction of samples with log|value| > t, exact tail)``.

    ``samples`` is a complex array or a :class:`LogPolar` (needed once the
    moduli no longer fit in a double). The exact column is ``None`` without
    ``spec``.
    """
    if isinstance(samples, LogPolar):
        logmod = np.asarray(samples.logmod, dtype=float)
    else:
        samples = np.asarray(samples)
        with np.errstate(divide="ignore"):
            logmod = np.log(np.abs(samples))
    if logmod.size == 0:
        raise ValueError("samples must be nonempty")
    rows = []
    for t in t_grid:
        exact = log_tail(spec, float(t)) if spec is not None else None
        rows.append((float(t), float(np.mean(logmod > t)), exact))
    return rows
