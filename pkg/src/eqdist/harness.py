"""Config-driven Monte Carlo sweeps over ensembles and degrees."""
from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bases import CoefficientArray, OrthoBasis, profile_array, weighted_radial_coefficients
from .ensembles import IdenticallyZero, draw_array, draw_kac, draw_kac2, draw_ortho
from .potential import CompactSetModel, LimitPotential, Profile
from .roots import NoConvergence, find_roots
from .rngdist import DistributionSpec
from . import stats as st

log = logging.getLogger(__name__)

CONFIG_KEYS = ("ensemble", "dist", "degrees", "trials", "statistics", "seed", "output_dir")
OPTIONAL_KEYS = ("write_roots", "tol", "max_iter")


class ConfigError(ValueError):
    """Invalid experiment config; the message starts with the offending field path."""


# ensembles ---------------------------------------------------------------------

def _radius_arg(label: str, default: float = 1.0) -> float:
    _, _, arg = label.partition(":")
    return float(arg) if arg else default


@dataclass(frozen=True)
class EnsembleSpec:
    family: str  # kac | ortho | array | kac2
    label: str = ""

    @classmethod
    def parse(cls, text: str) -> "EnsembleSpec":
        family, _, label = text.partition(":")
        if family in ("kac", "kac2") and not label:
            return cls(family)
        if family == "ortho" and (label in ("circle", "arcsine") or label.startswith("circle:")):
            if label.startswith("circle:"):
                _radius_arg(label)
            return cls(family, label)
        if family == "array" and (label in ("kac", "flat", "elliptic", "exp-decay")
                                  or label.startswith("weighted:")):
            if label.startswith("weighted:"):
                _radius_arg(label)
            return cls(family, label)
        raise ValueError(f"unknown ensemble {text!r}")

    def __str__(self):
        return f"{self.family}:{self.label}" if self.label else self.family

    def limit(self) -> LimitPotential | None:
        if self.family == "kac2":
            return None
        if self.family == "kac" or self.label in ("circle", "kac", "flat"):
            return LimitPotential(CompactSetModel.unit_circle())
        if self.label.startswith(("circle:", "weighted:")):
            return LimitPotential(CompactSetModel.circle(_radius_arg(self.label)))
        if self.label == "arcsine":
            return LimitPotential(CompactSetModel.interval(-1.0, 1.0))
        if self.label == "elliptic":
            return LimitPotential(_PROFILES["elliptic"])
        if self.label == "exp-decay":
            return LimitPotential(_PROFILES["exp-decay"])
        raise AssertionError(self)

    def structure(self, n: int):
        """The deterministic part of the ensemble at degree ``n``."""
        if self.family == "ortho":
            if self.label == "arcsine":
                return OrthoBasis.chebyshev(n)
            return OrthoBasis.monomial(n, _radius_arg(self.label))
        if self.family == "array":
            if self.label in ("kac", "flat"):
                return CoefficientArray.kac(n)
            if self.label.startswith("weighted:"):
                return weighted_radial_coefficients([(_radius_arg(self.label), 1.0)], lambda r: 0.0, n)
            return profile_array(_PROFILES[self.label], n)
        return None

    def draw(self, n, structure, dist, seed, trial, key):
        if self.family == "kac":
            return draw_kac(n, dist, seed, trial, key=key)
        if self.family == "kac2":
            return draw_kac2(n, dist, seed, trial, key=key)
        if self.family == "ortho":
            return draw_ortho(n, structure, dist, seed, trial, key=key)
        return draw_array(n, structure, dist, seed, trial, key=key)


_PROFILES = {"elliptic": Profile.elliptic(), "exp-decay": Profile.exp_decay()}


# statistics ------------------------------------------------------------------------

@dataclass(frozen=True)
class StatSpec:
    name: str
    args: tuple[float, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "StatSpec":
        name, *rest = text.split(":")
        args = tuple(float(a) for a in rest)
        if name in ("radial_ks", "potential_l1", "bl_estimate", "realized_mass") and not args:
            return cls(name)
        if name == "weyl":
            k = args or (1.0,)
            if len(k) != 1 or k[0] < 1 or k[0] != int(k[0]):
                raise ValueError("weyl takes one positive integer, e.g. weyl:1")
            return cls(name, (float(int(k[0])),))
        if name in ("annulus_mass", "no_roots"):
            a = args or (0.5, 1.5)
            if len(a) != 2 or not 0 <= a[0] < a[1]:
                raise ValueError(f"{name} takes lo:hi with 0 <= lo < hi")
            return cls(name, a)
        raise ValueError(f"unknown statistic {text!r}")

    @property
    def key(self) -> str:
        if not self.args:
            return self.name
        return ":".join([self.name] + [f"{a:g}" for a in self.args])

    @property
    def needs_roots(self) -> bool:
        return self.name != "potential_l1"


# config ------------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    ensemble: EnsembleSpec
    dist: DistributionSpec
    degrees: list[int]
    trials: int
    statistics: list[StatSpec] = field(default_factory=list)
    seed: int = 0
    output_dir: str | None = None
    write_roots: bool = True
    tol: float = 1e-10
    max_iter: int = 200

    @classmethod
    def from_json(cls, obj) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("$: config must be a JSON object")
        unknown = set(obj) - set(CONFIG_KEYS) - set(OPTIONAL_KEYS)
        if unknown:
            raise ConfigError(f"$.{sorted(unknown)[0]}: unknown key")
        for key in ("ensemble", "dist", "degrees", "trials"):
            if key not in obj:
                raise ConfigError(f"$.{key}: missing")
        try:
            ensemble = EnsembleSpec.parse(obj["ensemble"]) if isinstance(obj["ensemble"], str) else None
        except ValueError as e:
            raise ConfigError(f"$.ensemble: {e}") from None
        if ensemble is None:
            raise ConfigError("$.ensemble: must be a string")
        try:
            dist = DistributionSpec.from_json(obj["dist"])
        except (ValueError, TypeError) as e:
            raise ConfigError(f"$.dist: {e}") from None
        degrees = obj["degrees"]
        if not isinstance(degrees, list) or not degrees:
            raise ConfigError("$.degrees: must be a nonempty list")
        for i, d in enumerate(degrees):
            if not isinstance(d, int) or isinstance(d, bool) or d < 1:
                raise ConfigError(f"$.degrees[{i}]: must be a positive integer")
        if any(b <= a for a, b in zip(degrees, degrees[1:])):
            raise ConfigError("$.degrees: must be strictly ascending")
        trials = obj["trials"]
        if not isinstance(trials, int) or isinstance(trials, bool) or trials < 1:
            raise ConfigError("$.trials: must be a positive integer")
        stats = []
        for i, s in enumerate(obj.get("statistics", [])):
            try:
                spec = StatSpec.parse(s)
            except (ValueError, AttributeError) as e:
                raise ConfigError(f"$.statistics[{i}]: {e}") from None
            if ensemble.family == "kac2" and spec.name != "potential_l1":
                raise ConfigError(f"$.statistics[{i}]: kac2 supports only potential_l1")
            if spec.name == "radial_ks" and not ensemble.limit().radial:
                raise ConfigError(f"$.statistics[{i}]: {ensemble} has no radial limit")
            stats.append(spec)
        seed = obj.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
            raise ConfigError("$.seed: must be a 64-bit unsigned integer")
        out = obj.get("output_dir")
        if out is not None and not isinstance(out, str):
            raise ConfigError("$.output_dir: must be a string")
        return cls(ensemble, dist, list(degrees), trials, stats, seed, out,
                   bool(obj.get("write_roots", True)), float(obj.get("tol", 1e-10)),
                   int(obj.get("max_iter", 200)))

    def to_json(self) -> dict:
        return {
            "ensemble": str(self.ensemble),
            "dist": self.dist.to_json(),
            "degrees": list(self.degrees),
            "trials": self.trials,
            "statistics": [s.key for s in self.statistics],
            "seed": self.seed,
            "output_dir": self.output_dir,
            "write_roots": self.write_roots,
            "tol": self.tol,
            "max_iter": self.max_iter,
        }


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"$: invalid JSON ({e})") from None
    return ExperimentConfig.from_json(obj)


# running ---------------------------------------------------------------------------

@dataclass
class TrialResult:
    n: int
    trial: int
    report: st.DiscrepancyReport | None = None
    values: dict = field(default_factory=dict)
    roots: np.ndarray | None = None
    failure: str | None = None
    dropped_leading: int = 0  # > 0 flags a sub-probability root measure


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trials: list[TrialResult]

    def per_degree(self) -> list[dict]:
        out = []
        for n in self.config.degrees:
            rows = [t for t in self.trials if t.n == n]
            ok = [t for t in rows if t.failure is None]
            failures = {"NoConvergence": 0, "IdenticallyZero": 0}
            for t in rows:
                if t.failure is not None:
                    failures[t.failure] += 1
            stats = {}
            for s in self.config.statistics:
                vals = np.array([t.values[s.key] for t in ok], dtype=float)
                stats[s.key] = _summary(vals)
            out.append({"n": n, "stats": stats, "failures": failures, "successes": len(ok)})
        return out

    def summary(self) -> dict:
        return {"config_echo": self.config.to_json(), "per_degree": self.per_degree(),
                "version": __version__}


def _summary(vals: np.ndarray) -> dict:
    if vals.size == 0:
        return {"mean": None, "median": None, "q10": None, "q90": None}
    return {"mean": float(np.mean(vals)), "median": float(np.median(vals)),
            "q10": float(np.quantile(vals, 0.1)), "q90": float(np.quantile(vals, 0.9))}


def resolve_workers(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("EQDIST_THREADS")
        threads = int(env) if env else 1
    if threads < 1:
        threads = os.cpu_count() or 1
    return threads


def _run_trial(cfg: ExperimentConfig, n: int, structure, limit, trial: int) -> TrialResult:
    res = TrialResult(n, trial)
    try:
        p = cfg.ensemble.draw(n, structure, cfg.dist, cfg.seed, trial, key=(n, trial))
    except IdenticallyZero:
        res.failure = "IdenticallyZero"
        return res
    report = st.DiscrepancyReport()
    emp = None
    if cfg.ensemble.family != "kac2" and (
            cfg.write_roots or any(s.needs_roots for s in cfg.statistics)):
        try:
            rs = find_roots(p, tol=cfg.tol, max_iter=cfg.max_iter)
        except NoConvergence as e:
            log.info("n=%d trial=%d: %s", n, trial, e)
            res.failure = "NoConvergence"
            return res
        res.roots = rs.roots
        res.dropped_leading = rs.dropped_leading
        emp = st.EmpiricalMeasure.from_roots(rs)
    k_max = max([int(s.args[0]) for s in cfg.statistics if s.name == "weyl"], default=0)
    if k_max:
        report.weyl = st.weyl_sums(emp, k_max)
    for s in cfg.statistics:
        if s.name == "radial_ks":
            v = report.radial_ks = st.radial_ks(emp, limit)
        elif s.name == "weyl":
            v = report.weyl[int(s.args[0]) - 1]
        elif s.name == "annulus_mass":
            v = st.annulus_mass(emp, *s.args)
            if report.annulus_mass is None:
                report.annulus_mass = v
        elif s.name == "no_roots":
            v = float(st.annulus_mass(emp, *s.args) == 0.0)
        elif s.name == "potential_l1":
            v, report.clip_bias = st.potential_l1_report(p, limit)
            report.potential_l1 = v
        elif s.name == "bl_estimate":
            v = report.bl_estimate = st.bl_estimate(emp, limit)
        elif s.name == "realized_mass":
            v = emp.mass
        else:
            raise AssertionError(s)
        res.values[s.key] = float(v)
    res.report = report
    return res


def run(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    """Run every (degree, trial); the result does not depend on ``threads``."""
    workers = resolve_workers(threads)
    limit = cfg.ensemble.limit()
    structures = {n: cfg.ensemble.structure(n) for n in cfg.degrees}
    tasks = [(n, t) for n in cfg.degrees for t in range(cfg.trials)]

    def one(task):
        n, t = task
        return _run_trial(cfg, n, structures[n], limit, t)

    if workers == 1:
        results = [one(task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, tasks))
    results.sort(key=lambda r: (r.n, r.trial))
    return ExperimentResult(cfg, results)


# output ------------------------------------------------------------------------------

def roots_csv(roots) -> str:
    """``re,im`` rows sorted by argument in [0, 2pi), then modulus."""
    r = np.asarray(roots, dtype=complex)
    arg = np.mod(np.angle(r), 2 * np.pi)
    order = np.lexsort((np.abs(r), arg))
    lines = ["re,im"]
    for z in r[order]:
        lines.append(f"{_fmt(z.real)},{_fmt(z.imag)}")
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    x = float(x)
    if x == 0:
        x = 0.0  # drop the sign of -0.0
    return "%.17g" % x


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def emit(result: ExperimentResult, out_dir=None, formats=("json", "csv")) -> list[Path]:
    """Write ``summary.json``, ``trials.json`` and per-trial root CSVs."""
    out = Path(out_dir if out_dir is not None else (result.config.output_dir or "."))
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if "json" in formats:
            path = out / "summary.json"
            path.write_text(_dump(result.summary()))
            written.append(path)
            trials = []
            for t in result.trials:
                row = {"n": t.n, "trial": t.trial, "failure": t.failure,
                       "dropped_leading": t.dropped_leading, "values": t.values,
                       "report": t.report.to_json() if t.report else None,
                       "roots_file": _roots_name(t) if t.roots is not None and result.config.write_roots
                       and "csv" in formats else None}
                trials.append(row)
            path = out / "trials.json"
            path.write_text(_dump(trials))
            written.append(path)
        if "csv" in formats and result.config.write_roots:
            for t in result.trials:
                if t.roots is None:
                    continue
                path = out / _roots_name(t)
                path.parent.mkdir(exist_ok=True)
                path.write_text(roots_csv(t.roots))
                written.append(path)
    except OSError as e:
        raise OSError(f"{e.filename or out}: {e.strerror or e}") from e
    return written


def _roots_name(t: TrialResult) -> str:
    return f"roots/n{t.n}_t{t.trial}.csv"
