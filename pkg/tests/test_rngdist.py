import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqdist import rngdist
from eqdist.rngdist import DegenerateLaw, DistributionSpec, Kind


def test_rademacher_support():
    v = rngdist.sample(DistributionSpec.rademacher(), seed=1, count=3)
    assert v.shape == (3,)
    assert set(v.tolist()) <= {1 + 0j, -1 + 0j}


def test_log_pareto_empirical_tail_matches_binomial_ci():
    spec = DistributionSpec.log_pareto(2.0)
    lp = rngdist.sample_logpolar(spec, rngdist.stream(3), 100_000)
    (row,) = rngdist.empirical_tail_report(lp, [2.0], spec)
    t, emp, exact = row
    assert exact == 0.25
    sigma = math.sqrt(0.25 * 0.75 / 100_000)
    assert abs(emp - 0.25) <= 3 * sigma
    assert abs(emp - 0.25) <= 0.01


def test_single_point_law_is_degenerate():
    with pytest.raises(DegenerateLaw):
        DistributionSpec.point_pairs([1], [1.0])


def test_point_pairs_probabilities_must_sum_to_one():
    with pytest.raises(ValueError):
        DistributionSpec.point_pairs([1, -1], [0.5, 0.4])


def test_log_pareto_needs_positive_rho():
    with pytest.raises(ValueError):
        DistributionSpec.log_pareto(0.0)


@pytest.mark.parametrize("spec, t, expected", [
    (DistributionSpec.log_pareto(1.0), 4.0, 0.25),
    (DistributionSpec.gaussian(), 0.0, math.exp(-1.0)),
    (DistributionSpec.rademacher(), 0.5, 0.0),
    (DistributionSpec.log_pareto_log(), 1.0, 1.0),
    (DistributionSpec.log_pareto_log(), math.e ** 2, 1.0 / (2 * math.e ** 2)),
])
def test_log_tail_values(spec, t, expected):
    assert rngdist.log_tail(spec, t) == pytest.approx(expected, rel=1e-12)


def test_gaussian_tail_agrees_with_rayleigh_samples():
    # |xi|^2 is Exp(1) for the unit-variance complex Gaussian
    spec = DistributionSpec.gaussian()
    v = rngdist.sample(spec, seed=5, count=200_000)
    assert np.mean(np.abs(v) ** 2) == pytest.approx(1.0, abs=0.01)
    for t in (-1.0, 0.0, 0.5):
        assert np.mean(np.log(np.abs(v)) > t) == pytest.approx(rngdist.log_tail(spec, t), abs=0.005)


def test_log_pareto_log_sampler_tail():
    spec = DistributionSpec.log_pareto_log()
    lp = rngdist.sample_logpolar(spec, rngdist.stream(11), 200_000)
    assert lp.logmod.min() == pytest.approx(math.e)
    for t, emp, exact in rngdist.empirical_tail_report(lp, [3.0, 5.0, 20.0, 100.0], spec):
        assert abs(emp - exact) <= 4 * math.sqrt(exact / 200_000) + 1e-4


@pytest.mark.parametrize("spec, d, expected", [
    (DistributionSpec.log_pareto(2.0), 1, (True, True)),
    (DistributionSpec.log_pareto(1.0), 1, (False, False)),
    (DistributionSpec.log_pareto_log(), 1, (True, False)),
    (DistributionSpec.log_pareto_log(), 2, (False, False)),
    (DistributionSpec.log_pareto(2.0), 2, (False, False)),
    (DistributionSpec.gaussian(), 2, (True, True)),
])
def test_classify_conditions(spec, d, expected):
    assert tuple(rngdist.classify_conditions(spec, d)) == expected


def test_empirical_tail_report_edge_cases():
    assert rngdist.empirical_tail_report(np.ones(5), [1.0]) == [(1.0, 0.0, None)]
    assert rngdist.empirical_tail_report(np.ones(5), []) == []


def test_determinism_and_stream_independence():
    spec = DistributionSpec.log_pareto(0.5)
    a = rngdist.sample_logpolar(spec, rngdist.stream(9, 2, 3), 50)
    b = rngdist.sample_logpolar(spec, rngdist.stream(9, 2, 3), 50)
    c = rngdist.sample_logpolar(spec, rngdist.stream(9, 3, 2), 50)
    assert np.array_equal(a.logmod, b.logmod) and np.array_equal(a.unit, b.unit)
    assert not np.array_equal(a.logmod, c.logmod)


def test_heavy_tail_logpolar_stays_finite():
    lp = rngdist.sample_logpolar(DistributionSpec.log_pareto(0.5), rngdist.stream(0), 10_000)
    assert np.all(np.isfinite(lp.logmod))
    assert lp.logmod.max() > 1000  # far beyond double range as a modulus
    assert np.allclose(np.abs(lp.unit), 1.0)


def test_heavy_tail_phase_is_uniform():
    lp = rngdist.sample_logpolar(DistributionSpec.log_pareto(1.0), rngdist.stream(4), 100_000)
    ang = np.mod(np.angle(lp.unit), 2 * np.pi)
    counts, _ = np.histogram(ang, bins=8, range=(0, 2 * np.pi))
    assert np.all(np.abs(counts - 12_500) < 5 * math.sqrt(12_500))
    # phase independent of modulus: same phase histogram above the median
    big = lp.logmod > np.median(lp.logmod)
    counts, _ = np.histogram(ang[big], bins=4, range=(0, 2 * np.pi))
    assert np.all(np.abs(counts - big.sum() / 4) < 5 * math.sqrt(big.sum() / 4))


@given(rho=st.floats(0.2, 5.0))
@settings(max_examples=20, deadline=None)
def test_log_pareto_tail_envelope(rho):
    spec = DistributionSpec.log_pareto(rho)
    count = 100_000
    lp = rngdist.sample_logpolar(spec, rngdist.stream(17, int(rho * 1000)), count)
    for t in (1.0, 1.5, 3.0, 10.0):
        p = t ** -rho
        emp = np.mean(lp.logmod > t)
        # 4 sigma plus slack at t = 1 where the tail is exactly 1
        assert abs(emp - p) <= 4 * math.sqrt(p / count) + 1e-12


@given(rho=st.floats(1.01, 6.0), d=st.sampled_from([1, 2]))
def test_meas_classification_consistent_with_tail(rho, d):
    spec = DistributionSpec.log_pareto(rho)
    if rngdist.classify_conditions(spec, d).meas_holds:
        vals = [t ** d * rngdist.log_tail(spec, t) for t in (1e2, 1e3, 1e4)]
        assert vals[0] > vals[1] > vals[2]


def test_log_pareto_log_meas_consistent_with_tail():
    spec = DistributionSpec.log_pareto_log()
    vals = [t * rngdist.log_tail(spec, t) for t in (1e2, 1e3, 1e4)]
    assert vals[0] > vals[1] > vals[2]


@given(st.sampled_from(["gaussian", "disk", "rademacher", "logpareto:0.5", "logpareto:3", "logparetolog"]))
def test_json_roundtrip(name):
    spec = rngdist.parse_dist(name)
    assert DistributionSpec.from_json(spec.to_json()) == spec
    assert rngdist.parse_dist(spec.canonical_name()) == spec


def test_point_pairs_json_roundtrip_and_exact_values():
    spec = DistributionSpec.point_pairs([1 + 1j, -2], [0.25, 0.75])
    assert DistributionSpec.from_json(spec.to_json()) == spec
    v = rngdist.sample(spec, seed=0, count=1000)
    assert set(v.tolist()) <= {1 + 1j, -2 + 0j}
    assert rngdist.log_tail(spec, 0.5) == 0.75


def test_parse_dist_rejects_unknown():
    with pytest.raises(ValueError):
        rngdist.parse_dist("cauchy")
    with pytest.raises(ValueError):
        rngdist.parse_dist("logpareto")


def test_kinds_cover_every_law():
    assert {k.value for k in Kind} == {
        "ComplexGaussian", "UniformDisk", "Rademacher", "LogPareto", "LogParetoLog", "PointPairs"}
