import filecmp
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqdist import harness
from eqdist.ensembles import draw_array
from eqdist.bases import CoefficientArray
from eqdist.harness import ConfigError, ExperimentConfig
from eqdist.rngdist import DistributionSpec

from .oracles import matching_distance


def cfg(**kw):
    base = {"ensemble": "kac", "dist": "gaussian", "degrees": [64], "trials": 4,
            "statistics": ["radial_ks", "weyl:1", "annulus_mass:0.9:1.1"], "seed": 7,
            "output_dir": None}
    base.update(kw)
    return ExperimentConfig.from_json(base)


def _files(d):
    return sorted(p.relative_to(d).as_posix() for p in d.rglob("*") if p.is_file())


def test_run_twice_byte_identical(tmp_path):
    c = cfg()
    harness.emit(harness.run(c), tmp_path / "a")
    harness.emit(harness.run(c), tmp_path / "b")
    for name in _files(tmp_path / "a"):
        assert filecmp.cmp(tmp_path / "a" / name, tmp_path / "b" / name, shallow=False)


@pytest.mark.parametrize("threads", [4, 0])
def test_thread_count_invariance(tmp_path, threads):
    c = cfg(degrees=[16, 48], trials=6, statistics=["radial_ks", "potential_l1", "bl_estimate"])
    harness.emit(harness.run(c, threads=1), tmp_path / "one")
    harness.emit(harness.run(c, threads=threads), tmp_path / "many")
    assert _files(tmp_path / "one") == _files(tmp_path / "many")
    for name in _files(tmp_path / "one"):
        assert filecmp.cmp(tmp_path / "one" / name, tmp_path / "many" / name, shallow=False)


def test_adding_degrees_keeps_existing_trials():
    a = harness.run(cfg(degrees=[32]))
    b = harness.run(cfg(degrees=[16, 32, 64]))
    ra = [t.roots for t in a.trials if t.n == 32]
    rb = [t.roots for t in b.trials if t.n == 32]
    assert all(np.array_equal(x, y) for x, y in zip(ra, rb))


def test_flat_rademacher_quadratic():
    c = cfg(ensemble="array:flat", dist="rademacher", degrees=[2], trials=1, statistics=[])
    res = harness.run(c)
    (t,) = res.trials
    p = draw_array(2, CoefficientArray.kac(2), DistributionSpec.rademacher(), 7, 0, key=(2, 0))
    c0, c1, c2 = p.monomial_coeffs
    d = np.sqrt(c1 * c1 - 4 * c0 * c2 + 0j)
    assert matching_distance(t.roots, [(-c1 + d) / (2 * c2), (-c1 - d) / (2 * c2)]) <= 1e-12


def test_kac2_writes_no_root_files(tmp_path):
    c = cfg(ensemble="kac2", degrees=[32], trials=2, statistics=["potential_l1"])
    res = harness.run(c)
    harness.emit(res, tmp_path)
    assert not (tmp_path / "roots").exists()
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["per_degree"][0]["stats"]["potential_l1"]["mean"] > 0
    trials = json.loads((tmp_path / "trials.json").read_text())
    assert all(t["roots_file"] is None for t in trials)


def test_no_roots_event_probe():
    c = cfg(dist="logpareto:1", degrees=[4, 8, 16, 32], trials=40, statistics=["no_roots:0.5:1.5"])
    res = harness.run(c)
    for row in res.per_degree():
        freq = row["stats"]["no_roots:0.5:1.5"]["mean"]
        assert 0.0 <= freq <= 1.0
        assert row["successes"] + sum(row["failures"].values()) == 40


def test_failures_counted_not_aborting():
    c = cfg(degrees=[200], trials=3, statistics=["radial_ks"])
    c.max_iter = 1
    res = harness.run(c)
    row = res.per_degree()[0]
    assert row["failures"]["NoConvergence"] == 3 and row["successes"] == 0
    assert row["stats"]["radial_ks"]["median"] is None


def test_identically_zero_counted():
    law = {"kind": "PointPairs", "values": [[0, 0], [1, 0]], "probs": [0.9, 0.1]}
    res = harness.run(cfg(dist=law, degrees=[1], trials=50, statistics=["annulus_mass"]))
    row = res.per_degree()[0]
    assert row["failures"]["IdenticallyZero"] > 0
    assert row["successes"] + row["failures"]["IdenticallyZero"] + row["failures"]["NoConvergence"] == 50


def test_empty_statistics(tmp_path):
    res = harness.run(cfg(statistics=[]))
    harness.emit(res, tmp_path)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["per_degree"][0]["stats"] == {}
    assert set(summary) == {"config_echo", "per_degree", "version"}


def test_roots_csv_order_and_precision():
    text = harness.roots_csv(np.array([-1j, 1j]))
    assert text == "re,im\n0,1\n0,-1\n"
    x = 0.1 + 1 / 3 * 1j
    row = harness.roots_csv([x]).splitlines()[1]
    re_, im = map(float, row.split(","))
    assert complex(re_, im) == x


def test_roots_csv_ties_sorted_by_modulus():
    text = harness.roots_csv([2.0, 1.0, 0.5j])
    assert text.splitlines()[1:] == ["1,0", "2,0", "0,0.5"]


def test_reemit_identical(tmp_path):
    res = harness.run(cfg())
    harness.emit(res, tmp_path / "a")
    harness.emit(res, tmp_path / "b")
    for name in _files(tmp_path / "a"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_emit_io_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        harness.emit(harness.run(cfg(trials=1)), blocker / "out")


@pytest.mark.parametrize("patch, path", [
    ({"degrees": [64, 32]}, "$.degrees"),
    ({"degrees": [0]}, "$.degrees[0]"),
    ({"trials": 0}, "$.trials"),
    ({"ensemble": "ortho:nope"}, "$.ensemble"),
    ({"dist": "cauchy"}, "$.dist"),
    ({"statistics": ["radial_ks", "bogus"]}, "$.statistics[1]"),
    ({"ensemble": "kac2", "statistics": ["radial_ks"]}, "$.statistics[0]"),
    ({"ensemble": "ortho:arcsine", "statistics": ["radial_ks"]}, "$.statistics[0]"),
    ({"seed": -1}, "$.seed"),
    ({"extra": 1}, "$.extra"),
])
def test_config_errors_name_the_field(patch, path):
    with pytest.raises(ConfigError) as err:
        cfg(**patch)
    assert str(err.value).startswith(path + ":")


ensembles = st.sampled_from(["kac", "ortho:circle", "ortho:circle:2", "ortho:arcsine", "array:flat",
                             "array:elliptic", "array:weighted:2", "array:exp-decay", "kac2"])
dists = st.sampled_from(["gaussian", "disk", "rademacher", "logpareto:0.5", "logparetolog"])
stat_names = st.lists(st.sampled_from(["weyl:2", "annulus_mass:0.5:1.5", "no_roots:0.5:1.5",
                                       "bl_estimate", "potential_l1"]), max_size=4)


@given(ens=ensembles, dist=dists, degrees=st.lists(st.integers(1, 2000), min_size=1, max_size=5, unique=True),
       trials=st.integers(1, 500), stats=stat_names, seed=st.integers(0, 2**64 - 1))
def test_config_round_trip(ens, dist, degrees, trials, stats, seed):
    if ens == "kac2":
        stats = [s for s in stats if s == "potential_l1"]
    obj = {"ensemble": ens, "dist": dist, "degrees": sorted(degrees), "trials": trials,
           "statistics": stats, "seed": seed, "output_dir": "out"}
    c = ExperimentConfig.from_json(obj)
    again = ExperimentConfig.from_json(json.loads(json.dumps(c.to_json())))
    assert again == c


def test_limits_per_ensemble():
    assert harness.EnsembleSpec.parse("array:weighted:2").limit().atoms() == (2.0,)
    assert harness.EnsembleSpec.parse("ortho:circle:0.5").limit().atoms() == (0.5,)
    assert not harness.EnsembleSpec.parse("ortho:arcsine").limit().radial
    assert harness.EnsembleSpec.parse("kac2").limit() is None


def test_weighted_ensemble_concentrates_at_radius_two():
    c = cfg(ensemble="array:weighted:2", degrees=[128], trials=4, statistics=["annulus_mass:1.8:2.2"])
    row = harness.run(c).per_degree()[0]
    assert row["stats"]["annulus_mass:1.8:2.2"]["median"] >= 0.85


def test_sub_probability_trials_flagged(tmp_path):
    law = {"kind": "PointPairs", "values": [[0, 0], [1, 0]], "probs": [0.5, 0.5]}
    res = harness.run(cfg(dist=law, degrees=[6], trials=30, statistics=["realized_mass"]))
    harness.emit(res, tmp_path)
    rows = [t for t in json.loads((tmp_path / "trials.json").read_text()) if t["failure"] is None]
    flagged = [t for t in rows if t["dropped_leading"] > 0]
    assert flagged
    for t in flagged:
        assert t["values"]["realized_mass"] == pytest.approx(1 - t["dropped_leading"] / 6)
