import math

import pytest

from partmetrics.combinatorics import Seed
from partmetrics.partition import Partition, PartitionError
from partmetrics.sweep import (
    CSV_HEADER,
    SweepConfig,
    degrade,
    degraded_labels,
    degraded_curves,
    monotonicity_violations,
    noisy_count,
    rows_to_csv,
    run_trap,
)


def planted(n=100, k=10):
    return Partition([i * k // n for i in range(n)])


def test_degrade_identity_and_counts():
    t = planted()
    assert degrade(t, 0.0, Seed(1)) == t
    raw = degraded_labels(t, 0.5, Seed(1))
    assert sum(a != b for a, b in zip(raw, t.membership)) == 50
    assert degrade(t, 0.5, Seed(1)) == Partition(raw)
    assert noisy_count(0.5, 100) == 50 and noisy_count(0.005, 100) == 1 and noisy_count(0.004, 100) == 0


def test_degrade_everything():
    t = Partition([0, 0, 1, 1, 2, 2, 3])
    raw = degraded_labels(t, 1.0, Seed(3))
    assert all(a != b for a, b in zip(raw, t.membership))
    assert set(raw) <= set(t.membership)


def test_degrade_two_blocks_mu_one_swaps():
    t = Partition([0, 0, 0, 1, 1])
    assert degrade(t, 1.0, Seed(0)).membership == (0, 0, 0, 1, 1)


def test_degrade_errors():
    with pytest.raises(PartitionError):
        degrade(Partition([0, 0, 0]), 0.3, Seed(0))
    assert degrade(Partition([0, 0, 0]), 0.0, Seed(0)) == Partition([0, 0, 0])
    with pytest.raises(ValueError):
        degrade(planted(), 1.5, Seed(0))


def test_degrade_deterministic():
    t = planted()
    assert degrade(t, 0.3, Seed(9, 2)) == degrade(t, 0.3, Seed(9, 2))
    assert degrade(t, 0.3, Seed(9, 2)) != degrade(t, 0.3, Seed(9, 3))


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(mus=(0.0, 1.2))
    with pytest.raises(ValueError):
        SweepConfig(replicates=0)
    with pytest.raises(ValueError):
        SweepConfig(metrics=("ari",))


def test_zero_noise_row():
    rows = run_trap(SweepConfig(mus=(0.0,), replicates=1, workers=1))
    got = {(g, m): s for _, _, g, m, s, _ in rows}
    for m in ("nmi", "ami-perm", "ami-all-self"):
        assert got[("degraded", m)] == pytest.approx(1.0, abs=1e-12)
    assert got[("singletons", "nmi")] == pytest.approx(math.sqrt(math.log(10) / math.log(100)), abs=1e-12)
    assert got[("singletons", "ami-all")] < 0.35
    assert math.isnan(got[("one-block", "ami-perm")])


def test_csv_stable_across_workers():
    cfg = dict(mus=(0.0, 0.3, 0.6), replicates=2, seed=5)
    a = rows_to_csv(run_trap(SweepConfig(workers=1, **cfg)))
    b = rows_to_csv(run_trap(SweepConfig(workers=2, **cfg)))
    assert a == b
    assert a.splitlines()[0] == ",".join(CSV_HEADER)
    assert len(a.splitlines()) == 1 + 3 * 2 * 3 * 4


def test_row_order():
    rows = run_trap(SweepConfig(mus=(0.2, 0.1), replicates=2, metrics=("nmi",), workers=1))
    keys = [(r[0], r[1]) for r in rows[::3]]
    assert keys == [(0.2, 0), (0.2, 1), (0.1, 0), (0.1, 1)]


def test_curves_decrease_below_independence():
    rows = run_trap(SweepConfig(mus=tuple(i / 10 for i in range(9)), replicates=3, workers=1))
    assert not monotonicity_violations(rows)
    curves = degraded_curves(rows)
    assert curves["nmi"][0].mean == pytest.approx(1.0)


def test_monotonicity_flags_synthetic_rise():
    rows = [(0.0, 0, "degraded", "nmi", 0.5, 0.0), (0.1, 0, "degraded", "nmi", 0.9, 0.0)]
    v = monotonicity_violations(rows)
    assert v and v[0]["metric"] == "nmi"
