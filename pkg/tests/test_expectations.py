import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from partmetrics.combinatorics import EnsembleTooLarge, RandomModel, Seed, integer_partitions
from partmetrics.expectations import (
    ExpectationEstimate,
    RandomModelSpec,
    expected_mi,
    expected_mi_blocks,
    expected_mi_blocks_two_sided,
    expected_mi_enum,
    expected_mi_enum_two_sided,
    expected_mi_exact,
    expected_mi_mc,
    expected_mi_perm_exact,
    expected_mi_shape_sum,
    expected_nmi,
    expected_nmi_enum,
    expected_nmi_shape_sum,
)
from partmetrics.infotheory import entropy, generalized_mean, mi
from partmetrics.partition import Partition, PartitionError, Shape, trivial_partition

from conftest import all_relabelings, random_pair

LOG2 = math.log(2)


def brute_perm_expectation(sc, st):
    c, t = sc.representative(), st.representative()
    values = [mi(cp, t) for cp in all_relabelings(c)]
    return math.fsum(values) / len(values)


def test_perm_exact_examples():
    assert expected_mi_perm_exact(Shape([2, 2]), Shape([2, 2])).mean == pytest.approx(LOG2 / 3, abs=1e-12)
    assert expected_mi_perm_exact(Shape([1, 1]), Shape([1, 1])).mean == pytest.approx(LOG2, abs=1e-12)
    for sizes in ([2, 1], [1, 1, 1]):
        assert expected_mi_perm_exact(Shape([3]), Shape(sizes)).mean == 0.0
    est = expected_mi_perm_exact(Shape([3, 1]), Shape([2, 2]))
    assert est.std_error == 0.0 and est.estimator == "exact"


def test_perm_exact_brute_force_n5():
    for n in range(1, 6):
        shapes = [Shape(p) for p in integer_partitions(n)]
        for sc, st_ in itertools.product(shapes, shapes):
            assert expected_mi_perm_exact(sc, st_).mean == pytest.approx(brute_perm_expectation(sc, st_), abs=1e-10)


def test_perm_exact_size_mismatch():
    with pytest.raises(PartitionError):
        expected_mi_perm_exact(Shape([2]), Shape([1, 2]))


def test_perm_exact_symmetric():
    for n in range(1, 9):
        shapes = [Shape(p) for p in integer_partitions(n)]
        for sc, st_ in itertools.product(shapes, shapes):
            assert expected_mi_perm_exact(sc, st_).mean == expected_mi_perm_exact(st_, sc).mean


def test_perm_singletons_ensemble_equals_entropy():
    for sizes in ([3, 2], [4, 1, 1], [2, 2, 2]):
        st_ = Shape(sizes)
        e = expected_mi_perm_exact(Shape([1] * st_.n), st_).mean
        assert e == pytest.approx(entropy(st_), abs=1e-12)


@pytest.mark.parametrize("n", range(1, 8))
def test_block_inclusion_matches_enumeration(n):
    for parts in integer_partitions(n):
        t = Shape(parts).representative()
        models = [RandomModel.all(n)] + [RandomModel.num(n, k) for k in range(1, n + 1)]
        for model in models:
            assert expected_mi_blocks(model, t.shape()) == pytest.approx(expected_mi_enum(t, model).mean, abs=1e-12)


@pytest.mark.parametrize("n", [1, 5, 9, 14, 20])
def test_block_inclusion_matches_shape_sum(n):
    rng = Seed(n).rng()
    for _ in range(3):
        t = RandomModel.all(n).draw(rng)
        for model in (RandomModel.all(n), RandomModel.num(n, max(1, n // 3)), RandomModel.perm(t)):
            assert expected_mi_blocks(model, t.shape()) == pytest.approx(expected_mi_shape_sum(model, t.shape()),
                                                                         abs=1e-10)


def test_block_inclusion_perm_matches_hypergeometric():
    for n in range(1, 9):
        shapes = [Shape(p) for p in integer_partitions(n)]
        for sc, st_ in itertools.product(shapes, shapes):
            assert expected_mi_blocks(RandomModel.perm(sc), st_) == pytest.approx(
                expected_mi_perm_exact(sc, st_).mean, abs=1e-12)


@pytest.mark.parametrize("n", range(1, 6))
def test_two_sided_block_inclusion_matches_double_enumeration(n):
    rng = Seed(100 + n).rng()
    for _ in range(4):
        c, t = RandomModel.all(n).draw(rng), RandomModel.all(n).draw(rng)
        for kind in ("all", "num", "perm"):
            mc, mt = RandomModel.around(kind, c), RandomModel.around(kind, t)
            exact = expected_mi_blocks_two_sided(mc, mt)
            assert exact == pytest.approx(expected_mi_enum_two_sided(mc, mt).mean, abs=1e-12)


def test_enum_examples():
    assert expected_mi_enum(trivial_partition(2), RandomModel.all(2)).mean == pytest.approx(LOG2 / 2, abs=1e-12)
    t = Partition([0, 0, 1])
    # (2 H(T) + 2 * (log(3/4) + 2 log(3/2)) / 3) / 5, hand-summed over the 5 partitions
    h = math.log(3) - 2 / 3 * LOG2
    expected = (2 * h + 2 * (math.log(0.75) + 2 * math.log(1.5)) / 3) / 5
    assert expected == pytest.approx(0.32437, abs=1e-5)
    assert expected_mi_enum(t, RandomModel.all(3)).mean == pytest.approx(expected, abs=1e-12)
    for kind in ("all", "num", "perm"):
        p = Partition([0])
        assert expected_mi_enum(p, RandomModel.around(kind, p)).mean == 0.0


def test_enum_refuses_large():
    with pytest.raises(EnsembleTooLarge):
        expected_mi_enum(trivial_partition(13), RandomModel.all(13))


def test_mc_examples():
    p = Partition([0])
    est = expected_mi_mc(p, RandomModel.all(1), samples=10, seed=1)
    assert est.mean == 0.0 and est.std_error == 0.0
    t = Partition([0, 0, 1, 1, 2, 2, 2, 3, 3, 4])
    a = expected_mi_mc(t, RandomModel.all(10), samples=500, seed=3)
    b = expected_mi_mc(t, RandomModel.all(10), samples=500, seed=3)
    assert a == b
    assert a.sample_count == 500 and a.std_error > 0 and a.estimator == "mc"
    with pytest.raises(ValueError):
        expected_mi_mc(t, RandomModel.all(10), samples=1)


def test_mc_independent_of_worker_count():
    t = Partition([0, 0, 1, 1, 2, 2, 2, 3])
    one = expected_mi_mc(t, RandomModel.all(8), samples=400, seed=9, workers=1)
    two = expected_mi_mc(t, RandomModel.all(8), samples=400, seed=9, workers=2)
    assert one == two


def test_mc_agrees_with_enumeration_n8():
    t = Partition([0, 0, 0, 1, 1, 2, 3, 3])
    exact = expected_mi_enum(t, RandomModel.all(8)).mean
    est = expected_mi_mc(t, RandomModel.all(8), samples=10_000, seed=5)
    assert abs(est.mean - exact) <= 3 * est.std_error


def test_dispatcher_one_sided_all():
    t = trivial_partition(2)
    for estimator in ("exact", "enumerate"):
        est = expected_mi(Partition([0, 0]), t, RandomModelSpec("all", "one", estimator))
        assert est.mean == pytest.approx(LOG2 / 2, abs=1e-12)


def test_dispatcher_num_k_equals_n():
    t = Partition([0, 0, 1, 2])
    c = trivial_partition(4)
    for estimator in ("exact", "enumerate"):
        e = expected_mi(c, t, RandomModelSpec("num", "one", estimator)).mean
        assert e == pytest.approx(entropy(t), abs=1e-12)


def test_dispatcher_perm_two_sided_identity():
    rng = Seed(42).rng()
    for _ in range(40):
        c, t = random_pair(rng, 2, 7)
        one = expected_mi(c, t, RandomModelSpec("perm", "one", "exact")).mean
        two = expected_mi(c, t, RandomModelSpec("perm", "two", "exact", verify=True))
        assert two.estimator == "enumerate"
        assert abs(one - two.mean) <= 1e-10


def test_spec_validation():
    with pytest.raises(ValueError):
        RandomModelSpec(estimator="bogus")
    with pytest.raises(ValueError):
        RandomModelSpec(sided="three")
    with pytest.raises(ValueError):
        RandomModelSpec(estimator="mc", samples=1)
    assert RandomModelSpec(estimator="exact-perm").estimator == "exact"


def test_expected_nmi_constant_normalizers():
    c, t = Partition([0, 0, 0, 1, 1, 2]), Partition([0, 1, 1, 2, 2, 2])
    for p in (-math.inf, 0, 1, math.inf):
        e = expected_nmi(c, t, RandomModelSpec("perm"), p).mean
        e_mi = expected_mi_perm_exact(c.shape(), t.shape()).mean
        assert e == pytest.approx(e_mi / generalized_mean(entropy(c), entropy(t), p), abs=1e-14)
    e_all = expected_nmi(c, t, RandomModelSpec("all"), bound="log-n").mean
    assert e_all == pytest.approx(expected_mi(c, t, RandomModelSpec("all")).mean / math.log(6), abs=1e-14)


@pytest.mark.parametrize("kind", ["all", "num"])
def test_expected_nmi_shape_sum_matches_enumeration(kind):
    rng = Seed(7).rng()
    for _ in range(6):
        c, t = random_pair(rng, 2, 7)
        model = RandomModel.around(kind, c)
        for p in (-math.inf, 0, 1):
            exact = expected_nmi_shape_sum(model, t.shape(), p)
            assert exact == pytest.approx(expected_nmi_enum(t, model, p).mean, abs=1e-12)
            via_dispatch = expected_nmi(c, t, RandomModelSpec(kind, "one", "exact"), p).mean
            assert via_dispatch == pytest.approx(exact, abs=1e-15)


def test_expected_nmi_mc_vs_enum_n8():
    c = Partition([0, 0, 1, 1, 2, 2, 3, 3])
    t = Partition([0, 0, 0, 1, 1, 2, 2, 3])
    for kind in ("all", "num"):
        exact = expected_nmi(c, t, RandomModelSpec(kind, "one", "enumerate"), 0).mean
        est = expected_nmi(c, t, RandomModelSpec(kind, "one", "mc", samples=10_000, seed=2), 0)
        assert abs(est.mean - exact) <= 3 * est.std_error


def test_estimate_serialization():
    est = ExpectationEstimate(0.5, 0.01, "mc", 100)
    assert est.to_dict() == {"mean": 0.5, "stdError": 0.01, "estimator": "mc", "sampleCount": 100}
    assert est.band() == (0.48, 0.52)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_mc_centering_property(seed):
    # fresh draws of I(C',T) average to the exact expectation within 4 standard errors
    rng = Seed(seed).rng()
    c, t = random_pair(rng, 3, 12)
    for kind in ("all", "num", "perm"):
        model = RandomModel.around(kind, c)
        exact = expected_mi_exact(t, model).mean
        est = expected_mi_mc(t, model, samples=300, seed=seed)
        assert abs(est.mean - exact) <= 4 * est.std_error + 1e-12
