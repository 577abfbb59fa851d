import math

import pytest
from hypothesis import given, strategies as st

from partmetrics.infotheory import entropy, generalized_mean, mi, mutual_information, nmi, parse_mean
from partmetrics.partition import Partition, Shape, contingency, trivial_partition

LOG2 = math.log(2)
memberships = st.lists(st.integers(0, 5), min_size=1, max_size=40)


def pair_strategy():
    return st.integers(1, 40).flatmap(
        lambda n: st.tuples(
            st.lists(st.integers(0, 6), min_size=n, max_size=n),
            st.lists(st.integers(0, 6), min_size=n, max_size=n),
        )
    )


def naive_mi(c, t):
    # direct transcription of the double sum over block pairs
    n = c.n
    total = 0.0
    for bc in c.blocks:
        for bt in t.blocks:
            m = len(bc & bt)
            if m:
                total += (m / n) * math.log(n * m / (len(bc) * len(bt)))
    return total


@pytest.mark.parametrize(
    "sizes, expected",
    [([7], 0.0), ([2, 2], LOG2), ([1, 1, 2], 1.5 * LOG2)],
)
def test_entropy_examples(sizes, expected):
    assert entropy(Shape(sizes)) == pytest.approx(expected, abs=1e-12)


def test_entropy_value_1_1_2():
    assert entropy(Shape([1, 1, 2])) == pytest.approx(1.039720770839918, abs=1e-12)


@pytest.mark.parametrize(
    "c, t, expected",
    [
        ([0, 0, 1, 1], [0, 0, 1, 1], LOG2),
        ([0, 0, 1, 1], [0, 1, 0, 1], 0.0),
        ([0, 1, 2, 3], [0, 0, 1, 1], LOG2),
    ],
)
def test_mi_examples(c, t, expected):
    c, t = Partition(c), Partition(t)
    assert mutual_information(contingency(c, t)) == pytest.approx(expected, abs=1e-12)
    assert mi(c, t) == pytest.approx(expected, abs=1e-12)


def test_generalized_mean_examples():
    assert generalized_mean(3.0, 3.0, -math.inf) == 3.0
    assert generalized_mean(1, 4, 0) == pytest.approx(2.0)
    assert generalized_mean(1, 4, 1) == pytest.approx(2.5)
    assert generalized_mean(1, 4, math.inf) == 4
    assert generalized_mean(1, 4, -math.inf) == 1
    assert generalized_mean(0, 4, -1) == 0
    assert parse_mean("geometric") == 0 and parse_mean("max") == math.inf and parse_mean("0.5") == 0.5


@given(st.floats(0, 50), st.floats(0, 50), st.sampled_from([-math.inf, -2, -1, -0.5, 0, 0.5, 1, 2, 3, math.inf]),
       st.sampled_from([-math.inf, -2, -1, -0.5, 0, 0.5, 1, 2, 3, math.inf]))
def test_generalized_mean_monotone_in_p(a, b, p, q):
    lo, hi = min(p, q), max(p, q)
    assert generalized_mean(a, b, lo) <= generalized_mean(a, b, hi) * (1 + 1e-12) + 1e-12
    assert min(a, b) - 1e-12 <= generalized_mean(a, b, p) <= max(a, b) + 1e-12


def test_nmi_examples():
    t = Partition([i // 10 for i in range(100)])
    assert nmi(t, t, 0) == pytest.approx(1.0)
    assert nmi(trivial_partition(100, "one-block"), t, 0) == 0.0
    expected = math.sqrt(math.log(10) / math.log(100))
    assert nmi(trivial_partition(100, "singletons"), t, 0) == pytest.approx(expected, abs=1e-12)
    assert nmi(trivial_partition(100, "singletons"), t, 0) == pytest.approx(0.707107, abs=1e-6)


def test_nmi_degenerate_is_zero():
    one = trivial_partition(5, "one-block")
    assert nmi(one, one, 0) == 0.0
    assert nmi(one, Partition([0, 1, 0, 1, 2]), -math.inf) == 0.0


@given(pair_strategy())
def test_mi_properties(pair):
    c, t = Partition(pair[0]), Partition(pair[1])
    i = mi(c, t)
    assert i == pytest.approx(naive_mi(c, t), abs=1e-12)
    assert mutual_information(contingency(c, t)) == pytest.approx(i, abs=1e-12)
    assert abs(mi(t, c) - i) <= 1e-12
    assert -1e-12 <= i <= min(entropy(c), entropy(t)) + 1e-12
    for p in (-math.inf, 0, 1, math.inf):
        assert 0 <= nmi(c, t, p) <= 1 + 1e-12


@given(pair_strategy(), st.randoms(use_true_random=False))
def test_mi_permutation_invariant(pair, rnd):
    c, t = Partition(pair[0]), Partition(pair[1])
    perm = list(range(c.n))
    rnd.shuffle(perm)
    assert mi(c.permuted(perm), t.permuted(perm)) == pytest.approx(mi(c, t), abs=1e-12)


@given(memberships)
def test_entropy_bounded_by_log_n(raw):
    p = Partition(raw)
    h = entropy(p)
    assert 0 <= h <= math.log(p.n) + 1e-12
    if p.k == p.n:
        assert h == pytest.approx(math.log(p.n), abs=1e-12)
    else:
        assert h < math.log(p.n) - 1e-12
