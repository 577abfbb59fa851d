import itertools
import random

import pytest

from partmetrics.combinatorics import RandomModel
from partmetrics.partition import Partition


def brute_partitions(n):
    """Every set partition of range(n), built by inserting elements one at a time.

    Independent of the library's restricted-growth enumerator.
    """
    if n == 0:
        yield []
        return
    for smaller in brute_partitions(n - 1):
        for i in range(len(smaller)):
            yield smaller[:i] + [smaller[i] + [n - 1]] + smaller[i + 1 :]
        yield smaller + [[n - 1]]


def brute_partition_objects(n):
    return [Partition.from_blocks(blocks, n) for blocks in brute_partitions(n)]


def all_relabelings(p):
    """Multiset of partitions obtained by applying each of the n! permutations."""
    return [p.permuted(perm) for perm in itertools.permutations(range(p.n))]


def random_pair(rng, n_min, n_max):
    n = rng.randint(n_min, n_max)
    model = RandomModel.all(n)
    return model.draw(rng), model.draw(rng)


@pytest.fixture
def rng():
    return random.Random(20240611)
