"""Maximum-likelihood entropy and mutual information of partitions (nats)."""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable

import numpy as np

from .partition import ContingencyTable, Partition, Shape, contingency

NAMED_MEANS = {
    "min": -math.inf,
    "harmonic": -1.0,
    "geometric": 0.0,
    "arithmetic": 1.0,
    "max": math.inf,
}


def to_bits(nats: float) -> float:
    return nats / math.log(2)


def entropy(shape: Shape | Partition | Iterable[int]) -> float:
    """``-sum (s/N) log(s/N)`` over block sizes ``s``."""
    if isinstance(shape, Partition):
        sizes = shape.sizes
    elif isinstance(shape, Shape):
        sizes = shape.sizes
    else:
        sizes = tuple(shape)
    n = sum(sizes)
    h = -math.fsum((s / n) * math.log(s / n) for s in sizes if s)
    return max(h, 0.0)


def mutual_information(ct: ContingencyTable) -> float:
    """MI of a contingency table; zero cells contribute nothing."""
    counts = ct.counts
    n = counts.sum()
    rows, cols = np.nonzero(counts)
    m = counts[rows, cols].astype(float)
    a = counts.sum(axis=1)[rows].astype(float)
    b = counts.sum(axis=0)[cols].astype(float)
    terms = (m / n) * np.log(n * m / (a * b))
    return max(math.fsum(terms.tolist()), 0.0)


def mi(c: Partition, t: Partition) -> float:
    """Mutual information between two partitions of the same elements."""
    if c.n < 64:
        return _mi_small(c, t)
    return mutual_information(contingency(c, t))


def _mi_small(c: Partition, t: Partition) -> float:
    # pure-Python path; cheaper than numpy for the tiny tables of enumeration
    if c.n != t.n:
        raise ValueError(f"size mismatch: {c.n} vs {t.n} elements")
    n = c.n
    a, b = c.sizes, t.sizes
    cells = Counter(zip(c.membership, t.membership))
    total = math.fsum((m / n) * math.log(n * m / (a[i] * b[j])) for (i, j), m in cells.items())
    return max(total, 0.0)


def parse_mean(value) -> float:
    """Accept a number or one of ``min|harmonic|geometric|arithmetic|max``."""
    if isinstance(value, str):
        key = value.strip().lower()
        if key in NAMED_MEANS:
            return NAMED_MEANS[key]
        return float(key)
    return float(value)


def generalized_mean(a: float, b: float, p: float = 0.0) -> float:
    """Power mean of two non-negative numbers.

    ``p = -inf`` is the minimum, ``0`` the geometric mean, ``1`` the
    arithmetic mean and ``+inf`` the maximum.
    """
    if a < 0 or b < 0:
        raise ValueError("generalized mean needs non-negative arguments")
    if a == b:
        return a
    if p == -math.inf:
        return min(a, b)
    if p == math.inf:
        return max(a, b)
    if p == 0:
        return math.sqrt(a) * math.sqrt(b)
    lo, hi = min(a, b), max(a, b)
    if lo == 0:
        return 0.0 if p < 0 else hi * 2 ** (-1 / p)
    # log-space relative to the larger value; direct powers overflow for tiny lo and p < 0
    x = p * (math.log(lo) - math.log(hi))
    log_sum = x + math.log1p(math.exp(-x)) if x > 0 else math.log1p(math.exp(x))
    return hi * math.exp((log_sum - math.log(2)) / p)


def nmi(c: Partition, t: Partition, p: float = 0.0) -> float:
    """``I(C,T) / M_p(H(C), H(T))``; 0 when the bound is 0 (trivial input)."""
    bound = generalized_mean(entropy(c), entropy(t), p)
    if bound == 0:
        return 0.0
    return mi(c, t) / bound
