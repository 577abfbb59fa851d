"""Counting, enumeration and uniform sampling of set partitions.

Three ensembles are supported, all uniform over their members:

* ``all``  every partition of ``n`` elements (Bell(n) members)
* ``num``  partitions with exactly ``k`` blocks (S(n, k) members)
* ``perm`` partitions with a fixed shape, i.e. relabelings of a reference

Sampling is exact: block counts and join/open decisions are drawn with
integer weights, never floating-point approximations.
"""

from __future__ import annotations

import math
import os
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .partition import Partition, PartitionError, Shape

DEFAULT_ENUM_CAP = 12
MODEL_KINDS = ("all", "num", "perm")
_MASK64 = (1 << 64) - 1


class EnsembleTooLarge(RuntimeError):
    """Exhaustive enumeration refused by the size guard."""


def enum_cap() -> int:
    """Largest ``n`` that may be enumerated (``PARTMETRICS_ENUM_CAP`` overrides)."""
    value = os.environ.get("PARTMETRICS_ENUM_CAP")
    return int(value) if value else DEFAULT_ENUM_CAP


# --- counting ---------------------------------------------------------------

_bell = [1]
_bell_row = [1]
_stirling_rows: list[list[int]] = [[1]]


def bell(n: int) -> int:
    """Number of set partitions of ``n`` elements (Bell triangle)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    global _bell_row
    while len(_bell) <= n:
        row = [_bell_row[-1]]
        for x in _bell_row:
            row.append(row[-1] + x)
        _bell_row = row
        _bell.append(row[0])
    return _bell[n]


def stirling2(n: int, k: int) -> int:
    """Partitions of ``n`` elements into exactly ``k`` non-empty blocks."""
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    if k > n:
        return 0
    while len(_stirling_rows) <= n:
        prev = _stirling_rows[-1]
        m = len(prev)
        row = [0] * (m + 1)
        for j in range(1, m + 1):
            row[j] = j * (prev[j] if j < m else 0) + prev[j - 1]
        _stirling_rows.append(row)
    return _stirling_rows[n][k]


def shape_count(shape: Shape) -> int:
    """Distinct set partitions having this shape."""
    return math.factorial(shape.n) // relabeling_multiplicity(shape)


def relabeling_multiplicity(shape: Shape) -> int:
    """Element permutations that fix a given partition of this shape.

    Every distinct partition of the shape is hit by exactly this many of the
    ``n!`` relabelings, so uniform relabeling is uniform over distinct members.
    """
    out = 1
    for size in shape.sizes:
        out *= math.factorial(size)
    for mult in shape.multiplicities().values():
        out *= math.factorial(mult)
    return out


def integer_partitions(n: int, k: int | None = None) -> Iterator[tuple[int, ...]]:
    """Integer partitions of ``n`` in descending parts (optionally exactly ``k`` parts)."""

    def rec(remaining, largest, parts):
        if remaining == 0:
            if k is None or len(parts) == k:
                yield tuple(parts)
            return
        if k is not None and len(parts) >= k:
            return
        for part in range(min(largest, remaining), 0, -1):
            if k is not None and part * (k - len(parts)) < remaining:
                break
            parts.append(part)
            yield from rec(remaining - part, part, parts)
            parts.pop()

    yield from rec(n, n, [])


# --- random models ------------------------------------------------------------


@dataclass(frozen=True)
class RandomModel:
    """A uniform ensemble of partitions of ``n`` elements."""

    kind: str
    n: int
    k: int | None = None
    shape: Shape | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.kind == "num":
            if self.k is None or not 1 <= self.k <= self.n:
                raise ValueError(f"num model needs 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.kind == "perm":
            if self.shape is None or self.shape.n != self.n:
                raise ValueError("perm model needs a shape summing to n")

    @classmethod
    def all(cls, n: int) -> RandomModel:
        return cls("all", n)

    @classmethod
    def num(cls, n: int, k: int) -> RandomModel:
        return cls("num", n, k=k)

    @classmethod
    def perm(cls, ref: Partition | Shape) -> RandomModel:
        shape = ref.shape() if isinstance(ref, Partition) else ref
        return cls("perm", shape.n, shape=shape)

    @classmethod
    def around(cls, kind: str, p: Partition) -> RandomModel:
        """The ``kind`` ensemble that contains ``p``."""
        if kind == "all":
            return cls.all(p.n)
        if kind == "num":
            return cls.num(p.n, p.k)
        if kind == "perm":
            return cls.perm(p)
        raise ValueError(f"unknown model {kind!r}")

    def size(self) -> int:
        if self.kind == "all":
            return bell(self.n)
        if self.kind == "num":
            return stirling2(self.n, self.k)
        return shape_count(self.shape)

    def contains(self, p: Partition) -> bool:
        if p.n != self.n:
            return False
        if self.kind == "num":
            return p.k == self.k
        if self.kind == "perm":
            return p.shape() == self.shape
        return True

    @lru_cache(maxsize=None)
    def block_probability(self, size: int) -> Fraction:
        """Probability that one fixed ``size``-subset is a block of a uniform member."""
        n = self.n
        if not 1 <= size <= n:
            return Fraction(0)
        if self.kind == "all":
            return Fraction(bell(n - size), bell(n))
        if self.kind == "num":
            return Fraction(stirling2(n - size, self.k - 1), stirling2(n, self.k))
        sizes = list(self.shape.sizes)
        if size not in sizes:
            return Fraction(0)
        sizes.remove(size)
        rest = shape_count(Shape(sizes)) if sizes else 1
        return Fraction(rest, shape_count(self.shape))

    def shape_probabilities(self) -> Iterator[tuple[Shape, Fraction]]:
        """Distribution of the member's shape (conditionally uniform per shape)."""
        if self.kind == "perm":
            yield self.shape, Fraction(1)
            return
        total = self.size()
        k = self.k if self.kind == "num" else None
        for parts in integer_partitions(self.n, k):
            shape = Shape(parts)
            yield shape, Fraction(shape_count(shape), total)

    def enumerate(self, cap: int | None = None) -> Iterator[Partition]:
        if self.kind == "all":
            return enumerate_partitions(self.n, cap=cap)
        if self.kind == "num":
            return enumerate_partitions(self.n, k=self.k, cap=cap)
        return enumerate_partitions(self.n, shape=self.shape, cap=cap)

    def sample(self, seed: Seed) -> Partition:
        return self.draw(seed.rng())

    def draw(self, rng: random.Random) -> Partition:
        """Uniform member using ``rng`` as the only source of randomness."""
        if self.kind == "perm":
            labels = list(self.shape.representative().membership)
            rng.shuffle(labels)
            return Partition(labels)
        if self.kind == "num":
            return _draw_num(self.n, self.k, rng)
        total = bell(self.n)
        u = rng.randrange(total)
        for k in range(1, self.n + 1):
            u -= stirling2(self.n, k)
            if u < 0:
                return _draw_num(self.n, k, rng)
        raise AssertionError("Stirling numbers must sum to the Bell number")

    def describe(self) -> str:
        if self.kind == "num":
            return f"num(n={self.n}, k={self.k})"
        if self.kind == "perm":
            return f"perm(shape={list(self.shape.sizes)})"
        return f"all(n={self.n})"


def _draw_num(n: int, k: int, rng: random.Random) -> Partition:
    # Peel elements off the end: element m-1 opens its own block in
    # S(m-1, j-1) of the S(m, j) partitions, and joins one of j blocks of a
    # smaller partition otherwise.
    choices = [0] * n
    j = k
    for m in range(n, 0, -1):
        if j == m:
            choices[m - 1] = -1
            j -= 1
            continue
        if rng.randrange(stirling2(m, j)) < stirling2(m - 1, j - 1):
            choices[m - 1] = -1
            j -= 1
        else:
            choices[m - 1] = rng.randrange(j)
    labels = [0] * n
    opened = 0
    for i, choice in enumerate(choices):
        if choice < 0:
            labels[i] = opened
            opened += 1
        else:
            labels[i] = choice
    return Partition(labels)


@dataclass(frozen=True)
class Seed:
    """Counter-based seed: the pair ``(root, stream)`` fixes every draw."""

    root: int
    stream: int = 0

    def __post_init__(self):
        object.__setattr__(self, "root", int(self.root) & _MASK64)
        object.__setattr__(self, "stream", int(self.stream) & _MASK64)

    def rng(self) -> random.Random:
        return random.Random((self.root << 64) | self.stream)

    def at(self, index: int) -> Seed:
        return Seed(self.root, self.stream + index)


def sample_partition(model: RandomModel, seed: Seed) -> Partition:
    return model.sample(seed)


# --- enumeration --------------------------------------------------------------


def _dominated(sizes: list[int], target: tuple[int, ...]) -> bool:
    ordered = sorted(sizes, reverse=True)
    return all(a <= b for a, b in zip(ordered, target))


def enumerate_partitions(
    n: int,
    *,
    k: int | None = None,
    shape: Shape | None = None,
    cap: int | None = None,
) -> Iterator[Partition]:
    """Yield each partition of ``n`` elements once, in lexicographic RGS order.

    Restrict to exactly ``k`` blocks or to a fixed ``shape``. Refuses
    ``n`` above the enumeration cap with :class:`EnsembleTooLarge`.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if k is not None and shape is not None:
        raise ValueError("give k or shape, not both")
    limit = enum_cap() if cap is None else cap
    if n > limit:
        raise EnsembleTooLarge(f"ensemble too large: n={n} exceeds enumeration cap {limit}")
    if shape is not None and shape.n != n:
        raise PartitionError(f"shape {list(shape.sizes)} does not sum to {n}")
    if k is not None and not 1 <= k <= n:
        return iter(())
    return _rgs(n, k, shape)


def _rgs(n, k, shape):
    if shape is not None:
        target = shape.sizes
        k_max = len(target)

        def feasible(sizes, remaining):
            return len(sizes) + remaining >= k_max and _dominated(sizes, target)

        def complete(sizes):
            return tuple(sorted(sizes, reverse=True)) == target

    elif k is not None:
        k_max = k

        def feasible(sizes, remaining):
            return len(sizes) + remaining >= k

        def complete(sizes):
            return len(sizes) == k

    else:
        k_max = n

        def feasible(sizes, remaining):
            return True

        def complete(sizes):
            return True

    a = [0] * n
    sizes = [1]
    if n == 1:
        if complete(sizes):
            yield Partition._trusted((0,))
        return
    if not feasible(sizes, n - 1):
        return
    tried = [0] * n
    i = 1
    while True:
        if i == n:
            if complete(sizes):
                yield Partition._trusted(tuple(a))
            i -= 1
            _unplace(sizes, a[i])
            continue
        v = tried[i]
        if v <= len(sizes) and v < k_max:
            tried[i] = v + 1
            _place(sizes, v)
            if feasible(sizes, n - i - 1):
                a[i] = v
                i += 1
            else:
                _unplace(sizes, v)
        else:
            tried[i] = 0
            i -= 1
            if i == 0:
                return
            _unplace(sizes, a[i])


def _place(sizes, v):
    if v == len(sizes):
        sizes.append(1)
    else:
        sizes[v] += 1


def _unplace(sizes, v):
    sizes[v] -= 1
    if sizes[v] == 0:
        # only the newest block can empty out, since blocks open in order
        sizes.pop()


def partition_counts_by_shape(n: int) -> Counter:
    """Shape histogram of all partitions of ``n`` (by enumeration)."""
    return Counter(p.shape() for p in enumerate_partitions(n))
