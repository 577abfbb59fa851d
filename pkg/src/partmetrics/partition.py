"""Set partitions of ``0..n-1`` in canonical restricted-growth form.

A :class:`Partition` stores one block id per element. Ids are renumbered by
first occurrence, so two groupings that differ only in label names compare
equal and hash identically.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np

FORMATS = ("labels-per-line", "node-tab-label")


class PartitionError(ValueError):
    """Invalid partition data."""


class ParseError(PartitionError):
    """Malformed partition text; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def canonicalize(labels: Iterable[Hashable]) -> tuple[int, ...]:
    """Relabel so block ids appear in first-occurrence order 0, 1, 2, ..."""
    ids: dict = {}
    return tuple(ids.setdefault(x, len(ids)) for x in labels)


@dataclass(frozen=True)
class Shape:
    """Multiset of block sizes, stored in descending order."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(sorted((int(s) for s in self.sizes), reverse=True))
        if not sizes:
            raise PartitionError("a shape needs at least one block")
        if sizes[-1] < 1:
            raise PartitionError(f"block sizes must be positive, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)

    def multiplicities(self) -> Counter:
        """Map block size -> number of blocks of that size."""
        return Counter(self.sizes)

    def representative(self) -> Partition:
        """The partition with consecutive blocks of these sizes."""
        membership = []
        for block, size in enumerate(self.sizes):
            membership.extend([block] * size)
        return Partition(membership)

    def __iter__(self):
        return iter(self.sizes)

    def __len__(self):
        return len(self.sizes)


@dataclass(frozen=True)
class Partition:
    """A grouping of ``n >= 1`` elements into non-empty disjoint blocks.

    ``membership[i]`` is the block of element ``i``. Any hashable labels are
    accepted and canonicalized on construction.
    """

    membership: tuple[int, ...]

    def __post_init__(self):
        m = canonicalize(self.membership)
        if not m:
            raise PartitionError("a partition needs at least one element")
        object.__setattr__(self, "membership", m)

    @classmethod
    def _trusted(cls, membership: tuple[int, ...]) -> Partition:
        # Caller guarantees canonical form; skips relabeling in hot loops.
        obj = object.__new__(cls)
        object.__setattr__(obj, "membership", membership)
        return obj

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int | None = None) -> Partition:
        blocks = [sorted(b) for b in blocks]
        seen = [x for b in blocks for x in b]
        if n is None:
            n = len(seen)
        if any(not b for b in blocks):
            raise PartitionError("empty block")
        if sorted(seen) != list(range(n)):
            raise PartitionError("blocks must cover 0..n-1 exactly once")
        labels = [0] * n
        for i, b in enumerate(blocks):
            for x in b:
                labels[x] = i
        return cls(labels)

    @property
    def n(self) -> int:
        return len(self.membership)

    @property
    def k(self) -> int:
        return max(self.membership) + 1

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        """Block sizes indexed by block id."""
        counts = [0] * self.k
        for b in self.membership:
            counts[b] += 1
        return tuple(counts)

    @property
    def blocks(self) -> list[frozenset[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for i, b in enumerate(self.membership):
            out[b].append(i)
        return [frozenset(b) for b in out]

    def shape(self) -> Shape:
        return Shape(self.sizes)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.membership, dtype=np.int64)

    def permuted(self, perm: Sequence[int]) -> Partition:
        """Move element ``i`` to position ``perm[i]``."""
        labels = [0] * self.n
        for i, b in enumerate(self.membership):
            labels[perm[i]] = b
        return Partition(labels)

    def __len__(self) -> int:
        return self.n

    def __str__(self) -> str:
        return "".join(map(str, self.membership)) if self.k <= 10 else str(list(self.membership))


def shape_of(p: Partition) -> Shape:
    return p.shape()


def trivial_partition(n: int, kind: str = "singletons") -> Partition:
    """All-singletons or single-block partition of ``n`` elements."""
    if n < 1:
        raise PartitionError("n must be positive")
    if kind == "singletons":
        return Partition._trusted(tuple(range(n)))
    if kind == "one-block":
        return Partition._trusted((0,) * n)
    raise PartitionError(f"unknown trivial partition kind {kind!r}")


@dataclass(frozen=True)
class ContingencyTable:
    """Overlap counts ``counts[i, j] = |C_i & T_j|`` between two partitions."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.ndim != 2 or (counts < 0).any():
            raise PartitionError("contingency counts must be a non-negative matrix")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def row_margins(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_margins(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def transpose(self) -> ContingencyTable:
        return ContingencyTable(self.counts.T)

    def __eq__(self, other):
        if not isinstance(other, ContingencyTable):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    __hash__ = None


def contingency(c: Partition, t: Partition) -> ContingencyTable:
    if c.n != t.n:
        raise PartitionError(f"size mismatch: {c.n} vs {t.n} elements")
    flat = np.bincount(c.as_array() * t.k + t.as_array(), minlength=c.k * t.k)
    return ContingencyTable(flat.reshape(c.k, t.k))


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, raw.rstrip("\r\n")


def detect_format(text: str) -> str:
    lines = [line for _, line in _content_lines(text)]
    if lines and all("\t" in line for line in lines):
        return "node-tab-label"
    return "labels-per-line"


def parse_partition(text: str, format: str = "auto") -> Partition:
    """Parse partition text.

    ``labels-per-line``: line k holds the label of node k. ``node-tab-label``:
    each line is ``<node-index>\\t<label>`` and every index ``0..N-1`` must
    appear once. Blank lines and ``#`` comments are skipped in both formats;
    ``auto`` picks node-tab-label when every content line has a tab.
    """
    if format == "auto":
        format = detect_format(text)
    if format not in FORMATS:
        raise PartitionError(f"unknown format {format!r}; expected one of {FORMATS}")
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty input")

    if format == "labels-per-line":
        labels = []
        for lineno, line in lines:
            if "\t" in line:
                raise ParseError("tab in labels-per-line input", lineno)
            labels.append(line.strip())
        return Partition(labels)

    by_node: dict[int, str] = {}
    for lineno, line in lines:
        fields = line.strip().split("\t")
        if len(fields) != 2 or not fields[1].strip():
            raise ParseError("expected '<node-index>\\t<label>'", lineno)
        try:
            node = int(fields[0])
        except ValueError:
            raise ParseError(f"node index {fields[0]!r} is not an integer", lineno) from None
        if node < 0:
            raise ParseError(f"negative node index {node}", lineno)
        if node in by_node:
            raise ParseError(f"duplicate node {node}", lineno)
        by_node[node] = fields[1].strip()
    n = len(by_node)
    missing = sorted(set(range(n)) - by_node.keys())
    if missing:
        raise ParseError(f"missing node(s) {missing[:5]}; indices must cover 0..{n - 1}")
    return Partition([by_node[i] for i in range(n)])


def format_partition(p: Partition) -> str:
    """Serialize as labels-per-line with canonical integer labels."""
    return "".join(f"{b}\n" for b in p.membership)


def read_partition(path: str | os.PathLike, format: str = "auto") -> Partition:
    with open(path, encoding="utf-8") as fh:
        return parse_partition(fh.read(), format)


def write_partition(p: Partition, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_partition(p))
