"""Chance expectations of mutual information and NMI under random models.

Estimators
----------
``exact``
    Closed forms. Under ``perm`` the hypergeometric cell sum. Under ``all``
    and ``num``, E[I] by block inclusion: a fixed ``s``-subset is a block of
    a uniform member with probability ``w(s)`` (``Bell(n-s)/Bell(n)`` or
    ``S(n-s, k-1)/S(n, k)``), so E[I] is a sum over block sizes and overlap
    counts. E[NMI] with an entropy-dependent bound is summed over member
    shapes, which is tractable only for small ``n``.
``enumerate``
    Brute-force average over every member of the ensemble.
``mc``
    Uniform sampling with per-sample counter seeds; reports a standard error.

All values are in nats.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from math import comb

from .combinatorics import EnsembleTooLarge, RandomModel, Seed, enum_cap, integer_partitions
from .infotheory import entropy, generalized_mean, mi
from .partition import Partition, PartitionError, Shape

ESTIMATORS = ("exact", "enumerate", "mc")
SIDES = ("one", "two")
BOUNDS = ("generalized-mean", "log-n", "self-truth")
DEFAULT_SAMPLES = 10_000
SHAPE_SUM_CAP = 30
_ALIASES = {"exact-perm": "exact", "enum": "enumerate", "monte-carlo": "mc"}


@dataclass(frozen=True)
class ExpectationEstimate:
    mean: float
    std_error: float = 0.0
    estimator: str = "exact"
    sample_count: int = 0

    def band(self, width: float = 2.0) -> tuple[float, float]:
        return self.mean - width * self.std_error, self.mean + width * self.std_error

    def scaled(self, factor: float) -> ExpectationEstimate:
        return ExpectationEstimate(self.mean * factor, self.std_error * abs(factor), self.estimator, self.sample_count)

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "stdError": self.std_error,
            "estimator": self.estimator,
            "sampleCount": self.sample_count,
        }


@dataclass(frozen=True)
class RandomModelSpec:
    """Which ensemble, which sides are randomized, and how to estimate."""

    model: str = "all"
    sided: str = "one"
    estimator: str = "exact"
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    verify: bool = False
    workers: int = 1

    def __post_init__(self):
        estimator = _ALIASES.get(self.estimator, self.estimator)
        object.__setattr__(self, "estimator", estimator)
        if self.model not in ("all", "num", "perm"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.sided not in SIDES:
            raise ValueError(f"sided must be 'one' or 'two', got {self.sided!r}")
        if estimator not in ESTIMATORS:
            raise ValueError(f"unknown estimator {self.estimator!r}; expected one of {ESTIMATORS}")
        if estimator == "mc" and self.samples < 2:
            raise ValueError("Monte Carlo needs at least 2 samples")

    def to_dict(self) -> dict:
        return asdict(self)


def default_workers() -> int:
    value = os.environ.get("PARTMETRICS_THREADS")
    return max(1, int(value)) if value else 1


# --- exact: permutation model ------------------------------------------------


def _cell_expectation(n: int, a: int, b: int) -> float:
    """E[(m/n) log(n m / (a b))] for hypergeometric overlap m of an a-block and a b-block."""
    total = comb(n, a)
    terms = []
    for m in range(max(1, a + b - n), min(a, b) + 1):
        prob = comb(b, m) * comb(n - b, a - m) / total
        terms.append(prob * (m / n) * math.log(n * m / (a * b)))
    return math.fsum(terms)


@lru_cache(maxsize=65536)
def _perm_exact(sc: tuple[int, ...], st: tuple[int, ...]) -> float:
    n = sum(sc)
    mc, mt = Shape(sc).multiplicities(), Shape(st).multiplicities()
    terms = [
        ca * cb * _cell_expectation(n, a, b)
        for a, ca in sorted(mc.items())
        for b, cb in sorted(mt.items())
    ]
    return max(math.fsum(terms), 0.0)


def expected_mi_perm_exact(sc: Shape, st: Shape) -> ExpectationEstimate:
    """E[I] over uniform relabelings of two shapes (hypergeometric cell sum)."""
    if sc.n != st.n:
        raise PartitionError(f"shape sizes differ: {sc.n} vs {st.n}")
    # canonical argument order keeps the value bit-for-bit symmetric
    a, b = sorted((sc.sizes, st.sizes))
    return ExpectationEstimate(_perm_exact(a, b), 0.0, "exact", 0)


# --- exact: block inclusion -------------------------------------------------------


def _weights(model: RandomModel) -> list[tuple[int, int]]:
    """Numerator/denominator pairs of w(s), s = 0..n, over a common denominator."""
    probs = [model.block_probability(s) for s in range(model.n + 1)]
    den = math.lcm(*(p.denominator for p in probs))
    return [(p.numerator * (den // p.denominator), den) for p in probs]


@lru_cache(maxsize=65536)
def _column_term(model: RandomModel, t: int) -> float:
    # sum over subsets B of the overlap term with one fixed column of size t
    n = model.n
    w = _weights(model)
    terms = []
    for m in range(1, t + 1):
        ways_in = comb(t, m)
        for s in range(m, n - t + m + 1):
            num, den = w[s]
            if num == 0:
                continue
            prob = ways_in * comb(n - t, s - m) * num / den
            terms.append(prob * (m / n) * math.log(n * m / (s * t)))
    return math.fsum(terms)


def expected_mi_blocks(model: RandomModel, st: Shape) -> float:
    """One-sided E[I(C', T)] for C' uniform in ``model`` by block inclusion."""
    if st.n != model.n:
        raise PartitionError("truth and model sizes differ")
    return max(math.fsum(cnt * _column_term(model, t) for t, cnt in sorted(st.multiplicities().items())), 0.0)


@lru_cache(maxsize=1024)
def expected_mi_blocks_two_sided(model_c: RandomModel, model_t: RandomModel) -> float:
    """E[I(C', T')] with C' and T' independent and uniform in their models."""
    n = model_c.n
    if model_t.n != n:
        raise PartitionError("model sizes differ")
    wc, wt = _weights(model_c), _weights(model_t)
    terms = []
    for a in range(1, n + 1):
        na, da = wc[a]
        if na == 0:
            continue
        for b in range(1, n + 1):
            nb, db = wt[b]
            if nb == 0:
                continue
            for m in range(max(1, a + b - n), min(a, b) + 1):
                count = comb(n, a) * comb(a, m) * comb(n - a, b - m)
                prob = count * na * nb / (da * db)
                terms.append(prob * (m / n) * math.log(n * m / (a * b)))
    return max(math.fsum(terms), 0.0)


def expected_mi_exact(t: Partition | Shape, model: RandomModel) -> ExpectationEstimate:
    """One-sided exact E[I(C', T)] with C' uniform in ``model``."""
    st = t.shape() if isinstance(t, Partition) else t
    if model.kind == "perm":
        return expected_mi_perm_exact(model.shape, st)
    return ExpectationEstimate(expected_mi_blocks(model, st), 0.0, "exact", 0)


def _bound(hc: float, ht: float, n: int, p: float, bound: str) -> float:
    if bound == "generalized-mean":
        return generalized_mean(hc, ht, p)
    if bound == "log-n":
        return math.log(n)
    if bound == "self-truth":
        return ht
    raise ValueError(f"unknown bound {bound!r}; expected one of {BOUNDS}")


def expected_nmi_shape_sum(model: RandomModel, st: Shape, p: float = 0.0, bound: str = "generalized-mean") -> float:
    """E[NMI(C', T)] by conditioning on the shape of C'.

    Given its shape, C' is uniform over relabelings, so each shape class
    contributes its permutation-model expectation over its own normalizer.
    """
    if model.n > SHAPE_SUM_CAP and model.kind != "perm":
        raise EnsembleTooLarge(
            f"exact E[NMI] with a per-sample normalizer is limited to n <= {SHAPE_SUM_CAP}; use mc"
        )
    ht = entropy(st)
    terms = []
    for shape, prob in model.shape_probabilities():
        norm = _bound(entropy(shape), ht, model.n, p, bound)
        if norm == 0:
            continue
        terms.append(float(prob) * expected_mi_perm_exact(shape, st).mean / norm)
    return math.fsum(terms)


def expected_mi_shape_sum(model: RandomModel, st: Shape) -> float:
    """E[I] by the same shape decomposition; an independent route to block inclusion."""
    return math.fsum(float(prob) * expected_mi_perm_exact(shape, st).mean for shape, prob in model.shape_probabilities())


# --- enumeration ------------------------------------------------------------------


def _average(values: list[float], estimator: str, samples: int = 0) -> ExpectationEstimate:
    count = len(values)
    mean = math.fsum(values) / count
    if estimator != "mc":
        return ExpectationEstimate(mean, 0.0, estimator, 0)
    var = math.fsum((v - mean) ** 2 for v in values) / (count - 1)
    return ExpectationEstimate(mean, math.sqrt(var / count), "mc", count)


def expected_mi_enum(t: Partition, model: RandomModel, cap: int | None = None) -> ExpectationEstimate:
    """Exact average of I(C', T) over every member of ``model``.

    Members of a ``perm`` ensemble all carry the same relabeling
    multiplicity, so the plain average is the relabeling-weighted one.
    """
    if t.n != model.n:
        raise PartitionError("truth and model sizes differ")
    values = [mi(c, t) for c in model.enumerate(cap)]
    return _average(values, "enumerate")


def expected_nmi_enum(t: Partition, model: RandomModel, p: float = 0.0, bound: str = "generalized-mean",
                      cap: int | None = None) -> ExpectationEstimate:
    values = [_nmi_value(c, t, p, bound) for c in model.enumerate(cap)]
    return _average(values, "enumerate")


def expected_mi_enum_two_sided(model_c: RandomModel, model_t: RandomModel, cap: int | None = None,
                               max_pairs: int = 5_000_000) -> ExpectationEstimate:
    """Literal double enumeration over both ensembles."""
    limit = enum_cap() if cap is None else cap
    if max(model_c.n, model_t.n) > limit or model_c.size() * model_t.size() > max_pairs:
        raise EnsembleTooLarge(
            f"ensemble too large: {model_c.size()} x {model_t.size()} pairs exceeds the double-enumeration budget"
        )
    cs = list(model_c.enumerate(cap))
    values = [mi(c, t) for t in model_t.enumerate(cap) for c in cs]
    return _average(values, "enumerate")


# --- Monte Carlo ------------------------------------------------------------------


def _nmi_value(c: Partition, t: Partition, p: float, bound: str) -> float:
    norm = _bound(entropy(c), entropy(t), c.n, p, bound)
    return mi(c, t) / norm if norm > 0 else 0.0


def _mc_chunk(task) -> list[float]:
    kind, model_c, model_t, t, root, start, stop, p, bound = task
    out = []
    for i in range(start, stop):
        if kind == "two":
            rng = Seed(root, i).rng()
            c, tt = model_c.draw(rng), model_t.draw(rng)
            out.append(mi(c, tt))
        else:
            c = model_c.sample(Seed(root, i))
            out.append(mi(c, t) if kind == "mi" else _nmi_value(c, t, p, bound))
    return out


@lru_cache(maxsize=256)
def _run_mc(kind, model_c, model_t, t, samples, seed, workers, p=0.0, bound="generalized-mean"):
    # cached per model: every guess in one ensemble shares the same baseline
    if samples < 2:
        raise ValueError("Monte Carlo needs at least 2 samples")
    workers = max(1, workers)
    if model_c.n == 1:
        return ExpectationEstimate(0.0, 0.0, "mc", samples)
    step = -(-samples // workers)
    tasks = [
        (kind, model_c, model_t, t, seed, lo, min(lo + step, samples), p, bound)
        for lo in range(0, samples, step)
    ]
    if workers == 1 or len(tasks) == 1:
        chunks = map(_mc_chunk, tasks)
        values = [v for chunk in chunks for v in chunk]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = [v for chunk in pool.map(_mc_chunk, tasks) for v in chunk]
    # fsum is exactly rounded, so the result does not depend on chunking
    return _average(values, "mc", samples)


def expected_mi_mc(t: Partition, model: RandomModel, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                   workers: int = 1) -> ExpectationEstimate:
    """Sample mean of I(C', T); standard error is the sample sd over sqrt(samples)."""
    if t.n != model.n:
        raise PartitionError("truth and model sizes differ")
    return _run_mc("mi", model, None, t, samples, seed, workers)


def expected_nmi_mc(t: Partition, model: RandomModel, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                    p: float = 0.0, bound: str = "generalized-mean", workers: int = 1) -> ExpectationEstimate:
    return _run_mc("nmi", model, None, t, samples, seed, workers, p, bound)


def expected_mi_mc_two_sided(model_c: RandomModel, model_t: RandomModel, samples: int = DEFAULT_SAMPLES,
                             seed: int = 0, workers: int = 1) -> ExpectationEstimate:
    return _run_mc("two", model_c, model_t, None, samples, seed, workers)


# --- dispatch ---------------------------------------------------------------------


def _check_pair(c: Partition, t: Partition):
    if c.n != t.n:
        raise PartitionError(f"size mismatch: {c.n} vs {t.n} elements")


def expected_mi(c: Partition, t: Partition, spec: RandomModelSpec = RandomModelSpec()) -> ExpectationEstimate:
    """Chance baseline E[I] for the pair under ``spec``.

    One-sided: C' is drawn from the model around C while T stays fixed.
    Two-sided: C' and T' are drawn independently from the models around C
    and T. Under ``perm`` the two coincide by exchangeability, so the
    one-sided value is returned unless ``spec.verify`` forces the literal
    double enumeration.
    """
    # the cap is part of the cache key so a cached result never bypasses it
    return _expected_mi(c, t, spec, enum_cap())


@lru_cache(maxsize=4096)
def _expected_mi(c: Partition, t: Partition, spec: RandomModelSpec, cap: int) -> ExpectationEstimate:
    _check_pair(c, t)
    model_c = RandomModel.around(spec.model, c)
    est = spec.estimator
    if c.n == 1:
        return ExpectationEstimate(0.0, 0.0, est, spec.samples if est == "mc" else 0)

    if spec.sided == "two" and (spec.model != "perm" or spec.verify):
        model_t = RandomModel.around(spec.model, t)
        if spec.verify:
            return expected_mi_enum_two_sided(model_c, model_t)
        if est == "exact":
            if spec.model == "perm":
                return expected_mi_perm_exact(c.shape(), t.shape())
            return ExpectationEstimate(expected_mi_blocks_two_sided(model_c, model_t), 0.0, "exact", 0)
        if est == "enumerate":
            return expected_mi_enum_two_sided(model_c, model_t)
        return expected_mi_mc_two_sided(model_c, model_t, spec.samples, spec.seed, spec.workers)

    if est == "exact":
        return expected_mi_exact(t, model_c)
    if est == "enumerate":
        return expected_mi_enum(t, model_c)
    return expected_mi_mc(t, model_c, spec.samples, spec.seed, spec.workers)


def expected_nmi(c: Partition, t: Partition, spec: RandomModelSpec = RandomModelSpec(), p: float = 0.0,
                 bound: str = "generalized-mean") -> ExpectationEstimate:
    """One-sided E[NMI(C', T)], each draw normalized by its own bound.

    When the bound is constant over the ensemble (``perm``, ``log-n``,
    ``self-truth``) this is E[I] divided by that constant.
    """
    return _expected_nmi(c, t, spec, p, bound, enum_cap())


@lru_cache(maxsize=4096)
def _expected_nmi(c: Partition, t: Partition, spec: RandomModelSpec, p: float, bound: str,
                  cap: int) -> ExpectationEstimate:
    _check_pair(c, t)
    if bound not in BOUNDS:
        raise ValueError(f"unknown bound {bound!r}; expected one of {BOUNDS}")
    model_c = RandomModel.around(spec.model, c)
    ht = entropy(t)
    if spec.model == "perm" or bound != "generalized-mean":
        norm = _bound(entropy(c), ht, c.n, p, bound)
        base = expected_mi(c, t, RandomModelSpec(spec.model, "one", spec.estimator, spec.samples, spec.seed,
                                                 workers=spec.workers))
        if norm == 0:
            return ExpectationEstimate(0.0, 0.0, base.estimator, base.sample_count)
        return base.scaled(1 / norm)
    if c.n == 1:
        return ExpectationEstimate(0.0, 0.0, spec.estimator, 0)
    if spec.estimator == "exact":
        return ExpectationEstimate(expected_nmi_shape_sum(model_c, t.shape(), p, bound), 0.0, "exact", 0)
    if spec.estimator == "enumerate":
        return expected_nmi_enum(t, model_c, p, bound)
    return expected_nmi_mc(t, model_c, spec.samples, spec.seed, p, bound, spec.workers)
