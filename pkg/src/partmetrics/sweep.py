"""Label-noise sweep: degrade a planted truth and watch how the scores fall.

A truth of ``k`` equal blocks is corrupted by moving a fraction ``mu`` of its
elements into other blocks. The degraded clustering and two trivial guesses
(singletons, one block) are scored with each requested metric. NMI rewards
the singletons guess with a high score at every noise level; the adjusted
scores do not.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .combinatorics import Seed
from .expectations import RandomModelSpec, default_workers
from .metrics import MetricConfig, MetricResult, nmi_metric, score
from .partition import Partition, PartitionError, trivial_partition

log = logging.getLogger(__name__)

CSV_HEADER = ("mu", "replicate", "guess", "metric", "score", "stderr")
GUESSES = ("degraded", "singletons", "one-block")
DEFAULT_MUS = tuple(i / 10 for i in range(11))

# metric name -> (kind, model, bound); every adjusted entry is one-sided
SWEEP_METRICS = {
    "nmi": ("nmi", "perm", "generalized-mean"),
    "ami-perm": ("ami", "perm", "generalized-mean"),
    "ami-all": ("ami", "all", "log-n"),
    "ami-all-self": ("ami", "all", "self-truth"),
    "rrnmi-perm": ("rrnmi", "perm", "generalized-mean"),
}
DEFAULT_METRICS = ("nmi", "ami-perm", "ami-all", "ami-all-self")


@dataclass(frozen=True)
class SweepConfig:
    n: int = 100
    k: int = 10
    truth: Partition | None = None
    mus: tuple[float, ...] = DEFAULT_MUS
    replicates: int = 5
    metrics: tuple[str, ...] = DEFAULT_METRICS
    seed: int = 0
    estimator: str = "exact"
    samples: int = 10_000
    workers: int = field(default_factory=default_workers)

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if not self.mus:
            raise ValueError("empty noise grid")
        for mu in self.mus:
            if not 0 <= mu <= 1:
                raise ValueError(f"noise level {mu} outside [0, 1]")
        for m in self.metrics:
            if m not in SWEEP_METRICS:
                raise ValueError(f"unknown sweep metric {m!r}; expected one of {tuple(SWEEP_METRICS)}")
        if self.truth is None and not 1 <= self.k <= self.n:
            raise ValueError(f"cannot split {self.n} elements into {self.k} blocks")

    def planted(self) -> Partition:
        if self.truth is not None:
            return self.truth
        return Partition([i * self.k // self.n for i in range(self.n)])


def noisy_count(mu: float, n: int) -> int:
    """Number of elements moved at noise level ``mu`` (half rounds up)."""
    return math.floor(mu * n + 0.5)


def degraded_labels(t: Partition, mu: float, seed: Seed) -> list[int]:
    """Labels of ``t`` after moving ``round(mu * N)`` distinct elements, before canonicalization.

    Each moved element goes to a uniformly chosen block of ``t`` other than its own.
    """
    if not 0 <= mu <= 1:
        raise ValueError(f"noise level {mu} outside [0, 1]")
    labels = list(t.membership)
    moved = noisy_count(mu, t.n)
    if moved == 0:
        return labels
    if t.k < 2:
        raise PartitionError("cannot move elements out of a single-block partition")
    rng = seed.rng()
    for i in sorted(rng.sample(range(t.n), moved)):
        other = rng.randrange(t.k - 1)
        labels[i] = other + (other >= labels[i])
    return labels


def degrade(t: Partition, mu: float, seed: Seed) -> Partition:
    return Partition(degraded_labels(t, mu, seed))


def _metric(name: str, cfg: SweepConfig) -> MetricConfig:
    kind, model, bound = SWEEP_METRICS[name]
    spec = RandomModelSpec(model, "one", "exact" if model == "perm" else cfg.estimator, cfg.samples, cfg.seed)
    return MetricConfig(kind, spec, 0.0, bound)


def _evaluate(name: str, c: Partition, t: Partition, cfg: SweepConfig) -> MetricResult:
    if name == "nmi":
        return nmi_metric(c, t)
    return score(c, t, _metric(name, cfg))


def _point(args) -> list[tuple]:
    cfg, mu_index, replicate = args
    mu = cfg.mus[mu_index]
    t = cfg.planted()
    guesses = {
        "degraded": degrade(t, mu, Seed(cfg.seed, (replicate << 32) | mu_index)),
        "singletons": trivial_partition(t.n, "singletons"),
        "one-block": trivial_partition(t.n, "one-block"),
    }
    rows = []
    for guess in GUESSES:
        for name in cfg.metrics:
            r = _evaluate(name, guesses[guess], t, cfg)
            rows.append((mu, replicate, guess, name, r.score, r.std_error))
    return rows


def run_trap(cfg: SweepConfig) -> list[tuple]:
    """All rows in (mu, replicate, guess, metric) order."""
    tasks = [(cfg, i, r) for i in range(len(cfg.mus)) for r in range(cfg.replicates)]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_point, tasks))
    else:
        chunks = [_point(task) for task in tasks]
    return [row for chunk in chunks for row in chunk]


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


def rows_to_csv(rows: list[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for mu, rep, guess, metric, value, se in rows:
        w.writerow((repr(float(mu)), rep, guess, metric, _fmt(value), _fmt(se)))
    return buf.getvalue()


@dataclass(frozen=True)
class CurvePoint:
    mu: float
    mean: float
    std_error: float


def degraded_curves(rows: list[tuple]) -> dict[str, list[CurvePoint]]:
    """Mean degraded score per metric and noise level, with its standard error.

    The error combines spread across replicates with the per-row estimator
    error, so single-replicate Monte Carlo sweeps still get a band.
    """
    groups: dict[tuple[str, float], list[tuple[float, float]]] = {}
    for mu, _, guess, metric, value, se in rows:
        if guess == "degraded" and not math.isnan(value):
            groups.setdefault((metric, mu), []).append((value, se))
    curves: dict[str, list[CurvePoint]] = {}
    for (metric, mu), pts in groups.items():
        values = [v for v, _ in pts]
        mean = math.fsum(values) / len(values)
        spread = math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1) if len(values) > 1 else 0.0
        est = math.fsum(se * se for _, se in pts) / len(pts) ** 2
        curves.setdefault(metric, []).append(CurvePoint(mu, mean, math.sqrt(spread / len(values) + est)))
    for points in curves.values():
        points.sort(key=lambda p: p.mu)
    return curves


def monotonicity_violations(rows: list[tuple], z: float = 2.0) -> list[dict]:
    """Adjacent noise levels where the mean degraded score rises by more than ``z`` standard errors."""
    out = []
    for metric, points in sorted(degraded_curves(rows).items()):
        for a, b in zip(points, points[1:]):
            band = z * math.hypot(a.std_error, b.std_error)
            if b.mean > a.mean + band:
                out.append({"metric": metric, "from": a.mu, "to": b.mu, "rise": b.mean - a.mean, "band": band})
    return out


def warn_monotonicity(rows: list[tuple]) -> list[dict]:
    found = monotonicity_violations(rows)
    for v in found:
        log.warning("%s rises from mu=%g to mu=%g by %.4g (allowed %.4g)", v["metric"], v["from"], v["to"],
                    v["rise"], v["band"])
    return found
