"""NMI and its chance-corrected successors: rNMI, rrNMI, cNMI and AMI.

Every adjusted score follows ``(value - chance) / (ceiling - chance)`` in some
form. Chance terms come from :mod:`partmetrics.expectations`, whose results
are cached per ``(C, T, spec)``, so composite metrics reuse one estimate and
algebraic identities between them hold to rounding error even under Monte
Carlo.

Orientation convention: the first argument is the candidate clustering, the
second the reference (ground truth).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .expectations import (
    BOUNDS,
    ExpectationEstimate,
    RandomModelSpec,
    _bound,
    expected_mi,
    expected_nmi,
)
from .infotheory import entropy, mi
from .partition import Partition, PartitionError

KINDS = ("nmi", "rnmi", "rrnmi", "cnmi", "ami")
_EPS = 1e-12

PERM_ONE_SIDED = RandomModelSpec("perm", "one", "exact")
PERM_TWO_SIDED = RandomModelSpec("perm", "two", "exact")


@dataclass(frozen=True)
class MetricConfig:
    kind: str = "ami"
    spec: RandomModelSpec = RandomModelSpec("all", "one", "exact")
    p: float = 0.0
    bound: str = "log-n"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown metric {self.kind!r}; expected one of {KINDS}")
        if self.bound not in BOUNDS:
            raise ValueError(f"unknown bound {self.bound!r}; expected one of {BOUNDS}")
        if self.bound == "self-truth" and self.kind == "ami" and self.spec.sided != "one":
            raise ValueError("the self-truth bound needs a one-sided configuration")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "model": self.spec.model,
            "sided": self.spec.sided,
            "estimator": self.spec.estimator,
            "samples": self.spec.samples if self.spec.estimator == "mc" else None,
            "seed": self.spec.seed if self.spec.estimator == "mc" else None,
            "p": _p_repr(self.p),
            "bound": self.bound,
        }


def _p_repr(p: float):
    if math.isinf(p):
        return "max" if p > 0 else "min"
    return p


@dataclass(frozen=True)
class MetricResult:
    """A score plus its provenance.

    ``score`` is NaN when the metric is undefined for the input (flag
    ``undefined``). ``uncertainty`` is the ``(low, high)`` range obtained by
    re-evaluating with every Monte Carlo expectation moved by two standard
    errors; it is ``None`` for exact estimators.
    """

    score: float
    config: MetricConfig
    uncertainty: tuple[float, float] | None = None
    flags: tuple[str, ...] = field(default=())

    @property
    def defined(self) -> bool:
        return not math.isnan(self.score)

    @property
    def std_error(self) -> float:
        if self.uncertainty is None:
            return 0.0
        return (self.uncertainty[1] - self.uncertainty[0]) / 4

    def to_dict(self) -> dict:
        return {
            "metric": self.config.kind,
            "score": self.score if self.defined else None,
            "uncertainty": list(self.uncertainty) if self.uncertainty else None,
            "config": self.config.to_dict(),
            "flags": list(self.flags),
        }


def _check(c: Partition, t: Partition):
    if c.n != t.n:
        raise PartitionError(f"size mismatch: {c.n} vs {t.n} elements")


def normalized(c: Partition, t: Partition, p: float = 0.0, bound: str = "generalized-mean") -> float:
    """NMI with ``t`` as the reference; 0 when the normalizer vanishes."""
    norm = _bound(entropy(c), entropy(t), c.n, p, bound)
    return mi(c, t) / norm if norm > 0 else 0.0


def _degenerate(c: Partition, t: Partition, p: float, bound: str) -> bool:
    return _bound(entropy(c), entropy(t), c.n, p, bound) == 0


def _evaluate(fn: Callable[[Sequence[float]], float], estimates: Sequence[ExpectationEstimate]):
    score = fn([e.mean for e in estimates])
    if not any(e.estimator == "mc" for e in estimates):
        return score, None
    values = [score]
    for sign in (-1.0, 1.0):
        values.append(fn([e.mean + sign * 2 * e.std_error for e in estimates]))
    values = [v for v in values if not math.isnan(v)]
    return score, (min(values), max(values))


def _ratio(num: float, den: float) -> float:
    return num / den if den > _EPS else math.nan


def _one_sided(spec: RandomModelSpec) -> RandomModelSpec:
    if spec.sided == "one" and not spec.verify:
        return spec
    return RandomModelSpec(spec.model, "one", spec.estimator, spec.samples, spec.seed, workers=spec.workers)


def _flags(c, t, p, bound, score, extra=()):
    flags = list(extra)
    if _degenerate(c, t, p, bound):
        flags.append("degenerate")
    if c.n == 1:
        flags.append("single-element")
    if math.isnan(score):
        flags.append("undefined")
    return tuple(flags)


def nmi_metric(c: Partition, t: Partition, p: float = 0.0, bound: str = "generalized-mean") -> MetricResult:
    _check(c, t)
    score = normalized(c, t, p, bound)
    config = MetricConfig("nmi", PERM_ONE_SIDED, p, bound)
    return MetricResult(score, config, None, _flags(c, t, p, bound, score))


def rnmi(c: Partition, t: Partition, spec: RandomModelSpec = PERM_ONE_SIDED, p: float = 0.0,
         bound: str = "generalized-mean") -> MetricResult:
    """``NMI(C, T) - E[NMI(C', T)]`` with C' drawn around C and T fixed."""
    _check(c, t)
    spec = _one_sided(spec)
    value = normalized(c, t, p, bound)
    e = expected_nmi(c, t, spec, p, bound)
    score, band = _evaluate(lambda m: value - m[0], [e])
    return MetricResult(score, MetricConfig("rnmi", spec, p, bound), band, _flags(c, t, p, bound, score))


def rrnmi(c: Partition, t: Partition, spec: RandomModelSpec = PERM_ONE_SIDED, p: float = 0.0,
          bound: str = "generalized-mean") -> MetricResult:
    """rNMI rescaled by the rNMI of a perfect candidate.

    The ceiling ``NMI(T, T) - E[NMI(C', T)]`` reuses the chance term of the
    numerator: the truth is fixed, so the problem has one chance level.
    Undefined when that ceiling is not positive.
    """
    _check(c, t)
    spec = _one_sided(spec)
    value = normalized(c, t, p, bound)
    top = normalized(t, t, p, bound) if bound != "generalized-mean" else (1.0 if entropy(t) > 0 else 0.0)
    e = expected_nmi(c, t, spec, p, bound)
    score, band = _evaluate(lambda m: _ratio(value - m[0], top - m[0]), [e])
    return MetricResult(score, MetricConfig("rrnmi", spec, p, bound), band, _flags(c, t, p, bound, score))


@dataclass(frozen=True)
class CnmiParts:
    """The two one-sided fractions whose mediant is cNMI.

    ``forward = (NMI(C,T) - E_C'[NMI(C',T)]) / (NMI(T,T) - E_T'[NMI(T',T)])``
    and ``backward`` is the same with the roles of C and T exchanged.
    """

    forward_num: float
    forward_den: float
    backward_num: float
    backward_den: float

    @property
    def forward(self) -> float:
        return _ratio(self.forward_num, self.forward_den)

    @property
    def backward(self) -> float:
        return _ratio(self.backward_num, self.backward_den)

    @property
    def mediant(self) -> float:
        return _ratio(self.forward_num + self.backward_num, self.forward_den + self.backward_den)


def _cnmi_estimates(c, t, spec, p, bound):
    one = _one_sided(spec)
    return [
        expected_nmi(c, t, one, p, bound),
        expected_nmi(t, c, one, p, bound),
        expected_nmi(c, c, one, p, bound),
        expected_nmi(t, t, one, p, bound),
    ]


def cnmi_parts(c: Partition, t: Partition, spec: RandomModelSpec = PERM_TWO_SIDED, p: float = 0.0,
               bound: str = "generalized-mean", means: Sequence[float] | None = None) -> CnmiParts:
    _check(c, t)
    if means is None:
        means = [e.mean for e in _cnmi_estimates(c, t, spec, p, bound)]
    e_ct, e_tc, e_cc, e_tt = means
    return CnmiParts(
        normalized(c, t, p, bound) - e_ct,
        normalized(t, t, p, bound) - e_tt,
        normalized(t, c, p, bound) - e_tc,
        normalized(c, c, p, bound) - e_cc,
    )


def cnmi(c: Partition, t: Partition, spec: RandomModelSpec = PERM_TWO_SIDED, p: float = 0.0,
         bound: str = "generalized-mean") -> MetricResult:
    """``(rNMI(C,T) + rNMI(T,C)) / (rNMI(C,C) + rNMI(T,T))``.

    Each rNMI term randomizes its first argument around itself. With a
    one-sided spec the truth stays fixed throughout: the reverse orientation
    is scored against the same truth and chance level, so both fractions of
    the mediant reduce to rrNMI(C, T). Undefined unless the denominator is
    positive.
    """
    _check(c, t)
    if spec.sided == "one":
        value = normalized(c, t, p, bound)
        top = normalized(t, t, p, bound) if bound != "generalized-mean" else (1.0 if entropy(t) > 0 else 0.0)
        e = expected_nmi(c, t, spec, p, bound)

        def fn(m):
            return _ratio((value - m[0]) + (value - m[0]), (top - m[0]) + (top - m[0]))

        score, band = _evaluate(fn, [e])
    else:
        estimates = _cnmi_estimates(c, t, spec, p, bound)
        score, band = _evaluate(lambda m: cnmi_parts(c, t, spec, p, bound, m).mediant, estimates)
    return MetricResult(score, MetricConfig("cnmi", spec, p, bound), band, _flags(c, t, p, bound, score))


def ami(c: Partition, t: Partition, config: MetricConfig = MetricConfig()) -> MetricResult:
    """``(I - B) / (M - B)`` with baseline ``B`` from the config's random model.

    ``M`` is the generalized mean of the two entropies, ``log N``, or the
    truth's own entropy ``I(T, T)`` (self-truth). Undefined when ``M <= B``.
    """
    _check(c, t)
    if config.kind != "ami":
        config = MetricConfig("ami", config.spec, config.p, config.bound)
    value = mi(c, t)
    ceiling = _bound(entropy(c), entropy(t), c.n, config.p, config.bound) if c.n > 1 else 0.0
    b = expected_mi(c, t, config.spec)
    score, band = _evaluate(lambda m: _ratio(value - m[0], ceiling - m[0]), [b])
    extra = ("log-n-bound-outside-all",) if config.bound == "log-n" and config.spec.model != "all" else ()
    return MetricResult(score, config, band, _flags(c, t, config.p, config.bound, score, extra))


def ami_all_one_sided(c: Partition, t: Partition, estimator: str = "exact", samples: int = 10_000, seed: int = 0,
                      bound: str = "log-n", workers: int = 1) -> MetricResult:
    """One-sided AMI over all partitions of N: ``(I - E[I(C',T)]) / (log N - E[I(C',T)])``."""
    spec = RandomModelSpec("all", "one", estimator, samples, seed, workers=workers)
    return ami(c, t, MetricConfig("ami", spec, 0.0, bound))


def score(c: Partition, t: Partition, config: MetricConfig) -> MetricResult:
    """Evaluate any metric kind from a config."""
    if config.kind == "nmi":
        return nmi_metric(c, t, config.p, config.bound)
    if config.kind == "rnmi":
        return rnmi(c, t, config.spec, config.p, config.bound)
    if config.kind == "rrnmi":
        return rrnmi(c, t, config.spec, config.p, config.bound)
    if config.kind == "cnmi":
        return cnmi(c, t, config.spec, config.p, config.bound)
    return ami(c, t, config)
