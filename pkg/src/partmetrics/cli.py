"""Command-line interface: ``partmetrics {score,expect,verify,trap}``.

Results go to standard output; logs and warnings go to standard error.
Exit codes: 0 ok, 1 verification failure, 2 usage or parse error, 3 size
mismatch, 4 undefined metric, 5 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from contextlib import contextmanager
from typing import Sequence

from .combinatorics import EnsembleTooLarge
from .expectations import BOUNDS, ESTIMATORS, RandomModelSpec, default_workers, expected_mi
from .infotheory import parse_mean, to_bits
from .metrics import KINDS, MetricConfig, MetricResult, score
from .partition import FORMATS, ParseError, Partition, PartitionError, Shape, read_partition
from .sweep import DEFAULT_METRICS, SWEEP_METRICS, SweepConfig, rows_to_csv, run_trap, warn_monotonicity
from .theorems import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_MISMATCH, EXIT_UNDEFINED, EXIT_CAP = range(6)

log = logging.getLogger("partmetrics")


class UsageError(Exception):
    pass


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _mean(text: str) -> float:
    try:
        return parse_mean(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common(parser: argparse.ArgumentParser, formats: bool = True) -> None:
    parser.add_argument("--threads", type=int, help="worker processes (env PARTMETRICS_THREADS, default 1)")
    parser.add_argument("--enum-cap", type=int, help="largest N to enumerate (env PARTMETRICS_ENUM_CAP, default 12)")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    if formats:
        out = parser.add_mutually_exclusive_group()
        out.add_argument("--json", dest="output", action="store_const", const="json", help="JSON output")
        out.add_argument("--csv", dest="output", action="store_const", const="csv", help="CSV output")
        parser.set_defaults(output="table")


def _model_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=("all", "num", "perm"), default="all")
    parser.add_argument("--sided", choices=("one", "two"), default="one")
    parser.add_argument("--estimator", default="exact", help=f"one of {', '.join(ESTIMATORS)} (exact-perm accepted)")
    parser.add_argument("--samples", type=int, default=10_000, help="Monte Carlo sample count")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="partmetrics", description="Information-theoretic partition similarity.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score a candidate partition against a reference")
    p.add_argument("candidate")
    p.add_argument("truth")
    p.add_argument("--metric", action="append", choices=KINDS + ("every",),
                   help="metric to report; repeatable (default: nmi and ami)")
    _model_args(p)
    p.add_argument("--mean", type=_mean, default=0.0, help="generalized mean exponent or name (default geometric)")
    p.add_argument("--bound", choices=BOUNDS, help="normalizer; defaults to log-n for AMI under all")
    p.add_argument("--format", choices=("auto",) + FORMATS, default="auto", help="partition file format")
    _common(p)

    p = sub.add_parser("expect", help="expected mutual information under a random model, as JSON")
    p.add_argument("truth")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--guess", help="partition file defining the randomized side")
    g.add_argument("--shape", type=_int_list, help="block sizes of the randomized side (perm)")
    g.add_argument("--k", type=int, help="block count of the randomized side (num)")
    _model_args(p)
    p.add_argument("--bits", action="store_true", help="report in bits instead of nats")
    p.add_argument("--format", choices=("auto",) + FORMATS, default="auto")
    _common(p, formats=False)

    p = sub.add_parser("verify", help="run the relationship checks")
    p.add_argument("suites", nargs="*", help="suite names (see --list)")
    p.add_argument("--all", action="store_true", help="run every suite")
    p.add_argument("--list", action="store_true", help="list suites and exit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, help="trials per check (suite default otherwise)")
    _common(p)

    p = sub.add_parser("trap", help="label-noise sweep of a planted truth")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--k", type=int, default=10, help="equal blocks in the planted truth")
    p.add_argument("--truth", help="partition file to use as the truth instead")
    p.add_argument("--mus", type=_float_list, default=None, help="noise grid, e.g. 0,0.1,0.2 (default 0..1 by 0.1)")
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--metrics", type=lambda s: tuple(x for x in s.split(",") if x),
                   default=DEFAULT_METRICS, help=f"comma list from {', '.join(SWEEP_METRICS)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--estimator", default="exact", help="estimator for the all-partitions model")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--output-file", "-o", help="write to a file instead of standard output")
    _common(p)
    return parser


def _workers(args) -> int:
    return max(1, args.threads) if args.threads is not None else default_workers()


@contextmanager
def _env_overrides(args):
    # flags beat the environment; worker processes inherit the override
    saved = os.environ.get("PARTMETRICS_ENUM_CAP")
    if args.enum_cap is not None:
        os.environ["PARTMETRICS_ENUM_CAP"] = str(args.enum_cap)
    try:
        yield
    finally:
        if saved is None:
            os.environ.pop("PARTMETRICS_ENUM_CAP", None)
        else:
            os.environ["PARTMETRICS_ENUM_CAP"] = saved


def _spec(args) -> RandomModelSpec:
    return RandomModelSpec(args.model, args.sided, args.estimator, args.samples, args.seed, workers=_workers(args))


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "undefined"
    return f"{x:.6f}"


def _emit(text: str, path: str | None = None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_score(args) -> int:
    c, t = read_partition(args.candidate, args.format), read_partition(args.truth, args.format)
    if c.n != t.n:
        raise PartitionError(f"size mismatch: candidate has {c.n} elements, truth has {t.n}")
    kinds = args.metric or ["nmi", "ami"]
    if "every" in kinds:
        kinds = list(KINDS)
    spec = _spec(args)
    results: list[MetricResult] = []
    for kind in dict.fromkeys(kinds):
        bound = args.bound or ("log-n" if kind == "ami" and args.model == "all" else "generalized-mean")
        results.append(score(c, t, MetricConfig(kind, spec, args.mean, bound)))

    if args.output == "json":
        _emit(json.dumps([r.to_dict() for r in results], indent=2) + "\n")
    elif args.output == "csv":
        lines = ["metric,score,low,high,model,sided,estimator,bound,p,flags"]
        for r in results:
            cfg = r.config.to_dict()
            lo, hi = r.uncertainty or ("", "")
            lines.append(",".join(str(v) for v in (
                r.config.kind, "nan" if not r.defined else repr(r.score), lo, hi, cfg["model"], cfg["sided"],
                cfg["estimator"], cfg["bound"], cfg["p"], ";".join(r.flags))))
        _emit("\n".join(lines) + "\n")
    else:
        lines = [f"{'metric':<7} {'score':>10}  {'band':<23} {'model':<5} {'sided':<5} {'bound':<16} flags"]
        for r in results:
            band = f"[{r.uncertainty[0]:.6f}, {r.uncertainty[1]:.6f}]" if r.uncertainty else "-"
            model = r.config.spec.model if r.config.kind != "nmi" else "-"
            sided = r.config.spec.sided if r.config.kind != "nmi" else "-"
            lines.append(f"{r.config.kind:<7} {_fmt(r.score):>10}  {band:<23} {model:<5} {sided:<5} "
                         f"{r.config.bound:<16} {','.join(r.flags) or '-'}")
        _emit("\n".join(lines) + "\n")
    for r in results:
        if not r.defined:
            log.error("%s is undefined for this pair (non-positive denominator)", r.config.kind)
    return EXIT_OK if all(r.defined for r in results) else EXIT_UNDEFINED


def _randomized_side(args, t: Partition) -> Partition:
    if args.guess:
        return read_partition(args.guess, args.format)
    if args.shape:
        return Shape(args.shape).representative()
    if args.k is not None:
        if not 1 <= args.k <= t.n:
            raise UsageError(f"--k must lie in [1, {t.n}]")
        return Partition([i * args.k // t.n for i in range(t.n)])
    return t


def cmd_expect(args) -> int:
    t = read_partition(args.truth, args.format)
    c = _randomized_side(args, t)
    if c.n != t.n:
        raise PartitionError(f"size mismatch: randomized side has {c.n} elements, truth has {t.n}")
    est = expected_mi(c, t, _spec(args))
    if args.bits:
        est = est.scaled(to_bits(1.0))
    out = est.to_dict()
    out["units"] = "bits" if args.bits else "nats"
    _emit(json.dumps(out) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.list:
        _emit("".join(f"{name}\n" for name in SUITES))
        return EXIT_OK
    names = list(SUITES) if args.all else args.suites
    if not names:
        raise UsageError("name at least one suite, or pass --all")
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s): {', '.join(unknown)}; see --list")
    reports = []
    for name in names:
        log.info("running %s", name)
        reports.extend(run_suite(name, args.seed, args.trials))
    failed = [r for r in reports if not r.passed]

    if args.output == "json":
        _emit(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    elif args.output == "csv":
        lines = ["theorem,passed,instances,max_deviation,tolerance,skipped"]
        lines += [f"{r.theorem_id},{str(r.passed).lower()},{r.instances},{r.max_deviation!r},{r.tolerance!r},"
                  f"{r.skipped}" for r in reports]
        _emit("\n".join(lines) + "\n")
    else:
        lines = []
        for r in reports:
            lines.append(r.summary())
            for w in r.witnesses[:3]:
                lines.append(f"    witness: {json.dumps(w)}")
        lines.append(f"{len(reports) - len(failed)}/{len(reports)} checks passed")
        _emit("\n".join(lines) + "\n")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_trap(args) -> int:
    truth = read_partition(args.truth) if args.truth else None
    mus = args.mus if args.mus is not None else SweepConfig().mus
    if truth is not None and truth.k < 2 and any(mu > 0 for mu in mus):
        raise UsageError("a single-block truth cannot be degraded; use a truth with at least two blocks")
    cfg = SweepConfig(n=truth.n if truth else args.n, k=truth.k if truth else args.k, truth=truth, mus=mus,
                      replicates=args.replicates, metrics=args.metrics, seed=args.seed,
                      estimator=args.estimator, samples=args.samples, workers=_workers(args))
    if truth is None and cfg.k < 2 and any(mu > 0 for mu in mus):
        raise UsageError("noise needs a truth with at least two blocks")
    rows = run_trap(cfg)
    warn_monotonicity(rows)

    if args.output == "csv":
        text = rows_to_csv(rows)
    elif args.output == "json":
        keys = ("mu", "replicate", "guess", "metric", "score", "stderr")
        text = json.dumps([{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in zip(keys, row)}
                           for row in rows], indent=2) + "\n"
    else:
        lines = [f"{'mu':>5} {'rep':>4} {'guess':<11} {'metric':<13} {'score':>10} {'stderr':>10}"]
        lines += [f"{mu:>5.2f} {rep:>4} {guess:<11} {metric:<13} {_fmt(value):>10} {se:>10.6f}"
                  for mu, rep, guess, metric, value, se in rows]
        text = "\n".join(lines) + "\n"
    _emit(text, args.output_file)
    return EXIT_OK


COMMANDS = {"score": cmd_score, "expect": cmd_expect, "verify": cmd_verify, "trap": cmd_trap}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s: %(message)s")
    try:
        with _env_overrides(args):
            return COMMANDS[args.command](args)
    except ParseError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except PartitionError as exc:
        log.error("%s", exc)
        return EXIT_MISMATCH
    except EnsembleTooLarge as exc:
        log.error("%s", exc)
        return EXIT_CAP
    except (UsageError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
