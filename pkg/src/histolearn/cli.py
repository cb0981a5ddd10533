"""Command-line interface.

One binary, eight subcommands: fingerprint, recover, learn, baseline, round,
extrapolate, eval, simulate.  Data goes to stdout or --out; diagnostics go
to stderr.  Exit codes: 0 success, 1 usage error, 2 computation error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager

from . import io as hio
from .baselines import good_turing
from .core import Config, HistolearnError, build_fingerprint, empirical_distribution
from .harness import DistributionSpec, run_experiment
from .label import learn_details
from .metrics import expected_distinct, l1_distance, min_relabel_truncated_l1
from .recover import recover_histogram
from .rounding import round_histogram

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--mode", choices=["paper", "practical"], default="practical")
    sub.add_argument("--B", type=float, default=0.08)
    sub.add_argument("--C", type=float, default=0.05)
    sub.add_argument("--kappa", type=int, default=None, help="override the LP fit cutoff")
    sub.add_argument("--grid", choices=["linear", "geometric"], default="geometric")
    sub.add_argument("--grid-ratio", type=float, default=1.1)
    sub.add_argument("--tau", type=float, default=None)
    sub.add_argument("--seed", type=int, default=0)


def _config_from(args: argparse.Namespace) -> Config:
    return Config(
        mode=args.mode,
        B=args.B,
        C=args.C,
        kappa_override=args.kappa,
        grid=args.grid,
        grid_ratio=args.grid_ratio,
        tau=args.tau,
        rng_seed=args.seed,
    )


@contextmanager
def _out_stream(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as handle:
            yield handle


def _build_parser() -> _Parser:
    parser = _Parser(prog="histolearn", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("fingerprint", help="count multiplicities of sample counts")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)

    p = subs.add_parser("recover", help="recover the unlabeled histogram from samples")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    _add_config_flags(p)

    p = subs.add_parser("learn", help="learn a labeled distribution from samples")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    _add_config_flags(p)

    p = subs.add_parser("baseline", help="reference estimators")
    p.add_argument("--method", choices=["empirical", "good-turing"], required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)

    p = subs.add_parser("round", help="round a histogram to integral multiplicities")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)

    p = subs.add_parser("extrapolate", help="expected distinct elements at a larger sample size")
    p.add_argument("--in", dest="infile", default=None, help="samples file (recovers first)")
    p.add_argument("--hist", default=None, help="histogram file (used as-is)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--force", action="store_true", help="allow k beyond n*ln(n)")
    p.add_argument("--out", default=None)
    _add_config_flags(p)

    p = subs.add_parser("eval", help="compare two labeled-distribution files")
    p.add_argument("--truth", required=True)
    p.add_argument("--est", required=True)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--out", default=None)

    p = subs.add_parser("simulate", help="seeded Monte-Carlo trials against a known truth")
    p.add_argument("--family", required=True,
                   choices=["uniform", "zipf", "two_level", "geometric", "dirac"])
    p.add_argument("--param", action="append", default=[], metavar="K=V",
                   help="family parameter, repeatable (e.g. --param m=1000)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--workers", type=int, default=None,
                   help="process count (default: HISTOLEARN_WORKERS or 1)")
    _add_config_flags(p)

    return parser


def _cmd_fingerprint(args) -> int:
    samples = hio.read_samples(args.infile)
    fp = build_fingerprint(samples)
    with _out_stream(args.out) as sink:
        hio.write_fingerprint(fp, sink)
    return EXIT_OK


def _cmd_recover(args) -> int:
    samples = hio.read_samples(args.infile)
    config = _config_from(args)
    result = recover_histogram(build_fingerprint(samples), config)
    with _out_stream(args.out) as sink:
        hio.write_histogram(result.histogram, sink)
    diagnostics = {
        "lp_objective": result.lp_objective,
        "kappa": result.thresholds.kappa,
        "kappa2": result.thresholds.kappa2,
        "grid_size": result.grid_size,
        "mode": config.mode,
    }
    payload = json.dumps(diagnostics, sort_keys=True, indent=2)
    if args.out:
        with open(args.out + ".json", "w", encoding="utf-8") as handle:
            handle.write(payload + "\n")
    else:
        print(payload, file=sys.stderr)
    return EXIT_OK


def _cmd_learn(args) -> int:
    samples = hio.read_samples(args.infile)
    config = _config_from(args)
    result = learn_details(samples, config)
    with _out_stream(args.out) as sink:
        hio.write_distribution(result.distribution, sink)
    if result.excess_mass > 0.0:
        print(f"assigned mass exceeds 1 by {result.excess_mass:.6g}", file=sys.stderr)
    return EXIT_OK


def _cmd_baseline(args) -> int:
    samples = hio.read_samples(args.infile)
    estimator = empirical_distribution if args.method == "empirical" else good_turing
    dist = estimator(samples)
    with _out_stream(args.out) as sink:
        hio.write_distribution(dist, sink)
    return EXIT_OK


def _cmd_round(args) -> int:
    histogram = hio.read_histogram(args.infile)
    rounded = round_histogram(histogram)
    with _out_stream(args.out) as sink:
        hio.write_histogram(rounded, sink)
    return EXIT_OK


def _cmd_extrapolate(args) -> int:
    if (args.infile is None) == (args.hist is None):
        raise HistolearnError("extrapolate needs exactly one of --in or --hist")
    if args.k < 1:
        raise HistolearnError("k must be a positive integer")
    if args.infile is not None:
        samples = hio.read_samples(args.infile)
        limit = samples.n * math.log(samples.n) if samples.n > 1 else 0.0
        if args.k > limit and not args.force:
            raise HistolearnError(
                f"k={args.k} exceeds n*ln(n)={limit:.0f}; extrapolation this far "
                "is not meaningful (pass --force to proceed anyway)"
            )
        config = _config_from(args)
        histogram = recover_histogram(build_fingerprint(samples), config).histogram
    else:
        histogram = hio.read_histogram(args.hist)
    value = expected_distinct(histogram, args.k)
    with _out_stream(args.out) as sink:
        sink.write(f"expected_distinct\t{format(value, '.17g')}\n")
    return EXIT_OK


def _cmd_eval(args) -> int:
    truth = hio.read_distribution(args.truth)
    est = hio.read_distribution(args.est)
    payload = {
        "l1": l1_distance(truth, est),
        "min_relabel_l1": min_relabel_truncated_l1(truth, est, args.tau),
    }
    with _out_stream(args.out) as sink:
        sink.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _parse_params(pairs: list[str]) -> dict[str, float]:
    params: dict[str, float] = {}
    for pair in pairs:
        if "=" not in pair:
            raise HistolearnError(f"bad --param {pair!r}; expected K=V")
        key, value = pair.split("=", 1)
        params[key.strip()] = float(value)
    return params


def _cmd_simulate(args) -> int:
    spec = DistributionSpec(args.family, _parse_params(args.param))
    config = _config_from(args)
    rows = run_experiment(
        [(spec, args.n, args.trials)], config, args.out_dir, workers=args.workers
    )
    for row in rows:
        print(
            f"{row['family']}({row['params']}) n={row['n']} {row['estimator']}: "
            f"mean_l1={row['mean_l1']:.4f} se={row['se_l1']:.4f} "
            f"({row['trials']} trials)",
            file=sys.stderr,
        )
    print(f"reports written to {args.out_dir}", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "fingerprint": _cmd_fingerprint,
    "recover": _cmd_recover,
    "learn": _cmd_learn,
    "baseline": _cmd_baseline,
    "round": _cmd_round,
    "extrapolate": _cmd_extrapolate,
    "eval": _cmd_eval,
    "simulate": _cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except HistolearnError as exc:
        print(f"histolearn: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"histolearn: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
