"""Command-line interface.

Subcommands: ``simulate``, ``oracle``, ``witness``, ``estimate``,
``benchmark``.  All randomness flows from ``--seed`` through named
substreams, so identical configs produce byte-identical outputs
regardless of worker count.

Exit codes: 0 success, 2 config/usage error, 3 data error,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from ._rng import derive_seed, substream
from .bounds import harm_bounds, plugin_bounds
from .data import DataError, ObservationTable
from .inference import (BenchmarkConfig, NumericalError, S1SConfig,
                        _parse_estimator, coverage_benchmark, one_step,
                        one_step_gelu, s1s, uncertainty_region)
from .nuisance import Basis, FitError, TierPartition, fit_outcome, fit_propensity, NuisancePair
from .simulation import (InfeasibleMarginsError, ScmParams,
                         nonidentifiability_witness, oracle_truth, simulate)

PROFILES = {
    "desk": {"n": 1500, "l": 600, "reps": 60},
    "paper": {"n": 5000, "l": 2000, "reps": 200},
}


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


def _terms(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _dump_json(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is None or path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tierbounds",
        description="Bounds and inference for probabilities of tiered benefit/harm.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--config", help="JSON file with default option values")
    common.add_argument("-o", "--output", default=None)

    p = sub.add_parser("simulate", parents=[common],
                       help="draw synthetic data to CSV")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--with-oracle", action="store_true",
                   help="append potential-outcome columns y0,y1")

    p = sub.add_parser("oracle", parents=[common],
                       help="ground-truth benefit probability and bounds")
    p.add_argument("--thresholds", type=_floats, default=(-1.42, 1.09))
    p.add_argument("--mc", type=_positive_int, default=10**6)
    p.add_argument("--method", choices=["mc", "quadrature"], default="mc")

    p = sub.add_parser("witness", parents=[common],
                       help="non-identifiability witness matrices")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--margins0", type=_floats, required=True)
    p.add_argument("--margins1", type=_floats, required=True)

    p = sub.add_parser("estimate", parents=[common],
                       help="estimate bounds from a CSV dataset")
    p.add_argument("input", help="CSV with columns w1,...,x,a,y")
    p.add_argument("--thresholds", type=_floats, required=True)
    p.add_argument("--estimators", type=_terms, default=("plug-in",),
                   help="comma list from plug-in,1s,1s-gelu:H,s1s")
    p.add_argument("--split", type=float, default=None,
                   help="train fraction for held-out 1S evaluation")
    p.add_argument("--l", type=int, default=None, help="initial batch size for s1s")
    p.add_argument("--H", dest="mc_draws", type=_positive_int, default=10**5,
                   help="Monte Carlo draws for uncertainty regions")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--link", choices=["logit", "probit"], default="logit")
    p.add_argument("--basis-outcome", type=_terms, default=None)
    p.add_argument("--basis-propensity", type=_terms, default=None)
    p.add_argument("--clip", type=float, default=0.01)
    p.add_argument("--ridge", type=float, default=0.0)
    p.add_argument("--harm", action="store_true",
                   help="also report plug-in tiered-harm bounds")

    p = sub.add_parser("benchmark", parents=[common],
                       help="replicated coverage study")
    p.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    p.add_argument("--estimators", type=_terms, default=("all",))
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--l", type=_positive_int, default=None)
    p.add_argument("--reps", type=_positive_int, default=None)
    p.add_argument("--split", type=float, default=0.5)
    p.add_argument("--link", choices=["logit", "probit"], default="logit")
    p.add_argument("--clip", type=float, default=0.01)
    p.add_argument("--ridge", type=float, default=0.0)
    p.add_argument("--workers", type=_positive_int, default=1)
    return parser


def _apply_config_file(args: argparse.Namespace) -> None:
    """Values from --config fill options still at None; flags win."""
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        overrides = json.load(fh)
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ValueError(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def _resolved(args: argparse.Namespace) -> dict:
    skip = {"config", "output", "func"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        if isinstance(v, tuple):
            v = list(v)
        out[k] = v
    out["version"] = __version__
    return out


def cmd_simulate(args) -> int:
    table, oracle = simulate(args.n, args.seed)
    table.to_csv(args.output or "/dev/stdout",
                 oracle=oracle if args.with_oracle else None)
    return 0


def cmd_oracle(args) -> int:
    partition = TierPartition(args.thresholds)
    report = {"config": _resolved(args), "strata": {}}
    for s in (0, 1):
        res = oracle_truth(s, partition, mc_samples=args.mc, seed=args.seed,
                           method=args.method)
        report["strata"][str(s)] = res.to_json()
    _dump_json(report, args.output)
    return 0


def cmd_witness(args) -> int:
    lo, hi, unique = nonidentifiability_witness(args.k, args.margins0, args.margins1)
    report = {
        "K": args.k,
        "margins0": list(args.margins0),
        "margins1": list(args.margins1),
        "Q_a": lo.q.tolist(), "Q_b": hi.q.tolist(),
        "pb_a": lo.pb, "pb_b": hi.pb,
        "unique_solution": unique,
        "config": _resolved(args),
    }
    _dump_json(report, args.output)
    return 0


def cmd_estimate(args) -> int:
    table = ObservationTable.from_csv(args.input)
    partition = TierPartition(args.thresholds)
    clip = (args.clip, 1.0 - args.clip)
    prop_basis = Basis(args.basis_propensity) if args.basis_propensity else None
    out_basis = Basis(args.basis_outcome) if args.basis_outcome else None
    names = [(_parse_estimator(e), e) for e in args.estimators]
    if not any(base == "plug-in" for (base, _), _ in names):
        names.insert(0, (("plug-in", None), "plug-in"))
    needs_split = any(base in ("1s", "1s-gelu") for (base, _), _ in names)
    if needs_split and args.split is None:
        raise ValueError("--split is required for held-out one-step estimators")
    needs_s1s = any(base == "s1s" for (base, _), _ in names)
    if needs_s1s and args.l is None:
        raise ValueError("--l (initial batch size) is required for s1s")

    strata = [int(s) for s in table.strata]
    report = {"config": _resolved(args), "estimates": {}, }

    def fit_on(subset: ObservationTable) -> NuisancePair:
        return NuisancePair(
            propensity=fit_propensity(subset, link=args.link, basis=prop_basis,
                                      clip=clip),
            outcome=fit_outcome(subset, basis=out_basis))

    full = fit_on(table)
    split_pair = None
    if needs_split:
        order = substream(args.seed, "split").permutation(table.n)
        cut = int(round(args.split * table.n))
        split_pair = (fit_on(table.take(order[:cut])), table.take(order[cut:]))

    for (base, h), name in names:
        per = {}
        for s in strata:
            if base == "plug-in":
                est = plugin_bounds(full, table, s, partition)
            elif base == "1s":
                est = one_step(split_pair[0], split_pair[1], s, partition)
            elif base == "1s-gelu":
                est = one_step_gelu(split_pair[0], split_pair[1], s, partition, h)
            else:
                cfg = S1SConfig(seed=derive_seed(args.seed, "s1s"), link=args.link,
                                clip=clip, ridge=args.ridge,
                                **({"propensity_basis": prop_basis} if prop_basis else {}),
                                **({"outcome_basis": out_basis} if out_basis else {}))
                est = s1s(table, partition, args.l, cfg)[s]
            rec = est.to_json()
            if est.covariance is not None:
                region = uncertainty_region(
                    est, level=args.level, mc_draws=args.mc_draws,
                    seed=derive_seed(args.seed, "region", name, s))
                rec["region"] = region.to_json()
            per[str(s)] = rec
        report["estimates"][name] = per

    if args.harm:
        report["harm"] = {
            str(s): harm_bounds(full, table, s, partition).to_json()
            for s in strata}
    if full.outcome.degenerate:
        report["flags"] = ["degenerate_sigma"]
    _dump_json(report, args.output)
    return 0


def cmd_benchmark(args) -> int:
    prof = PROFILES[args.profile]
    estimators = args.estimators
    if estimators == ("all",):
        estimators = ("plug-in", "1s", "1s-gelu:0.05", "1s-gelu:0.15", "s1s")
    cfg = BenchmarkConfig(
        estimators=tuple(estimators),
        reps=args.reps or prof["reps"],
        n=args.n or prof["n"],
        l=args.l or prof["l"],
        seed=args.seed,
        split=args.split,
        link=args.link,
        clip=(args.clip, 1.0 - args.clip),
        ridge=args.ridge,
        workers=args.workers,
    )
    report = coverage_benchmark(cfg)
    rows = report["rows"]
    header = ["estimator", "stratum", "cov_lower_pct", "cov_upper_pct",
              "cov_joint_pct", "mse_lower", "mse_upper", "reps", "n", "l", "seed"]
    if args.output:
        csv_path = args.output + ".csv"
        json_path = args.output + ".json"
    else:
        csv_path = json_path = None
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(row[h]) if isinstance(row[h], float) else str(row[h])
                              for h in header))
    csv_text = "\n".join(lines) + "\n"
    if csv_path:
        with open(csv_path, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    summary = {"config": _resolved(args), "rows": rows, "flags": report["flags"],
               "truth": {str(k): v for k, v in report["truth"].items()}}
    _dump_json(summary, json_path)
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
    "witness": cmd_witness,
    "estimate": cmd_estimate,
    "benchmark": cmd_benchmark,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        return COMMANDS[args.command](args)
    except (ValueError, InfeasibleMarginsError) as exc:
        if isinstance(exc, (DataError, FitError)):
            print(f"data error: {exc}", file=sys.stderr)
            return 3
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
