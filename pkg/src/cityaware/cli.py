"""Command-line interface.

Exit status: 0 success, 2 unreadable or unparseable input, 3 data
validation failure, 4 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import DEFAULT_THRESHOLDS
from .errors import AwarenessError, ConfigError, ParseError, PeriodError, ValidationError
from .ingest import build_fetch_plan, load_catalog, load_records, serialize_fetch_plan, serialize_records
from .model import DEFAULT_TIERS, Period, validate_matrix
from .report import RunConfig, aggregate_period, group_records, run_pipeline
from .spatial import SpatialConfig
from .synth import SynthParams, generate_series

log = logging.getLogger("cityaware")

CATALOG_ENV = "CITYAWARE_CATALOG"

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_CONFIG = 4

# report sections written by each analysis subcommand
SUBCOMMAND_SECTIONS = {
    "run": ("indices", "deltas", "groups", "summary", "ranktail", "bands", "channel"),
    "compute": ("indices", "groups", "summary", "ranktail"),
    "diff": ("deltas",),
    "channel": ("channel",),
    "bands": ("bands",),
}


def _period(text: str) -> Period:
    try:
        return Period.parse(text)
    except PeriodError as exc:
        raise ConfigError(str(exc)) from None


def _pair(text: str) -> tuple[str, str]:
    left, sep, right = text.partition(":")
    if not sep or not left.strip() or not right.strip():
        raise ConfigError(f"channel pair {text!r} must look like CITY:CITY")
    return left.strip(), right.strip()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: config: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _add_catalog(p):
    p.add_argument("--catalog-path", default=os.environ.get(CATALOG_ENV),
                   help=f"city catalog CSV (default: ${CATALOG_ENV})")


def _add_analysis_args(p):
    _add_catalog(p)
    p.add_argument("--records-path", required=True)
    p.add_argument("--output-path", required=True, help="report directory")
    p.add_argument("--periods", nargs="+", required=True, metavar="PERIOD",
                   help="YYYY, YYYY-MM or YYYY-MM-DD:YYYY-MM-DD; deltas run first to last")
    p.add_argument("--convention", choices=("canonical", "paper_literal"), default="canonical")
    p.add_argument("--distance-source", choices=("great_circle", "chainage"), default="great_circle")
    p.add_argument("--hsr-speed-kmh", type=float, default=300.0)
    p.add_argument("--thresholds", nargs="+", type=float, default=list(DEFAULT_THRESHOLDS),
                   metavar="HOURS")
    p.add_argument("--channel-pairs", nargs="*", default=[], metavar="CITY:CITY")
    p.add_argument("--output-format", choices=("csv", "json"), default="csv")
    p.add_argument("--aggregation", choices=("median", "sum"), default="median",
                   help="combine monthly records by cellwise median (default) or sum")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cityaware", description="Asymmetric inter-city awareness indices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    helps = {
        "run": "full pipeline: every report section",
        "compute": "per-period indices, group means, dominance and rank-tail tables",
        "diff": "index deltas between the first and last period",
        "channel": "TS/TE channel-effect table",
        "bands": "travel-time band improvement curves",
    }
    for name, text in helps.items():
        _add_analysis_args(sub.add_parser(name, help=text))

    p = sub.add_parser("validate", help="check matrices for every period")
    _add_catalog(p)
    p.add_argument("--records-path", required=True)
    p.add_argument("--periods", nargs="+", required=True, metavar="PERIOD")
    p.add_argument("--aggregation", choices=("median", "sum"), default="median")

    p = sub.add_parser("fetch-plan", help="emit platform search URLs")
    _add_catalog(p)
    p.add_argument("--periods", nargs="+", required=True, metavar="PERIOD")
    p.add_argument("--monthly", action="store_true", help="expand each period into calendar months")
    p.add_argument("--pairs", nargs="*", metavar="TOPONYM:LOCATION")
    p.add_argument("--output-path", required=True, help="fetchplan.csv destination")

    p = sub.add_parser("synth", help="generate gravity-model records")
    _add_catalog(p)
    p.add_argument("--output-path", required=True, help="records.csv destination")
    p.add_argument("--start", default="2010-01", help="first month, YYYY-MM")
    p.add_argument("--months", type=int, default=48)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--mass-scale", type=float, default=1.0,
                   help="masses are population times this factor (1 when population is absent)")
    p.add_argument("--channel", metavar="CITY:CITY")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--channel-from", metavar="YYYY-MM")
    p.add_argument("--distance-source", choices=("great_circle", "chainage"), default="great_circle")
    return parser


def _require_catalog(args) -> Path:
    if not args.catalog_path:
        raise ConfigError(f"--catalog-path not given and ${CATALOG_ENV} unset")
    return Path(args.catalog_path)


def _run_analysis(args) -> int:
    cfg = RunConfig(
        catalog_path=_require_catalog(args),
        records_path=args.records_path,
        output_path=args.output_path,
        periods=tuple(_period(p) for p in args.periods),
        convention=args.convention,
        distance_source=args.distance_source,
        hsr_speed_kmh=args.hsr_speed_kmh,
        thresholds=tuple(args.thresholds),
        channel_pairs=tuple(_pair(p) for p in args.channel_pairs),
        output_format=args.output_format,
        aggregation=args.aggregation,
        sections=SUBCOMMAND_SECTIONS[args.command],
    )
    _, written = run_pipeline(cfg)
    for path in written:
        print(path)
    return EXIT_OK


def _run_validate(args) -> int:
    periods = [_period(p) for p in args.periods]
    catalog = load_catalog(_require_catalog(args))
    by_period = group_records(load_records(args.records_path, catalog))
    status = EXIT_OK
    for period in periods:
        m = aggregate_period(by_period, catalog, period, args.aggregation)
        diag = validate_matrix(m)
        if diag.ok:
            print(f"{period.label}: ok ({m.n} cities, {m.duplicate_count} duplicates)")
        else:
            status = EXIT_VALIDATION
            for v in diag.violations:
                print(f"{period.label}: {v}")
    return status


def _run_fetch_plan(args) -> int:
    catalog = load_catalog(_require_catalog(args))
    periods = [_period(p) for p in args.periods]
    if args.monthly:
        try:
            periods = [m for p in periods for m in p.months()]
        except PeriodError as exc:
            raise ConfigError(str(exc)) from None
    pairs = None
    if args.pairs:
        pairs = [tuple(catalog.resolve(x) for x in _pair(p)) for p in args.pairs]
    plan = build_fetch_plan(catalog, periods, pairs)
    Path(args.output_path).write_text(serialize_fetch_plan(plan), encoding="utf-8")
    print(f"{args.output_path}: {len(plan)} entries")
    return EXIT_OK


def _run_synth(args) -> int:
    catalog = load_catalog(_require_catalog(args)).filter(DEFAULT_TIERS)
    start = _period(args.start)
    if not start.is_month:
        raise ConfigError("--start must be a month, YYYY-MM")
    if args.months < 1:
        raise ConfigError("--months must be positive")
    y, m = start.start.year, start.start.month
    periods = []
    for _ in range(args.months):
        periods.append(Period.month(y, m))
        y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    masses = [(e.population or 1.0) * args.mass_scale for e in catalog]
    params = SynthParams(masses, beta=args.beta, k=args.k, alpha=args.alpha,
                         seed=args.seed, noise=args.noise)
    channel = None
    if args.channel:
        channel = tuple(catalog.resolve(x) for x in _pair(args.channel))
    records = generate_series(
        catalog, params, periods, SpatialConfig(distance_source=args.distance_source),
        channel=channel, gamma=args.gamma,
        channel_from=_period(args.channel_from) if args.channel_from else None,
    )
    Path(args.output_path).write_text(serialize_records(records), encoding="utf-8")
    print(f"{args.output_path}: {len(records)} records")
    return EXIT_OK


HANDLERS = {
    "validate": _run_validate,
    "fetch-plan": _run_fetch_plan,
    "synth": _run_synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = HANDLERS.get(args.command, _run_analysis)
    try:
        return handler(args)
    except ParseError as exc:
        print(f"error: parse: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: parse: cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidationError, PeriodError, AwarenessError) as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
