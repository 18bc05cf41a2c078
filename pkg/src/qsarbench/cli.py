"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal error.
Failures print one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .errors import (
    ConfigError,
    EmptyDatasetError,
    FeatureMismatchError,
    PackError,
    ParseError,
    SchemaError,
    UnmappedModelError,
)

ENV_OUT = "QSARBENCH_OUT"
ENV_JOBS = "QSARBENCH_JOBS"
DATA_ERRORS = (SchemaError, EmptyDatasetError, ParseError, PackError, FeatureMismatchError, UnmappedModelError)
PIPELINE = ("split", "featurize", "train", "evaluate", "sar-induce", "report")


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D401 - argparse hook
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qsarbench", description="Structure-separated CV benchmark for molecular property models.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="run config JSON, or builtin:toy")
        sp.add_argument("--seed", type=int, help="override the global seed")
        sp.add_argument("--out", help=f"override the run directory (env {ENV_OUT})")
        sp.add_argument("--jobs", type=int, help=f"worker processes (env {ENV_JOBS})")

    for name in PIPELINE[:-1]:
        common(sub.add_parser(name, help=f"run the {name} stage"))
    rep = sub.add_parser("report", help="aggregate metrics (and fixtures) into tables")
    common(rep, config_required=False)
    rep.add_argument("--fixtures", action="append", default=[], help="extra metrics-format CSV (repeatable)")
    rep.add_argument("--format", choices=("csv", "markdown"), default="csv")
    allp = sub.add_parser("run-all", help="split, featurize, train, evaluate, sar-induce, report")
    common(allp)
    allp.add_argument("--fixtures", action="append", default=[])
    allp.add_argument("--format", choices=("csv", "markdown"), default="csv")
    sc = sub.add_parser("selfcheck", help="run the built-in oracle checks")
    sc.add_argument("--quick", action="store_true", help="fewer random instances")
    return p


def resolve_fixture(name: str) -> Path:
    """Path on disk, else a bundled data file of that name (``paper_tables.csv``)."""
    from .report import PAPER_FIXTURE

    p = Path(name)
    if p.exists():
        return p
    if name in ("builtin:paper", PAPER_FIXTURE.name):
        return PAPER_FIXTURE
    raise SchemaError(f"fixture not found: {name}")


def resolve_config(args):
    from .harness import load_config

    cfg = load_config(args.config)
    out = args.out or os.environ.get(ENV_OUT)
    jobs = args.jobs if args.jobs is not None else os.environ.get(ENV_JOBS)
    changes = {}
    if out:
        changes["out"] = Path(out).resolve()
    if jobs is not None:
        try:
            changes["jobs"] = int(jobs)
        except ValueError:
            raise ConfigError(f"jobs must be an integer, got {jobs!r}") from None
        if changes["jobs"] < 1:
            raise ConfigError("jobs must be >= 1")
    if args.seed is not None:
        changes["seed"] = args.seed
    return replace(cfg, **changes)


def _fixture_only_report(args) -> None:
    """Aggregate fixture CSVs alone and print the winner table to stdout."""
    from .metrics import read_records
    from .report import PAPER_TASK_GROUPS, build_report
    from .report.tables import render, winner_rows

    if not args.fixtures:
        raise ConfigError("report needs --config or at least one --fixtures file")
    records = []
    for f in args.fixtures:
        records += read_records(resolve_fixture(f))
    out = Path(args.out or os.environ.get(ENV_OUT) or "qsarbench-report")
    rep = build_report(records, out, args.format, PAPER_TASK_GROUPS)
    h, rows = winner_rows(rep.winners)
    sys.stdout.write(render(h, rows, args.format, "Family winner counts per task group and metric", ()))
    for t in rep.ties:
        logging.getLogger("qsarbench").warning("%s", t.message())


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    if args.command == "selfcheck":
        from .selfcheck import run_selfcheck

        ok = run_selfcheck(quick=args.quick)
        return 0 if ok else 4
    if args.command == "report" and not args.config:
        _fixture_only_report(args)
        return 0

    from .harness import run_stage
    from .harness.run import sha256_file

    cfg = resolve_config(args)
    stages = PIPELINE if args.command == "run-all" else (args.command,)
    fmt = getattr(args, "format", "csv")
    fixtures = [resolve_fixture(f) for f in getattr(args, "fixtures", [])]
    summaries = []
    for s in stages:
        res = run_stage(cfg, s, fmt, fixtures)
        summaries.append(res.summary())
    out = {"out": str(cfg.out), "config_hash": cfg.config_hash(), "stages": summaries}
    metrics = cfg.out / "metrics.csv"
    if metrics.exists() and any(s in ("evaluate", "report") for s in stages):
        out["metrics_sha256"] = sha256_file(metrics)
    print(json.dumps(out, indent=2))
    return 0


def _error_payload(exc: BaseException, code: int) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code})


def main(argv=None) -> int:
    try:
        code = run(argv)
    except ConfigError as exc:
        code = 2
        print(_error_payload(exc, code), file=sys.stderr)
    except DATA_ERRORS as exc:
        code = 3
        print(_error_payload(exc, code), file=sys.stderr)
    except Exception as exc:  # anything else is a bug or an environment problem
        code = 4
        print(_error_payload(exc, code), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
