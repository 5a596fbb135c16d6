"""Command-line entry point.

    tdss check SPEC...
    tdss test --spec S --features DIR --bindings B [--backlog J] --out DIR
    tdss pipeline --config CONFIG.json
    tdss sync --in report.json --endpoint URL [--token-env NAME] [--dry-run]
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from tdss.frontends import ParseError, parse_spec
from tdss.model import ScenarioSpec, Severity, validate_spec
from tdss.pipeline import ConfigError, ExitStatus, PipelineConfig, run_pipeline
from tdss.sync import sync


def _cmd_check(args) -> int:
    spec = ScenarioSpec()
    try:
        for path in args.spec:
            spec = spec.merged(parse_spec(Path(path).read_text(encoding="utf-8"), path))
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ExitStatus.INPUT_ERROR
    except OSError as exc:
        print(f"error: cannot read spec: {exc}", file=sys.stderr)
        return ExitStatus.INPUT_ERROR
    diagnostics = validate_spec(spec)
    for d in diagnostics:
        print(d, file=sys.stderr)
    if any(d.severity is Severity.ERROR for d in diagnostics):
        return ExitStatus.SPEC_ERROR
    print(f"ok: {len(spec.scenarios)} scenario(s)")
    return ExitStatus.OK


def _run(config: PipelineConfig) -> int:
    outcome = run_pipeline(config)
    if outcome.report is not None:
        c = outcome.report.suite.counts
        print(
            f"{c.get('pass', 0)} passed, {c.get('fail', 0)} failed, {c.get('error', 0)} errors; "
            f"report in {config.out}"
        )
    return outcome.exit_status


def _cmd_test(args) -> int:
    config = PipelineConfig(
        spec=[Path(s) for s in args.spec],
        features=Path(args.features),
        bindings=Path(args.bindings),
        backlog=Path(args.backlog) if args.backlog else None,
        out=Path(args.out),
        max_superstep=args.max_superstep,
        pin_timestamp=args.pin_timestamp,
    )
    return _run(config)


def _cmd_pipeline(args) -> int:
    try:
        config = PipelineConfig.from_json(args.config)
    except ConfigError as exc:
        print(f"[config] {exc}", file=sys.stderr)
        return ExitStatus.INPUT_ERROR
    if args.pin_timestamp:
        config.pin_timestamp = args.pin_timestamp
    if args.dry_run:
        config.dry_run = True
    return _run(config)


def _cmd_sync(args) -> int:
    try:
        result = sync(args.input, args.endpoint, args.token_env, args.dry_run)
    except OSError as exc:
        print(f"[sync] cannot read report: {exc}", file=sys.stderr)
        return ExitStatus.INPUT_ERROR
    print(f"sync: {'ok' if result.ok else 'failed'} ({result.message})")
    return ExitStatus.OK if result.ok else ExitStatus.INPUT_ERROR


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdss", description="Validate usage scenarios against a formal scenario specification."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate specification files")
    p.add_argument("spec", nargs="+")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("test", help="run the full pipeline from command-line paths")
    p.add_argument("--spec", action="append", required=True, help="may be repeated")
    p.add_argument("--features", required=True)
    p.add_argument("--bindings", required=True)
    p.add_argument("--backlog")
    p.add_argument("--out", required=True)
    p.add_argument("--max-superstep", type=_positive, default=1000)
    p.add_argument("--pin-timestamp", help="fixed timestamp for reproducible reports")
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("pipeline", help="run the pipeline from a JSON config file")
    p.add_argument("--config", required=True)
    p.add_argument("--pin-timestamp")
    p.add_argument("--dry-run", action="store_true", help="write sync payload instead of posting")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("sync", help="push a report to a webhook")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--endpoint")
    p.add_argument("--token-env", help="name of the environment variable holding the token")
    p.add_argument("--dry-run", action="store_true")
    p.set_defaults(func=_cmd_sync)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(message)s",
        stream=sys.stderr,
    )
    return int(args.func(args))


if __name__ == "__main__":
    sys.exit(main())
