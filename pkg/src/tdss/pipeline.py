"""End-to-end validation pipeline: parse, compile, run, trace, render, sync."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import IntEnum
from pathlib import Path

from tdss.engine import EngineConfig
from tdss.frontends import (
    Backlog,
    ParseError,
    parse_backlog,
    parse_bindings,
    parse_feature,
    parse_spec,
)
from tdss.junit import to_junit_xml
from tdss.model import ScenarioSpec, has_errors, validate_spec
from tdss.report import LivingDocReport, assemble, render
from tdss.runner import FATAL_VIOLATIONS, SuiteResult, Verdict, run_suite
from tdss.sync import SyncResult, sync

log = logging.getLogger(__name__)

REPORT_JSON = "report.json"
LIVING_MD = "living.md"
JUNIT_XML = "junit.xml"


class ExitStatus(IntEnum):
    OK = 0
    TEST_FAILURES = 1
    SPEC_ERROR = 2  # contradiction, livelock or spec validation error
    INPUT_ERROR = 3  # parse, config or IO error


class ConfigError(Exception):
    pass


@dataclass
class PipelineConfig:
    spec: list[Path]
    features: Path
    bindings: Path
    out: Path
    backlog: Path | None = None
    max_superstep: int = 1000
    sync_endpoint: str | None = None
    token_env: str | None = None
    dry_run: bool = False
    pin_timestamp: str | None = None

    @classmethod
    def from_json(cls, path: Path | str) -> PipelineConfig:
        """Load a JSON config; relative paths are resolved against its directory."""
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        missing = [k for k in ("spec", "features", "bindings", "out") if k not in data]
        if missing:
            raise ConfigError(f"config is missing {', '.join(missing)}")
        base = path.parent

        def resolve(p: str) -> Path:
            return base / p

        specs = data["spec"] if isinstance(data["spec"], list) else [data["spec"]]
        try:
            return cls(
                spec=[resolve(s) for s in specs],
                features=resolve(data["features"]),
                bindings=resolve(data["bindings"]),
                out=resolve(data["out"]),
                backlog=resolve(data["backlog"]) if data.get("backlog") else None,
                max_superstep=int(data.get("max_superstep", 1000)),
                sync_endpoint=data.get("sync_endpoint"),
                token_env=data.get("token_env"),
                dry_run=bool(data.get("dry_run", False)),
                pin_timestamp=data.get("pin_timestamp"),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config value: {exc}") from None


@dataclass
class PipelineOutcome:
    report: LivingDocReport | None
    exit_status: ExitStatus
    sync: SyncResult | None = None
    messages: list[str] = field(default_factory=list)

    def __iter__(self):
        # allows ``report, status = run_pipeline(cfg)``
        return iter((self.report, self.exit_status))


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class _StageFailed(Exception):
    pass


def _read(path: Path, stage: str) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _StageFailed(f"{stage}: cannot read {path}: {exc.strerror or exc}") from None


def exit_status_for(suite: SuiteResult, spec_invalid: bool = False) -> ExitStatus:
    status = ExitStatus.OK
    for r in suite.results:
        if r.result.verdict is Verdict.PASS:
            continue
        if any(v.kind in FATAL_VIOLATIONS for v in r.result.violations):
            status = max(status, ExitStatus.SPEC_ERROR)
        else:
            status = max(status, ExitStatus.TEST_FAILURES)
    if spec_invalid:
        status = max(status, ExitStatus.SPEC_ERROR)
    return ExitStatus(status)


def run_pipeline(config: PipelineConfig) -> PipelineOutcome:
    messages: list[str] = []

    def say(stage: str, text: str) -> None:
        line = f"[{stage}] {text}"
        messages.append(line)
        log.warning(line)

    inputs: list[dict] = []
    try:
        # 1) load features
        if not config.features.is_dir():
            raise _StageFailed(f"features: {config.features} is not a directory")
        features = []
        for path in sorted(config.features.rglob("*.feature")):
            rel = path.relative_to(config.features).as_posix()
            text = _read(path, "features")
            inputs.append({"kind": "feature", "name": rel, "sha256": _digest(text.encode())})
            features.append(parse_feature(text, rel))

        # 2) bindings (compiled per scenario inside the suite run)
        text = _read(config.bindings, "bindings")
        inputs.append({"kind": "bindings", "name": config.bindings.name, "sha256": _digest(text.encode())})
        bindings = parse_bindings(text, config.bindings.name)

        backlog = Backlog()
        if config.backlog is not None:
            text = _read(config.backlog, "backlog")
            inputs.append({"kind": "backlog", "name": config.backlog.name, "sha256": _digest(text.encode())})
            backlog, _ = parse_backlog(text, config.backlog.name)

        # 3) load the scenario specification
        spec = ScenarioSpec()
        for path in config.spec:
            text = _read(path, "spec")
            inputs.append({"kind": "spec", "name": path.name, "sha256": _digest(text.encode())})
            spec = spec.merged(parse_spec(text, path.name))
        engine_config = EngineConfig(config.max_superstep)
    except ParseError as exc:
        say("parse", str(exc))
        return PipelineOutcome(None, ExitStatus.INPUT_ERROR, messages=messages)
    except (_StageFailed, ValueError) as exc:
        say("config", str(exc))
        return PipelineOutcome(None, ExitStatus.INPUT_ERROR, messages=messages)

    # 4) validate; an invalid spec still yields a report with Error verdicts
    diagnostics = validate_spec(spec)
    spec_invalid = has_errors(diagnostics)
    for d in diagnostics:
        say("validate", str(d))

    # 5) run the tests
    suite = run_suite(features, spec, bindings, engine_config)
    for r in suite.results:
        if r.result.verdict is Verdict.FAIL:
            say("test", f"{r.feature.source_path}: {r.scenario.name}: failed at "
                        f"{r.result.failed_expectation.step_text!r}")
        elif r.result.verdict is Verdict.ERROR:
            say("test", f"{r.feature.source_path}: {r.scenario.name}: {r.result.error}")

    timestamp = config.pin_timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    meta = {"generated_at": timestamp, "inputs": inputs, "max_superstep": config.max_superstep}
    report = assemble(backlog, features, suite, diagnostics, meta)
    status = exit_status_for(suite, spec_invalid)

    # 6) render and write
    try:
        config.out.mkdir(parents=True, exist_ok=True)
        report_path = config.out / REPORT_JSON
        report_path.write_bytes(render(report, "json"))
        (config.out / LIVING_MD).write_bytes(render(report, "markdown"))
        (config.out / JUNIT_XML).write_bytes(to_junit_xml(suite))
    except OSError as exc:
        say("render", f"cannot write report: {exc}")
        return PipelineOutcome(report, ExitStatus.INPUT_ERROR, messages=messages)

    sync_result = None
    if config.sync_endpoint or config.dry_run:
        sync_result = sync(report_path, config.sync_endpoint, config.token_env, config.dry_run)
        if not sync_result.ok:
            say("sync", f"push failed: {sync_result.message}")
    return PipelineOutcome(report, status, sync_result, messages)
