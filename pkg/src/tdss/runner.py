"""Compile usage scenarios into tests and run them against a specification."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from tdss.engine import (
    Engine,
    EngineConfig,
    EngineInitError,
    SuperstepTrace,
    Violation,
    ViolationKind,
)
from tdss.frontends.bindings import BindingSet, StepResolutionError, resolve_step
from tdss.frontends.gherkin import Feature, Keyword, Step, UsageScenario
from tdss.model import Event, ScenarioSpec

FATAL_VIOLATIONS = (ViolationKind.CONTRADICTION, ViolationKind.LIVELOCK)


class ActionKind(str, Enum):
    INJECT = "inject"
    EXPECT = "expect"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    event: Event
    step: Step


@dataclass(frozen=True)
class TestCase:
    feature: str
    scenario: str
    actions: tuple[Action, ...]

    __test__ = False  # keep pytest from collecting this class


class CompileError(Exception):
    def __init__(self, scenario: str, errors: list[StepResolutionError]):
        self.scenario = scenario
        self.errors = tuple(errors)
        lines = "; ".join(str(e) for e in errors)
        super().__init__(f"cannot compile scenario {scenario!r}: {lines}")

    @property
    def step_texts(self) -> list[str]:
        return [e.step_text for e in self.errors]


_MODE = {
    Keyword.GIVEN: ActionKind.INJECT,
    Keyword.WHEN: ActionKind.INJECT,
    Keyword.THEN: ActionKind.EXPECT,
}


def compile_test(us: UsageScenario, bindings: BindingSet, feature: str = "") -> TestCase:
    """Given/When steps become injections, Then steps expectations.

    And/But continue whatever the preceding step was. All unresolvable steps
    are collected into a single CompileError.
    """
    actions: list[Action] = []
    errors: list[StepResolutionError] = []
    mode: ActionKind | None = None
    for step in us.steps:
        if step.keyword in _MODE:
            mode = _MODE[step.keyword]
        elif mode is None:
            raise ValueError(f"scenario {us.name!r} starts with {step.keyword.value}")
        try:
            event = resolve_step(bindings, step.text)
        except StepResolutionError as exc:
            errors.append(exc)
            continue
        actions.append(Action(mode, event, step))
    if errors:
        raise CompileError(us.name, errors)
    return TestCase(feature, us.name, tuple(actions))


class Verdict(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    ERROR = "Error"


@dataclass(frozen=True)
class FailedExpectation:
    step_text: str
    expected: Event


@dataclass(frozen=True)
class TestResult:
    verdict: Verdict
    failed_expectation: FailedExpectation | None = None
    traces: tuple[SuperstepTrace, ...] = ()
    violations: tuple[Violation, ...] = ()
    error: str | None = None
    cause: str | None = None  # "compile", "spec" or "violation" for Error verdicts

    __test__ = False

    @property
    def executed(self) -> list[Event]:
        return [e for t in self.traces for e in t.events]

    def to_dict(self) -> dict:
        failed = None
        if self.failed_expectation is not None:
            failed = {
                "step": self.failed_expectation.step_text,
                "expected": self.failed_expectation.expected.render(),
            }
        return {
            "verdict": self.verdict.value,
            "failed_expectation": failed,
            "error": self.error,
            "cause": self.cause,
            "violations": [v.to_dict() for v in self.violations],
            "traces": [t.to_dict() for t in self.traces],
        }


def match_expectations(
    executed: list[Event], expectations: list[tuple[Event, int]]
) -> int | None:
    """Greedy ordered-subsequence match.

    ``expectations`` pairs each expected event with the start index of its
    governing injection. Returns the index of the first unmatched
    expectation, or None if all match.
    """
    cursor = 0
    for i, (expected, region_start) in enumerate(expectations):
        pos = max(cursor, region_start)
        while pos < len(executed) and executed[pos] != expected:
            pos += 1
        if pos == len(executed):
            return i
        cursor = pos + 1
    return None


def run_test(tc: TestCase, spec: ScenarioSpec, config: EngineConfig | None = None) -> TestResult:
    try:
        engine = Engine(spec, config)
    except EngineInitError as exc:
        return TestResult(Verdict.ERROR, error=str(exc), cause="spec")

    traces: list[SuperstepTrace] = []
    executed: list[Event] = []
    expectations: list[tuple[Event, int]] = []
    expect_steps: list[Step] = []
    region_start = 0
    for action in tc.actions:
        if action.kind is ActionKind.INJECT:
            region_start = len(executed)
            trace = engine.inject(action.event)
            traces.append(trace)
            executed.extend(trace.events)
        else:
            expectations.append((action.event, region_start))
            expect_steps.append(action.step)

    violations = tuple(v for t in traces for v in t.violations)
    fatal = [v for v in violations if v.kind in FATAL_VIOLATIONS]
    if fatal:
        return TestResult(
            Verdict.ERROR,
            traces=tuple(traces),
            violations=violations,
            error="; ".join(v.describe() for v in fatal),
            cause="violation",
        )
    missing = match_expectations(executed, expectations)
    if missing is not None:
        failed = FailedExpectation(expect_steps[missing].text, expectations[missing][0])
        return TestResult(Verdict.FAIL, failed, tuple(traces), violations)
    return TestResult(Verdict.PASS, None, tuple(traces), violations)


@dataclass(frozen=True)
class ScenarioResult:
    feature: Feature
    index: int
    scenario: UsageScenario
    result: TestResult


@dataclass(frozen=True)
class SuiteResult:
    results: tuple[ScenarioResult, ...] = ()
    counts: dict = field(default_factory=dict)

    @classmethod
    def of(cls, results: list[ScenarioResult]) -> SuiteResult:
        ordered = sorted(results, key=lambda r: (r.feature.source_path, r.index))
        counts = {v.value.lower(): 0 for v in Verdict}
        for r in ordered:
            counts[r.result.verdict.value.lower()] += 1
        return cls(tuple(ordered), counts)

    @property
    def passed(self) -> int:
        return self.counts.get("pass", 0)

    @property
    def failed(self) -> int:
        return self.counts.get("fail", 0)

    @property
    def errors(self) -> int:
        return self.counts.get("error", 0)

    def violations(self) -> list[Violation]:
        return [v for r in self.results for v in r.result.violations]


def run_suite(
    features: list[Feature],
    spec: ScenarioSpec,
    bindings: BindingSet,
    config: EngineConfig | None = None,
) -> SuiteResult:
    """Run every usage scenario on its own engine."""
    results = []
    for feature in features:
        for index, us in enumerate(feature.usage_scenarios):
            try:
                tc = compile_test(us, bindings, feature.name)
            except CompileError as exc:
                result = TestResult(Verdict.ERROR, error=str(exc), cause="compile")
            else:
                result = run_test(tc, spec, config)
            results.append(ScenarioResult(feature, index, us, result))
    return SuiteResult.of(results)
