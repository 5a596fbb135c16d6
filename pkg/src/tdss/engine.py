"""Play-out execution of a scenario specification.

An environment event is injected; the engine then runs a superstep: it
repeatedly picks the first enabled request (declaration order of the
requesting scenario, then step index) and delivers it, until no request is
pending, every pending request is forbidden (contradiction) or the step
bound is hit (livelock).

Delivery of an event does three things, against the set of instances that
were live when delivery began:

* an instance whose current request/waitfor step matches advances;
* an instance for which the event matches a *later* request/waitfor step is
  aborted with an out-of-order violation;
* every scenario whose trigger matches and that had no live instance is
  spawned. Triggers of already-live scenarios are ignored with a note.

Forbid steps are settled eagerly: when an instance's program counter lands
on one, the pattern joins the instance's forbid set and the counter moves
on. Forbids hold until the instance terminates. An instance that ends on a
forbid step stays parked, still forbidding, until the superstep finishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from tdss.model import (
    Diagnostic,
    Event,
    EventPattern,
    FormalScenario,
    ScenarioSpec,
    StepKind,
    event_matches,
    has_errors,
    validate_spec,
)

ENVIRONMENT = "environment"
DEFAULT_MAX_SUPERSTEP = 1000


class EngineInitError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        errors = "; ".join(str(d) for d in diagnostics if d.severity.value == "error")
        super().__init__(f"specification has validation errors: {errors}")


class InjectionDuringSuperstep(RuntimeError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    max_superstep: int = DEFAULT_MAX_SUPERSTEP

    def __post_init__(self) -> None:
        if not isinstance(self.max_superstep, int) or self.max_superstep < 1:
            raise ValueError("max_superstep must be a positive integer")


class ViolationKind(str, Enum):
    CONTRADICTION = "Contradiction"
    LIVELOCK = "Livelock"
    OUT_OF_ORDER = "OutOfOrder"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    event: Event | None = None
    requesters: tuple[str, ...] = ()
    forbidders: tuple[str, ...] = ()
    scenario: str | None = None
    bound: int | None = None

    def describe(self) -> str:
        if self.kind is ViolationKind.CONTRADICTION:
            return (
                f"contradiction: {self.event} requested by {', '.join(self.requesters)} "
                f"and forbidden by {', '.join(self.forbidders)}"
            )
        if self.kind is ViolationKind.LIVELOCK:
            return f"livelock: superstep exceeded {self.bound} executed events"
        return f"out of order: {self.event} skipped ahead in scenario {self.scenario}"

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind.value}
        if self.kind is ViolationKind.CONTRADICTION:
            d.update(
                event=self.event.render(),
                requesters=list(self.requesters),
                forbidders=list(self.forbidders),
            )
        elif self.kind is ViolationKind.LIVELOCK:
            d["bound"] = self.bound
        else:
            d.update(scenario=self.scenario, event=self.event.render())
        return d


@dataclass(frozen=True)
class ExecutedEvent:
    event: Event
    by: str


@dataclass(frozen=True)
class SuperstepTrace:
    injected: Event
    executed: tuple[ExecutedEvent, ...]
    violations: tuple[Violation, ...] = ()
    spawned_instances: tuple[str, ...] = ()
    terminated_instances: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def events(self) -> list[Event]:
        return [e.event for e in self.executed]

    def to_dict(self) -> dict:
        return {
            "injected": self.injected.render(),
            "executed": [{"event": e.event.render(), "by": e.by} for e in self.executed],
            "violations": [v.to_dict() for v in self.violations],
            "spawned": list(self.spawned_instances),
            "terminated": list(self.terminated_instances),
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class PendingRequest:
    event: Event
    scenario: str
    step_index: int


@dataclass
class _Instance:
    scenario: FormalScenario
    order: int
    pc: int = 0
    forbids: list[EventPattern] = field(default_factory=list)
    parked: bool = False

    @property
    def name(self) -> str:
        return self.scenario.name

    def current_step(self):
        steps = self.scenario.steps
        return steps[self.pc] if self.pc < len(steps) else None


@dataclass
class _TraceBuilder:
    injected: Event
    executed: list[ExecutedEvent] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)
    spawned: list[str] = field(default_factory=list)
    terminated: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def freeze(self) -> SuperstepTrace:
        return SuperstepTrace(
            self.injected,
            tuple(self.executed),
            tuple(self.violations),
            tuple(self.spawned),
            tuple(self.terminated),
            tuple(self.notes),
        )


class Engine:
    """Mutable play-out state for one specification. Not thread-safe."""

    def __init__(self, spec: ScenarioSpec, config: EngineConfig | None = None):
        diagnostics = validate_spec(spec)
        if has_errors(diagnostics):
            raise EngineInitError(diagnostics)
        self.spec = spec
        self.config = config or EngineConfig()
        self.diagnostics = diagnostics
        self._order = {s.name: i for i, s in enumerate(spec.scenarios)}
        self._instances: dict[str, _Instance] = {}
        self._busy = False

    @property
    def active_instances(self) -> list[tuple[str, int, tuple[EventPattern, ...]]]:
        return [(i.name, i.pc, tuple(i.forbids)) for i in self._live()]

    def _live(self) -> list[_Instance]:
        return sorted(self._instances.values(), key=lambda i: i.order)

    def pending_requests(self) -> list[PendingRequest]:
        pending = []
        for inst in self._live():
            step = inst.current_step()
            if step is not None and step.kind is StepKind.REQUEST:
                pending.append(PendingRequest(step.event.to_event(), inst.name, inst.pc))
        return pending

    def _forbidders(self, event: Event) -> list[str]:
        return [
            inst.name
            for inst in self._live()
            if any(event_matches(p, event) for p in inst.forbids)
        ]

    def enabled_requests(self) -> list[PendingRequest]:
        # _live() is already in declaration order; one instance per scenario
        return [r for r in self.pending_requests() if not self._forbidders(r.event)]

    def inject(self, event: Event) -> SuperstepTrace:
        if self._busy:
            raise InjectionDuringSuperstep("inject() called while a superstep is running")
        self._busy = True
        try:
            return self._superstep(event)
        finally:
            self._busy = False

    def _superstep(self, injected: Event) -> SuperstepTrace:
        trace = _TraceBuilder(injected)
        trace.executed.append(ExecutedEvent(injected, ENVIRONMENT))
        self._deliver(injected, trace)
        executed = 0
        while True:
            pending = self.pending_requests()
            if not pending:
                break
            enabled = [r for r in pending if not self._forbidders(r.event)]
            if not enabled:
                self._report_contradiction(pending, trace)
                break
            if executed >= self.config.max_superstep:
                trace.violations.append(
                    Violation(ViolationKind.LIVELOCK, bound=self.config.max_superstep)
                )
                break
            chosen = enabled[0]
            trace.executed.append(ExecutedEvent(chosen.event, chosen.scenario))
            executed += 1
            self._deliver(chosen.event, trace)
        for inst in self._live():
            if inst.parked:
                del self._instances[inst.name]
                trace.terminated.append(inst.name)
        return trace.freeze()

    def _report_contradiction(self, pending: list[PendingRequest], trace: _TraceBuilder) -> None:
        blocked: dict[Event, list[str]] = {}
        for req in pending:
            blocked.setdefault(req.event, []).append(req.scenario)
        for event, requesters in blocked.items():
            trace.violations.append(
                Violation(
                    ViolationKind.CONTRADICTION,
                    event=event,
                    requesters=tuple(requesters),
                    forbidders=tuple(self._forbidders(event)),
                )
            )

    def _deliver(self, event: Event, trace: _TraceBuilder) -> None:
        live_before = set(self._instances)
        for inst in self._live():
            step = inst.current_step()
            if step is not None and step.kind is not StepKind.FORBID and event_matches(
                step.event, event
            ):
                inst.pc += 1
                self._settle(inst, trace)
            elif self._matches_later_step(inst, event):
                del self._instances[inst.name]
                trace.violations.append(
                    Violation(ViolationKind.OUT_OF_ORDER, event=event, scenario=inst.name)
                )
        for scenario in self.spec.scenarios:
            if not event_matches(scenario.trigger, event):
                continue
            if scenario.name in live_before:
                trace.notes.append(
                    f"trigger {event} ignored: scenario {scenario.name} already active"
                )
                continue
            inst = _Instance(scenario, self._order[scenario.name])
            self._instances[scenario.name] = inst
            trace.spawned.append(scenario.name)
            self._settle(inst, trace)

    @staticmethod
    def _matches_later_step(inst: _Instance, event: Event) -> bool:
        return any(
            step.kind is not StepKind.FORBID and event_matches(step.event, event)
            for step in inst.scenario.steps[inst.pc + 1 :]
        )

    def _settle(self, inst: _Instance, trace: _TraceBuilder) -> None:
        steps = inst.scenario.steps
        while inst.pc < len(steps) and steps[inst.pc].kind is StepKind.FORBID:
            inst.forbids.append(steps[inst.pc].event)
            inst.pc += 1
        if inst.pc == len(steps):
            if steps and steps[-1].kind is StepKind.FORBID:
                inst.parked = True
            else:
                del self._instances[inst.name]
                trace.terminated.append(inst.name)


def init(spec: ScenarioSpec, config: EngineConfig | None = None) -> Engine:
    return Engine(spec, config)
