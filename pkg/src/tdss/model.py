"""Event and scenario domain types shared by every other module.

All values are frozen dataclasses. Collections are stored as tuples so a
parsed specification can be hashed, compared field by field and shared
between engines without copying.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class _Wildcard:
    """Singleton argument that matches any concrete argument."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "WILDCARD"

    def __reduce__(self):
        return (_Wildcard, ())


WILDCARD = _Wildcard()


@dataclass(frozen=True)
class Placeholder:
    """Positional reference `{n}` into the captures of a step pattern."""

    index: int


Arg = Union[str, _Wildcard, Placeholder]


def is_identifier(name: str) -> bool:
    return bool(IDENT_RE.match(name))


@dataclass(frozen=True)
class Role:
    name: str

    def __post_init__(self) -> None:
        if not is_identifier(self.name):
            raise ValueError(f"invalid role name {self.name!r}")


def quote(text: str) -> str:
    # JSON string escaping doubles as the DSL string literal syntax
    return json.dumps(text, ensure_ascii=False)


def _render_arg(arg: Arg) -> str:
    if arg is WILDCARD:
        return "*"
    if isinstance(arg, Placeholder):
        return "{%d}" % arg.index
    return quote(arg)


@dataclass(frozen=True)
class Event:
    """A concrete message ``sender -> receiver.message(args)``."""

    sender: str
    receiver: str
    message: str
    args: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.message:
            raise ValueError("event message must be non-empty")
        object.__setattr__(self, "args", tuple(self.args))

    def render(self) -> str:
        args = ",".join(quote(a) for a in self.args)
        return f"{self.sender}->{self.receiver}.{self.message}({args})"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class EventPattern:
    """Like :class:`Event`, but arguments may be wildcards or placeholders.

    An empty argument list matches events of any arity.
    """

    sender: str
    receiver: str
    message: str
    args: tuple[Arg, ...] = ()

    def __post_init__(self) -> None:
        if not self.message:
            raise ValueError("pattern message must be non-empty")
        object.__setattr__(self, "args", tuple(self.args))

    @classmethod
    def of(cls, event: Event) -> EventPattern:
        return cls(event.sender, event.receiver, event.message, event.args)

    @property
    def is_ground(self) -> bool:
        return all(isinstance(a, str) for a in self.args)

    @property
    def placeholders(self) -> tuple[Placeholder, ...]:
        return tuple(a for a in self.args if isinstance(a, Placeholder))

    def to_event(self) -> Event:
        if not self.is_ground:
            raise ValueError(f"pattern {self.render()} is not ground")
        return Event(self.sender, self.receiver, self.message, self.args)

    def roles(self) -> tuple[str, str]:
        return (self.sender, self.receiver)

    def render(self) -> str:
        args = ",".join(_render_arg(a) for a in self.args)
        return f"{self.sender}->{self.receiver}.{self.message}({args})"

    def __str__(self) -> str:
        return self.render()


class StepKind(Enum):
    REQUEST = "request"
    WAITFOR = "waitfor"
    FORBID = "forbid"


@dataclass(frozen=True)
class ScenarioStep:
    kind: StepKind
    event: EventPattern


@dataclass(frozen=True)
class FormalScenario:
    name: str
    trigger: EventPattern
    steps: tuple[ScenarioStep, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))


@dataclass(frozen=True)
class ScenarioSpec:
    roles: tuple[Role, ...] = ()
    scenarios: tuple[FormalScenario, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "roles", tuple(self.roles))
        object.__setattr__(self, "scenarios", tuple(self.scenarios))

    def merged(self, other: ScenarioSpec) -> ScenarioSpec:
        return ScenarioSpec(self.roles + other.roles, self.scenarios + other.scenarios)


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    subject: str = ""

    def to_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
            "subject": self.subject,
        }

    def __str__(self) -> str:
        return f"{self.severity.value}: {self.message}"


def event_matches(pattern: EventPattern, event: Event) -> bool:
    if (pattern.sender, pattern.receiver, pattern.message) != (
        event.sender,
        event.receiver,
        event.message,
    ):
        return False
    if not pattern.args:
        return True
    if len(pattern.args) != len(event.args):
        return False
    for want, got in zip(pattern.args, event.args):
        if want is WILDCARD:
            continue
        if isinstance(want, Placeholder) or want != got:
            # unresolved placeholders never match a concrete event
            return False
    return True


def validate_spec(spec: ScenarioSpec) -> list[Diagnostic]:
    """Static checks run before a specification is handed to the engine.

    Duplicate scenario names and non-ground requests are errors. Roles are
    only checked against declarations when at least one role is declared.
    Placeholders belong to binding templates and are rejected here.
    """
    diagnostics: list[Diagnostic] = []

    counts = Counter(s.name for s in spec.scenarios)
    for name, n in counts.items():
        if n > 1:
            diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "duplicate-scenario",
                    f"scenario {name!r} is declared {n} times",
                    name,
                )
            )

    declared = {r.name for r in spec.roles}
    undeclared: dict[str, str] = {}
    for scenario in spec.scenarios:
        patterns = [scenario.trigger] + [s.event for s in scenario.steps]
        for pattern in patterns:
            if declared:
                for role in pattern.roles():
                    if role not in declared:
                        undeclared.setdefault(role, scenario.name)
            if pattern.placeholders:
                diagnostics.append(
                    Diagnostic(
                        Severity.ERROR,
                        "placeholder-in-spec",
                        f"placeholder in {pattern.render()} of scenario {scenario.name!r}",
                        scenario.name,
                    )
                )
        for index, step in enumerate(scenario.steps):
            if step.kind is StepKind.REQUEST and any(
                a is WILDCARD for a in step.event.args
            ):
                diagnostics.append(
                    Diagnostic(
                        Severity.ERROR,
                        "non-ground-request",
                        f"non-ground request {step.event.render()} at step {index} "
                        f"of scenario {scenario.name!r}",
                        scenario.name,
                    )
                )
    for role, first_user in undeclared.items():
        diagnostics.append(
            Diagnostic(
                Severity.WARNING,
                "undeclared-role",
                f"role {role!r} is used (first in {first_user!r}) but never declared",
                role,
            )
        )
    return diagnostics


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


__all__ = [
    "Arg",
    "Diagnostic",
    "Event",
    "EventPattern",
    "FormalScenario",
    "Placeholder",
    "Role",
    "ScenarioSpec",
    "ScenarioStep",
    "Severity",
    "StepKind",
    "WILDCARD",
    "event_matches",
    "has_errors",
    "is_identifier",
    "quote",
    "validate_spec",
]
