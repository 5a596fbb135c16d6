"""Executable usage scenarios validated against a play-out scenario specification."""

from tdss.engine import Engine, EngineConfig, SuperstepTrace, Violation, ViolationKind
from tdss.model import (
    WILDCARD,
    Event,
    EventPattern,
    FormalScenario,
    ScenarioSpec,
    ScenarioStep,
    StepKind,
    event_matches,
    validate_spec,
)

__version__ = "0.1.0"

__all__ = [
    "WILDCARD",
    "Engine",
    "EngineConfig",
    "Event",
    "EventPattern",
    "FormalScenario",
    "ScenarioSpec",
    "ScenarioStep",
    "StepKind",
    "SuperstepTrace",
    "Violation",
    "ViolationKind",
    "event_matches",
    "validate_spec",
]
