"""Parsers for the textual inputs: scenario DSL, features, bindings, backlog."""

from tdss.frontends.backlog import Backlog, Epic, Goal, Story, parse_backlog
from tdss.frontends.bindings import (
    AmbiguousStep,
    BindingSet,
    NonGroundStep,
    StepBinding,
    StepResolutionError,
    UnboundStep,
    parse_bindings,
    resolve_step,
)
from tdss.frontends.errors import DuplicatePattern, ParseError, UnsupportedConstruct
from tdss.frontends.gherkin import Feature, Keyword, Step, UsageScenario, parse_feature
from tdss.frontends.spec_dsl import parse_spec, render_spec

__all__ = [
    "AmbiguousStep",
    "Backlog",
    "BindingSet",
    "DuplicatePattern",
    "Epic",
    "Feature",
    "Goal",
    "Keyword",
    "NonGroundStep",
    "ParseError",
    "Step",
    "StepBinding",
    "StepResolutionError",
    "Story",
    "UnboundStep",
    "UnsupportedConstruct",
    "UsageScenario",
    "parse_backlog",
    "parse_bindings",
    "parse_feature",
    "parse_spec",
    "render_spec",
    "resolve_step",
]
