"""Line-oriented parser for the supported Gherkin subset.

Supported: ``Feature:``, ``Scenario:``, ``Given/When/Then/And/But`` steps,
``#`` comments, free description text after ``Feature:``, and tag lines.
A ``@story:<ID>`` tag before ``Feature:`` links the feature to a backlog
story. Backgrounds, outlines, examples, rules, tables and docstrings are
rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from tdss.frontends.errors import ParseError, UnsupportedConstruct


class Keyword(str, Enum):
    GIVEN = "Given"
    WHEN = "When"
    THEN = "Then"
    AND = "And"
    BUT = "But"


@dataclass(frozen=True)
class Step:
    keyword: Keyword
    text: str
    line: int = 0


@dataclass(frozen=True)
class UsageScenario:
    name: str
    steps: tuple[Step, ...]
    line: int = 0


@dataclass(frozen=True)
class Feature:
    name: str
    story_ref: str | None = None
    usage_scenarios: tuple[UsageScenario, ...] = field(default=())
    source_path: str = "<feature>"


_UNSUPPORTED = [
    (re.compile(r"Background\s*:"), "Background"),
    (re.compile(r"Scenario (Outline|Template)\s*:"), "Scenario Outline"),
    (re.compile(r"(Examples|Scenarios)\s*:"), "Examples"),
    (re.compile(r"Rule\s*:"), "Rule"),
    (re.compile(r"Example\s*:"), "Example"),
    (re.compile(r"\|"), "data table"),
    (re.compile(r'("""|```)'), "doc string"),
]
_STEP_RE = re.compile(r"(Given|When|Then|And|But)(\s+|$)(.*)")
_STORY_TAG_RE = re.compile(r"@story:(\S*)")


def parse_feature(text: str, path: str = "<feature>") -> Feature:
    if text.startswith("\ufeff"):
        text = text[1:]
    name: str | None = None
    story_ref: str | None = None
    scenarios: list[UsageScenario] = []
    current: tuple[str, int] | None = None
    steps: list[Step] = []

    def close_scenario() -> None:
        nonlocal current, steps
        if current is None:
            return
        sname, sline = current
        if not steps:
            raise ParseError(f"scenario {sname!r} has no steps", path, sline, 1, sname)
        scenarios.append(UsageScenario(sname, tuple(steps), sline))
        current, steps = None, []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        col = len(raw) - len(raw.lstrip()) + 1
        for pattern, construct in _UNSUPPORTED:
            if pattern.match(stripped):
                raise UnsupportedConstruct(construct, path, lineno, col, stripped)

        if stripped.startswith("@"):
            for tag in stripped.split():
                if not tag.startswith("@"):
                    raise ParseError("malformed tag line", path, lineno, col, stripped)
                m = _STORY_TAG_RE.fullmatch(tag)
                if m is None:
                    continue
                if name is not None:
                    raise ParseError("@story tag must precede 'Feature:'", path, lineno, col, tag)
                if not m.group(1):
                    raise ParseError("@story tag without story id", path, lineno, col, tag)
                if story_ref is not None:
                    raise ParseError("feature has more than one @story tag", path, lineno, col, tag)
                story_ref = m.group(1)
            continue

        if stripped.startswith("Feature:"):
            if name is not None:
                raise ParseError("only one 'Feature:' per file", path, lineno, col, stripped)
            name = stripped[len("Feature:") :].strip()
            if not name:
                raise ParseError("feature name is empty", path, lineno, col, stripped)
            continue

        if name is None:
            raise ParseError("expected 'Feature:'", path, lineno, col, stripped)

        if stripped.startswith("Scenario:"):
            close_scenario()
            current = (stripped[len("Scenario:") :].strip(), lineno)
            continue

        m = _STEP_RE.match(stripped)
        if m is not None:
            if current is None:
                raise ParseError("step outside of a scenario", path, lineno, col, stripped)
            keyword = Keyword(m.group(1))
            step_text = m.group(3).strip()
            if not step_text:
                raise ParseError("step text is empty", path, lineno, col, stripped)
            if not steps and keyword not in (Keyword.GIVEN, Keyword.WHEN):
                raise ParseError(
                    "first step of a scenario must be Given or When", path, lineno, col, stripped
                )
            steps.append(Step(keyword, step_text, lineno))
            continue

        if current is not None:
            raise ParseError("expected a step keyword", path, lineno, col, stripped)
        # free-form feature description; ignored

    if name is None:
        line = max(1, len(text.splitlines()))
        raise ParseError("missing 'Feature:'", path, line, 1, "")
    close_scenario()
    return Feature(name, story_ref, tuple(scenarios), path)
