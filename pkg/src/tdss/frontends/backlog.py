"""JSON backlog of goals, epics and user stories.

Schema (unknown keys ignored)::

    {"goals":   [{"id": "G1", "title": "..."}],
     "epics":   [{"id": "ASE-22", "text": "...", "goals": ["G1"]}],
     "stories": [{"id": "ASE-29", "epic": "ASE-22", "text": "..."}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from tdss.frontends.errors import ParseError
from tdss.model import Diagnostic, Severity


@dataclass(frozen=True)
class Goal:
    id: str
    title: str


@dataclass(frozen=True)
class Epic:
    id: str
    text: str
    goal_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class Story:
    id: str
    epic_id: str
    text: str


@dataclass(frozen=True)
class Backlog:
    goals: tuple[Goal, ...] = ()
    epics: tuple[Epic, ...] = ()
    stories: tuple[Story, ...] = ()


_FIELDS = {
    "goals": ("id", "title"),
    "epics": ("id", "text", "goals"),
    "stories": ("id", "epic", "text"),
}


def parse_backlog(text: str, path: str = "<backlog>") -> tuple[Backlog, list[Diagnostic]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        line_text = text.splitlines()[exc.lineno - 1] if text.strip() else ""
        raise ParseError(
            f"malformed JSON: {exc.msg}", path, exc.lineno, exc.colno, line_text.strip()[:40]
        ) from None
    if not isinstance(data, dict):
        raise ParseError("backlog must be a JSON object", path)

    records: dict[str, list[dict]] = {}
    for kind, fields in _FIELDS.items():
        items = data.get(kind, [])
        if not isinstance(items, list):
            raise ParseError(f"{kind!r} must be a list", path)
        for index, item in enumerate(items):
            where = f"{kind}[{index}]"
            if not isinstance(item, dict):
                raise ParseError(f"{where} must be an object", path)
            for name in fields:
                if name not in item:
                    raise ParseError(f"{where} is missing required field {name!r}", path)
            if not isinstance(item["id"], str) or not item["id"]:
                raise ParseError(f"{where}.id must be a non-empty string", path)
            if kind == "epics":
                goals = item["goals"]
                if not isinstance(goals, list) or not all(isinstance(g, str) for g in goals):
                    raise ParseError(f"{where}.goals must be a list of strings", path)
            elif kind == "stories" and not isinstance(item["epic"], str):
                raise ParseError(f"{where}.epic must be a string", path)
        ids = [item["id"] for item in items]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            raise ParseError(f"duplicate {kind} ids: {', '.join(dupes)}", path)
        records[kind] = items

    backlog = Backlog(
        goals=tuple(Goal(g["id"], str(g["title"])) for g in records["goals"]),
        epics=tuple(Epic(e["id"], str(e["text"]), tuple(e["goals"])) for e in records["epics"]),
        stories=tuple(Story(s["id"], s["epic"], str(s["text"])) for s in records["stories"]),
    )
    return backlog, backlog_diagnostics(backlog)


def backlog_diagnostics(backlog: Backlog) -> list[Diagnostic]:
    goal_ids = {g.id for g in backlog.goals}
    epic_ids = {e.id for e in backlog.epics}
    diagnostics = []
    for epic in backlog.epics:
        for gid in epic.goal_ids:
            if gid not in goal_ids:
                diagnostics.append(
                    Diagnostic(
                        Severity.WARNING,
                        "dangling-goal",
                        f"epic {epic.id} is tagged with unknown goal {gid}",
                        epic.id,
                    )
                )
    for story in backlog.stories:
        if story.epic_id not in epic_ids:
            diagnostics.append(
                Diagnostic(
                    Severity.WARNING,
                    "dangling-epic",
                    f"story {story.id} references unknown epic {story.epic_id}",
                    story.id,
                )
            )
    return diagnostics
