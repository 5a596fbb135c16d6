"""Traceability graph, coverage rollup and living-documentation rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from tdss.frontends.backlog import Backlog
from tdss.frontends.gherkin import Feature
from tdss.model import Diagnostic, Severity
from tdss.runner import SuiteResult, Verdict


class NodeKind(str, Enum):
    GOAL = "goal"
    EPIC = "epic"
    STORY = "story"
    FEATURE = "feature"
    SCENARIO = "scenario"


def node_id(kind: NodeKind | str, key: str) -> str:
    return f"{NodeKind(kind).value}:{key}"


def scenario_key(path: str, index: int) -> str:
    return f"{path}#{index}"


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    key: str
    label: str
    text: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "key": self.key,
            "label": self.label,
            "text": self.text,
        }


@dataclass
class TraceGraph:
    nodes: dict[str, Node] = field(default_factory=dict)
    # (child, parent) pairs; parents are always one level up the hierarchy
    edges: list[tuple[str, str]] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    linked: list[str] = field(default_factory=list)
    dangling: list[str] = field(default_factory=list)
    unlinked: list[str] = field(default_factory=list)

    def add(self, node: Node) -> None:
        self.nodes[node.id] = node

    def children(self, parent: str) -> list[str]:
        return [c for c, p in self.edges if p == parent]

    def parents(self, child: str) -> list[str]:
        return [p for c, p in self.edges if c == child]

    def of_kind(self, kind: NodeKind) -> list[Node]:
        return [n for n in self.nodes.values() if n.kind is kind]

    def to_dict(self) -> dict:
        return {
            "nodes": [self.nodes[k].to_dict() for k in sorted(self.nodes)],
            "edges": [{"from": c, "to": p} for c, p in sorted(self.edges)],
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "features": {
                "linked": sorted(self.linked),
                "dangling": sorted(self.dangling),
                "unlinked": sorted(self.unlinked),
            },
        }


def link(backlog: Backlog, features: list[Feature]) -> TraceGraph:
    g = TraceGraph()
    for goal in backlog.goals:
        g.add(Node(node_id("goal", goal.id), NodeKind.GOAL, goal.id, goal.title))
    for epic in backlog.epics:
        eid = node_id("epic", epic.id)
        g.add(Node(eid, NodeKind.EPIC, epic.id, epic.id, epic.text))
        for gid in epic.goal_ids:
            if node_id("goal", gid) in g.nodes:
                g.edges.append((eid, node_id("goal", gid)))
            else:
                g.diagnostics.append(
                    Diagnostic(
                        Severity.WARNING,
                        "dangling-goal",
                        f"epic {epic.id} is tagged with unknown goal {gid}",
                        epic.id,
                    )
                )
    for story in backlog.stories:
        sid = node_id("story", story.id)
        g.add(Node(sid, NodeKind.STORY, story.id, story.id, story.text))
        if node_id("epic", story.epic_id) in g.nodes:
            g.edges.append((sid, node_id("epic", story.epic_id)))
        else:
            g.diagnostics.append(
                Diagnostic(
                    Severity.WARNING,
                    "dangling-epic",
                    f"story {story.id} references unknown epic {story.epic_id}",
                    story.id,
                )
            )
    for feature in features:
        fid = node_id("feature", feature.source_path)
        g.add(Node(fid, NodeKind.FEATURE, feature.source_path, feature.name))
        for index, us in enumerate(feature.usage_scenarios):
            key = scenario_key(feature.source_path, index)
            g.add(Node(node_id("scenario", key), NodeKind.SCENARIO, key, us.name))
            g.edges.append((node_id("scenario", key), fid))
        if feature.story_ref is None:
            g.unlinked.append(feature.source_path)
            g.diagnostics.append(
                Diagnostic(
                    Severity.WARNING,
                    "unlinked-feature",
                    f"feature {feature.name!r} has no @story tag",
                    feature.source_path,
                )
            )
        elif node_id("story", feature.story_ref) in g.nodes:
            g.linked.append(feature.source_path)
            g.edges.append((fid, node_id("story", feature.story_ref)))
        else:
            g.dangling.append(feature.source_path)
            g.diagnostics.append(
                Diagnostic(
                    Severity.WARNING,
                    "dangling-story",
                    f"feature {feature.name!r} references unknown story {feature.story_ref}",
                    feature.source_path,
                )
            )
    return g


class Status(str, Enum):
    COVERED = "Covered"
    PARTIALLY_COVERED = "PartiallyCovered"
    UNCOVERED = "Uncovered"
    FAILING = "Failing"


GLYPHS = {
    Status.COVERED: "✅",
    Status.PARTIALLY_COVERED: "◐",
    Status.UNCOVERED: "○",
    Status.FAILING: "❌",
}


class UnknownFeature(KeyError):
    pass


@dataclass
class CoverageStatus:
    statuses: dict[str, Status]

    def __getitem__(self, nid: str) -> Status:
        return self.statuses[nid]

    def of(self, kind: NodeKind | str, key: str) -> Status:
        return self.statuses[node_id(kind, key)]

    def to_dict(self) -> dict:
        return {k: self.statuses[k].value for k in sorted(self.statuses)}


def combine(children: list[Status]) -> Status:
    """Failing beats PartiallyCovered beats Uncovered; all Covered means Covered."""
    if not children:
        return Status.UNCOVERED
    if Status.FAILING in children:
        return Status.FAILING
    if all(s is Status.COVERED for s in children):
        return Status.COVERED
    if all(s is Status.UNCOVERED for s in children):
        return Status.UNCOVERED
    return Status.PARTIALLY_COVERED


_BOTTOM_UP = (NodeKind.FEATURE, NodeKind.STORY, NodeKind.EPIC, NodeKind.GOAL)


def rollup(graph: TraceGraph, suite: SuiteResult) -> CoverageStatus:
    statuses: dict[str, Status] = {}
    for r in suite.results:
        sid = node_id("scenario", scenario_key(r.feature.source_path, r.index))
        if node_id("feature", r.feature.source_path) not in graph.nodes or sid not in graph.nodes:
            raise UnknownFeature(r.feature.source_path)
        ok = r.result.verdict is Verdict.PASS
        statuses[sid] = Status.COVERED if ok else Status.FAILING
    for node in graph.of_kind(NodeKind.SCENARIO):
        statuses.setdefault(node.id, Status.UNCOVERED)
    for kind in _BOTTOM_UP:
        for node in graph.of_kind(kind):
            statuses[node.id] = combine([statuses[c] for c in graph.children(node.id)])
    return CoverageStatus(statuses)


@dataclass
class LivingDocReport:
    graph: TraceGraph
    statuses: CoverageStatus
    suite: SuiteResult
    diagnostics: list[Diagnostic] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def violations(self) -> list[dict]:
        out = []
        for r in self.suite.results:
            for v in r.result.violations:
                out.append(
                    {"feature": r.feature.source_path, "usage_scenario": r.scenario.name, **v.to_dict()}
                )
        return out

    def to_dict(self) -> dict:
        results = []
        for r in self.suite.results:
            results.append(
                {
                    "feature": r.feature.name,
                    "path": r.feature.source_path,
                    "story": r.feature.story_ref,
                    "index": r.index,
                    "scenario": r.scenario.name,
                    **r.result.to_dict(),
                }
            )
        return {
            "graph": self.graph.to_dict(),
            "statuses": self.statuses.to_dict(),
            "results": results,
            "violations": self.violations(),
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "meta": {**self.meta, "counts": dict(sorted(self.suite.counts.items()))},
        }


def assemble(
    backlog: Backlog,
    features: list[Feature],
    suite: SuiteResult,
    diagnostics: list[Diagnostic] | None = None,
    meta: dict | None = None,
) -> LivingDocReport:
    graph = link(backlog, features)
    statuses = rollup(graph, suite)
    return LivingDocReport(graph, statuses, suite, list(diagnostics or []), dict(meta or {}))


def render(report: LivingDocReport, format: str = "json") -> bytes:
    if format == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
        return (text + "\n").encode("utf-8")
    if format == "markdown":
        return _render_markdown(report).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


def _render_markdown(report: LivingDocReport) -> str:
    g, st = report.graph, report.statuses
    by_feature: dict[str, list] = {}
    for r in report.suite.results:
        by_feature.setdefault(r.feature.source_path, []).append(r)
    out: list[str] = ["# Living documentation", ""]
    if "generated_at" in report.meta:
        out.append(f"Generated: {report.meta['generated_at']}")
    c = report.suite.counts
    out += [
        f"Results: {c.get('pass', 0)} passed, {c.get('fail', 0)} failed, "
        f"{c.get('error', 0)} errors",
        "",
        "Legend: ✅ covered, ◐ partially covered, ○ uncovered, ❌ failing",
        "",
    ]

    def badge(nid: str) -> str:
        return f"{GLYPHS[st[nid]]} "

    def emit_scenarios(fid: str, indent: str) -> None:
        path = g.nodes[fid].key
        results = {r.index: r for r in by_feature.get(path, [])}
        for sid in sorted(g.children(fid), key=lambda s: int(s.rsplit("#", 1)[1])):
            node = g.nodes[sid]
            line = f"{indent}- {badge(sid)}Scenario: {node.label}"
            r = results.get(int(node.key.rsplit("#", 1)[1]))
            if r is None:
                line += " (not run)"
            elif r.result.verdict is Verdict.PASS:
                line += " (passed)"
            elif r.result.verdict is Verdict.FAIL:
                failed = r.result.failed_expectation
                line += f" (failed at step \"{failed.step_text}\")"
            else:
                line += f" (error: {r.result.error})"
            out.append(line)

    def emit_feature(fid: str, indent: str) -> None:
        node = g.nodes[fid]
        out.append(f"{indent}- {badge(fid)}Feature: {node.label} (`{node.key}`)")
        emit_scenarios(fid, indent + "  ")

    def emit_story(sid: str) -> None:
        node = g.nodes[sid]
        out.append(f"#### {badge(sid)}Story {node.key}")
        out.append("")
        if node.text:
            out.extend([f"> {node.text}", ""])
        features = sorted(g.children(sid))
        if not features:
            out.extend(["_No features linked._", ""])
        for fid in features:
            emit_feature(fid, "")
        if features:
            out.append("")

    def emit_epic(eid: str) -> None:
        node = g.nodes[eid]
        out.extend([f"### {badge(eid)}Epic {node.key}", ""])
        if node.text:
            out.extend([f"> {node.text}", ""])
        stories = sorted(g.children(eid))
        if not stories:
            out.extend(["_No user stories._", ""])
        for sid in stories:
            emit_story(sid)

    for goal in sorted(g.of_kind(NodeKind.GOAL), key=lambda n: n.id):
        out.extend([f"## {badge(goal.id)}Goal {goal.key}: {goal.label}", ""])
        epics = sorted(g.children(goal.id))
        if not epics:
            out.extend(["_No epics address this goal._", ""])
        for eid in epics:
            emit_epic(eid)

    loose_epics = sorted(n.id for n in g.of_kind(NodeKind.EPIC) if not g.parents(n.id))
    if loose_epics:
        out.extend(["## Epics without goal", ""])
        for eid in loose_epics:
            emit_epic(eid)
    loose_stories = sorted(n.id for n in g.of_kind(NodeKind.STORY) if not g.parents(n.id))
    if loose_stories:
        out.extend(["## Stories without epic", ""])
        for sid in loose_stories:
            emit_story(sid)
    loose_features = sorted(g.dangling + g.unlinked)
    if loose_features:
        out.extend(["## Features without story", ""])
        for path in loose_features:
            emit_feature(node_id("feature", path), "")
        out.append("")

    violations = report.violations()
    contradictions = [v for v in violations if v["kind"] == "Contradiction"]
    others = [v for v in violations if v["kind"] != "Contradiction"]
    if contradictions:
        out.extend(["## Contradictions", ""])
        for v in contradictions:
            out.append(
                f"- `{v['event']}` requested by {', '.join(v['requesters'])}, "
                f"forbidden by {', '.join(v['forbidders'])} "
                f"(while running \"{v['usage_scenario']}\")"
            )
        out.append("")
    if others:
        out.extend(["## Other engine violations", ""])
        for v in others:
            if v["kind"] == "Livelock":
                out.append(
                    f"- Livelock after {v['bound']} events "
                    f"(while running \"{v['usage_scenario']}\")"
                )
            else:
                out.append(f"- OutOfOrder: `{v['event']}` in scenario {v['scenario']}")
        out.append("")
    if report.diagnostics or g.diagnostics:
        out.extend(["## Diagnostics", ""])
        for d in report.diagnostics + g.diagnostics:
            out.append(f"- {d.severity.value}: {d.message}")
        out.append("")
    return "\n".join(out).rstrip("\n") + "\n"
