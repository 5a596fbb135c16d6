"""Parser and canonical renderer for the scenario specification language.

Example::

    role vehicleDriver
    scenario RouteRequest {
        trigger vehicleDriver -> navi.requestRoute()
        request navi -> routePlaner.freightInfo()
        request routePlaner.calculateRoutes()   // self-event
    }
"""

from __future__ import annotations

from tdss.frontends.lexer import TokenStream, parse_event_expr, tokenize
from tdss.model import FormalScenario, Role, ScenarioSpec, ScenarioStep, StepKind

_STEP_KEYWORDS = {k.value: k for k in StepKind}
_CLAUSE_KEYWORDS = ("trigger", *_STEP_KEYWORDS)


def parse_spec(text: str, path: str = "<spec>") -> ScenarioSpec:
    """Parse a whole specification; raises ParseError on the first syntax error."""
    ts = TokenStream(tokenize(text, path), path)
    roles: list[Role] = []
    scenarios: list[FormalScenario] = []
    while ts.at_keyword("role"):
        ts.advance()
        roles.append(Role(ts.expect("ident", "role name").text))
    while ts.current.kind != "eof":
        if not ts.at_keyword("scenario"):
            if ts.at_keyword("role"):
                raise ts.error("role declarations must precede scenarios")
            raise ts.error("expected 'scenario'")
        scenarios.append(_parse_scenario(ts))
    return ScenarioSpec(tuple(roles), tuple(scenarios))


def _parse_scenario(ts: TokenStream) -> FormalScenario:
    ts.advance()
    name = ts.expect("ident", "scenario name").text
    ts.expect("{", "'{'")
    trigger = None
    steps: list[ScenarioStep] = []
    while not (ts.current.kind == "}" or ts.current.kind == "eof"):
        if not ts.at_keyword(*_CLAUSE_KEYWORDS):
            raise ts.error("expected 'trigger', 'request', 'waitfor', 'forbid' or '}'")
        keyword = ts.advance()
        pattern = parse_event_expr(ts)
        if keyword.text == "trigger":
            if trigger is not None or steps:
                raise ts.error("trigger must be the first and only trigger clause", keyword)
            trigger = pattern
        else:
            if trigger is None:
                raise ts.error("expected 'trigger' before the first step", keyword)
            steps.append(ScenarioStep(_STEP_KEYWORDS[keyword.text], pattern))
    closing = ts.expect("}", "'}'")
    if trigger is None:
        raise ts.error("scenario has no trigger", closing)
    return FormalScenario(name, trigger, tuple(steps))


def render_spec(spec: ScenarioSpec) -> str:
    """Canonical text form; ``parse_spec(render_spec(s)) == s`` for any parsed spec."""
    lines = [f"role {r.name}" for r in spec.roles]
    if lines and spec.scenarios:
        lines.append("")
    for i, scenario in enumerate(spec.scenarios):
        if i:
            lines.append("")
        lines.append(f"scenario {scenario.name} {{")
        lines.append(f"    trigger {_render_pattern(scenario.trigger)}")
        for step in scenario.steps:
            lines.append(f"    {step.kind.value} {_render_pattern(step.event)}")
        lines.append("}")
    return "\n".join(lines) + ("\n" if lines else "")


def _render_pattern(pattern) -> str:
    return pattern.render().replace("->", " -> ", 1)
