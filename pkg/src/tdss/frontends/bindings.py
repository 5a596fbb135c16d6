"""Step-binding files: map usage-scenario step text to events.

One binding per line::

    # comment
    "driver selects route {}" => vehicleDriver -> navi.selectRoute({0})

``{}`` in the pattern captures a non-empty substring; ``{n}`` in the event
template refers to the n-th capture.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from tdss.frontends.errors import DuplicatePattern, ParseError
from tdss.frontends.lexer import TokenStream, parse_event_expr, tokenize
from tdss.model import Event, EventPattern, Placeholder


class StepResolutionError(Exception):
    def __init__(self, step_text: str, message: str):
        self.step_text = step_text
        super().__init__(message)


class UnboundStep(StepResolutionError):
    def __init__(self, step_text: str):
        super().__init__(step_text, f"no binding matches step {step_text!r}")


class AmbiguousStep(StepResolutionError):
    def __init__(self, step_text: str, patterns: list[str]):
        self.patterns = tuple(patterns)
        listed = ", ".join(repr(p) for p in patterns)
        super().__init__(step_text, f"step {step_text!r} matches several bindings: {listed}")


class NonGroundStep(StepResolutionError):
    def __init__(self, step_text: str, pattern: EventPattern):
        self.pattern = pattern
        super().__init__(
            step_text, f"step {step_text!r} binds to non-ground event {pattern.render()}"
        )


def _compile_pattern(pattern: str) -> re.Pattern:
    parts = [re.escape(p) for p in pattern.split("{}")]
    return re.compile("(.+)".join(parts), re.DOTALL)


@dataclass(frozen=True)
class StepBinding:
    pattern: str
    event_template: EventPattern
    line: int = 0

    @property
    def placeholder_count(self) -> int:
        return self.pattern.count("{}")

    def match(self, step_text: str) -> tuple[str, ...] | None:
        m = _compile_pattern(self.pattern).fullmatch(step_text)
        return None if m is None else m.groups()

    def instantiate(self, captures: tuple[str, ...]) -> EventPattern:
        t = self.event_template
        args = tuple(captures[a.index] if isinstance(a, Placeholder) else a for a in t.args)
        return EventPattern(t.sender, t.receiver, t.message, args)


@dataclass(frozen=True)
class BindingSet:
    bindings: tuple[StepBinding, ...] = ()

    def __len__(self) -> int:
        return len(self.bindings)

    def __iter__(self):
        return iter(self.bindings)


def parse_bindings(text: str, path: str = "<bindings>") -> BindingSet:
    bindings: list[StepBinding] = []
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        ts = TokenStream(tokenize(raw, path, line=lineno), path)
        tok = ts.expect("string", 'quoted step pattern')
        pattern = _unquote(tok, ts)
        if not pattern:
            raise ts.error("step pattern is empty", tok)
        ts.expect("fatarrow", "'=>'")
        template = parse_event_expr(ts)
        if ts.current.kind != "eof":
            raise ts.error("unexpected text after event expression")
        binding = StepBinding(pattern, template, lineno)
        for ph in template.placeholders:
            if ph.index >= binding.placeholder_count:
                raise ParseError(
                    f"placeholder {{{ph.index}}} exceeds the {binding.placeholder_count} "
                    "capture(s) of the pattern",
                    path,
                    lineno,
                    raw.index("{%d}" % ph.index) + 1,
                    "{%d}" % ph.index,
                )
        if pattern in seen:
            raise DuplicatePattern(pattern, path, seen[pattern], lineno)
        seen[pattern] = lineno
        bindings.append(binding)
    return BindingSet(tuple(bindings))


def _unquote(tok, ts: TokenStream) -> str:
    try:
        return json.loads(tok.text)
    except json.JSONDecodeError:
        raise ts.error("invalid escape in string literal", tok) from None


def resolve_step(bindings: BindingSet, step_text: str) -> Event:
    """Bind one step text to its event.

    Exactly one binding must match the whole text. Raises UnboundStep,
    AmbiguousStep, or NonGroundStep when the bound template keeps wildcards.
    """
    hits = []
    for binding in bindings:
        captures = binding.match(step_text)
        if captures is not None:
            hits.append((binding, captures))
    if not hits:
        raise UnboundStep(step_text)
    if len(hits) > 1:
        raise AmbiguousStep(step_text, [b.pattern for b, _ in hits])
    binding, captures = hits[0]
    pattern = binding.instantiate(captures)
    if not pattern.is_ground:
        raise NonGroundStep(step_text, pattern)
    return pattern.to_event()
