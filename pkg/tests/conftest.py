from __future__ import annotations

import random
import shutil
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from tdss.model import (
    WILDCARD,
    Event,
    EventPattern,
    FormalScenario,
    Role,
    ScenarioSpec,
    ScenarioStep,
    StepKind,
    event_matches,
)

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"

# small alphabet: six events over three roles, some with an argument
ALPHABET = [
    Event("a", "b", "m"),
    Event("a", "b", "m", ("x",)),
    Event("b", "c", "n"),
    Event("c", "a", "k", ("y",)),
    Event("b", "b", "s"),
    Event("c", "c", "t", ("z",)),
]


@pytest.fixture
def fixture_dir(tmp_path):
    """Copy a named fixture directory into tmp_path and return the copy."""

    def copy(name: str) -> Path:
        target = tmp_path / name
        shutil.copytree(FIXTURES / name, target)
        return target

    return copy


def loose_pattern(event: Event, how: int) -> EventPattern:
    """0: exact, 1: wildcard args, 2: empty arg list (any arity)."""
    if how == 1 and event.args:
        return EventPattern(event.sender, event.receiver, event.message, (WILDCARD,) * len(event.args))
    if how == 2:
        return EventPattern(event.sender, event.receiver, event.message)
    return EventPattern.of(event)


def random_spec(rng: random.Random, alphabet=ALPHABET) -> ScenarioSpec:
    scenarios = []
    for i in range(rng.randint(1, 4)):
        trigger = loose_pattern(rng.choice(alphabet), rng.randrange(3))
        steps = []
        for _ in range(rng.randint(0, 3)):
            kind = rng.choice(list(StepKind))
            ev = rng.choice(alphabet)
            pattern = EventPattern.of(ev) if kind is StepKind.REQUEST else loose_pattern(ev, rng.randrange(3))
            steps.append(ScenarioStep(kind, pattern))
        scenarios.append(FormalScenario(f"S{i}", trigger, tuple(steps)))
    return ScenarioSpec((), tuple(scenarios))


def random_injections(rng: random.Random, spec: ScenarioSpec | None = None, alphabet=ALPHABET) -> list[Event]:
    """Mostly events that fire some trigger of ``spec``; the rest uniform."""
    triggering = []
    if spec is not None:
        triggering = [e for e in alphabet if any(event_matches(s.trigger, e) for s in spec.scenarios)]
    out = []
    for _ in range(rng.randint(1, 3)):
        pool = triggering if triggering and rng.random() < 0.7 else alphabet
        out.append(rng.choice(pool))
    return out


@st.composite
def playout_cases(draw):
    """(spec, injections) drawn through hypothesis, reusing the seeded generator."""
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = random.Random(seed)
    spec = random_spec(rng)
    return spec, random_injections(rng, spec)


_idents = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,6}", fullmatch=True)
_strings = st.text(st.characters(blacklist_categories=("Cs",)), max_size=6)


@st.composite
def patterns(draw, ground: bool = False):
    sender = draw(_idents)
    receiver = draw(_idents)
    message = draw(_idents)
    arg = _strings if ground else st.one_of(_strings, st.just(WILDCARD))
    args = draw(st.lists(arg, max_size=3))
    return EventPattern(sender, receiver, message, tuple(args))


@st.composite
def specs(draw):
    """Arbitrary syntactically valid specs (not necessarily lint-clean)."""
    roles = draw(st.lists(_idents, max_size=3))
    names = draw(st.lists(_idents, max_size=4))
    scenarios = []
    for name in names:
        steps = []
        for _ in range(draw(st.integers(0, 3))):
            kind = draw(st.sampled_from(list(StepKind)))
            steps.append(ScenarioStep(kind, draw(patterns(ground=kind is StepKind.REQUEST))))
        scenarios.append(FormalScenario(name, draw(patterns()), tuple(steps)))
    return ScenarioSpec(tuple(Role(r) for r in roles), tuple(scenarios))
