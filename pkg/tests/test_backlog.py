import json

import pytest

from tdss.frontends import ParseError, parse_backlog

from conftest import FIXTURES


def test_case_study_backlog():
    backlog, diags = parse_backlog((FIXTURES / "case_study" / "backlog.json").read_text())
    assert diags == []
    assert [g.id for g in backlog.goals] == ["G1"]
    assert backlog.goals[0].title == "Reduce pollution cased by inner-city delivery traffic"
    assert [(e.id, e.goal_ids) for e in backlog.epics] == [("ASE-22", ("G1",))]
    assert [(s.id, s.epic_id) for s in backlog.stories] == [("ASE-29", "ASE-22"), ("ASE-31", "ASE-22")]


def test_empty():
    backlog, diags = parse_backlog('{"goals":[],"epics":[],"stories":[]}')
    assert (backlog.goals, backlog.epics, backlog.stories, diags) == ((), (), (), [])


def test_dangling_story_epic():
    data = {"goals": [], "epics": [], "stories": [{"id": "S1", "epic": "ASE-99", "text": "t"}]}
    backlog, diags = parse_backlog(json.dumps(data))
    assert len(backlog.stories) == 1
    assert len(diags) == 1
    assert "ASE-99" in diags[0].message


def test_dangling_goal_tag():
    data = {"epics": [{"id": "E", "text": "t", "goals": ["G9"]}]}
    _, diags = parse_backlog(json.dumps(data))
    assert [d.code for d in diags] == ["dangling-goal"]


def test_unknown_keys_ignored():
    data = {"goals": [{"id": "G", "title": "t", "owner": "x"}], "version": 3}
    backlog, _ = parse_backlog(json.dumps(data))
    assert backlog.goals[0].id == "G"


def test_malformed_json_position():
    with pytest.raises(ParseError) as info:
        parse_backlog('{\n  "goals": [\n    {"id": "G" "title": "t"}\n]}', "b.json")
    assert info.value.line == 3
    assert info.value.source_path == "b.json"


@pytest.mark.parametrize(
    "data, fragment",
    [
        ({"goals": [{"title": "t"}]}, "'id'"),
        ({"epics": [{"id": "E", "text": "t"}]}, "'goals'"),
        ({"stories": [{"id": "S", "text": "t"}]}, "'epic'"),
        ({"goals": {}}, "list"),
        ([], "object"),
        ({"goals": [{"id": "G", "title": "a"}, {"id": "G", "title": "b"}]}, "duplicate"),
        ({"epics": [{"id": "E", "text": "t", "goals": "G1"}]}, "list of strings"),
    ],
)
def test_schema_errors(data, fragment):
    with pytest.raises(ParseError) as info:
        parse_backlog(json.dumps(data))
    assert fragment in info.value.message
