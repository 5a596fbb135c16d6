import itertools
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdss.engine import EngineConfig, ViolationKind
from tdss.frontends import parse_bindings, parse_feature, parse_spec
from tdss.junit import to_junit_xml
from tdss.model import Event, ScenarioSpec
from tdss.runner import (
    ActionKind,
    CompileError,
    SuiteResult,
    Verdict,
    compile_test,
    match_expectations,
    run_suite,
    run_test,
)

from conftest import FIXTURES
from oracle import first_unmatched

CASE = FIXTURES / "case_study"
BINDINGS = parse_bindings((CASE / "steps.bindings").read_text())
FEATURE = parse_feature(
    (CASE / "features" / "calculate_routes.feature").read_text(), "calculate_routes.feature"
)
ROUTES_SCENARIO = FEATURE.usage_scenarios[0]
ROUTES_SPEC = parse_spec((CASE / "spec_routes.scn").read_text())
THEN_STEP = "the navigation system forwards information on the loaded freight to the route planning system"


class TestCompile:
    def test_routes_scenario(self):
        tc = compile_test(ROUTES_SCENARIO, BINDINGS, FEATURE.name)
        assert [(a.kind, a.event.render()) for a in tc.actions] == [
            (ActionKind.INJECT, "vehicleDriver->navi.requestRoute()"),
            (ActionKind.EXPECT, "navi->routePlaner.freightInfo()"),
            (ActionKind.EXPECT, "routePlaner->routePlaner.calculateRoutes()"),
        ]
        assert tc.feature == FEATURE.name

    def test_unbound_then_step(self):
        lines = (CASE / "steps.bindings").read_text().splitlines()
        partial = parse_bindings("\n".join(l for l in lines if "freightInfo" not in l))
        with pytest.raises(CompileError) as info:
            compile_test(ROUTES_SCENARIO, partial)
        assert info.value.step_texts == [THEN_STEP]

    def test_all_offending_steps_listed(self):
        with pytest.raises(CompileError) as info:
            compile_test(ROUTES_SCENARIO, parse_bindings(""))
        assert len(info.value.step_texts) == 3

    def test_given_injects_first(self):
        feature = parse_feature(
            "Feature: f\n Scenario: s\n  Given the depot is open\n  When the driver starts\n"
            "  Then the depot logs it\n  But nothing else\n"
        )
        bindings = parse_bindings(
            '"the depot is open" => env -> depot.open()\n'
            '"the driver starts" => driver -> depot.start()\n'
            '"the depot logs it" => depot.log()\n'
            '"nothing else" => depot.idle()\n'
        )
        tc = compile_test(feature.usage_scenarios[0], bindings)
        assert [(a.kind, a.event.message) for a in tc.actions] == [
            (ActionKind.INJECT, "open"),
            (ActionKind.INJECT, "start"),
            (ActionKind.EXPECT, "log"),
            (ActionKind.EXPECT, "idle"),
        ]

    def test_wildcard_expectation_rejected(self):
        feature = parse_feature("Feature: f\n Scenario: s\n  When go\n  Then anything\n")
        bindings = parse_bindings('"go" => a.go()\n"anything" => a.m(*)\n')
        with pytest.raises(CompileError) as info:
            compile_test(feature.usage_scenarios[0], bindings)
        assert info.value.step_texts == ["anything"]


class TestRun:
    def test_fails_against_empty_spec(self):
        result = run_test(compile_test(ROUTES_SCENARIO, BINDINGS), ScenarioSpec())
        assert result.verdict is Verdict.FAIL
        assert result.failed_expectation.step_text == THEN_STEP
        assert result.failed_expectation.expected == Event("navi", "routePlaner", "freightInfo")

    def test_passes_with_route_request(self):
        result = run_test(compile_test(ROUTES_SCENARIO, BINDINGS), ROUTES_SPEC)
        assert result.verdict is Verdict.PASS
        assert [e.message for e in result.executed] == ["requestRoute", "freightInfo", "calculateRoutes"]

    def test_livelock_is_error(self):
        spec = parse_spec((FIXTURES / "livelock" / "spec.scn").read_text())
        feature = parse_feature((FIXTURES / "livelock" / "features" / "ping.feature").read_text())
        bindings = parse_bindings((FIXTURES / "livelock" / "steps.bindings").read_text())
        result = run_test(compile_test(feature.usage_scenarios[0], bindings), spec)
        assert result.verdict is Verdict.ERROR
        assert result.cause == "violation"
        (v,) = result.violations
        assert v.kind is ViolationKind.LIVELOCK and v.bound == 1000

    def test_contradiction_is_error_even_if_expectations_hold(self):
        spec = parse_spec(
            "scenario R { trigger vehicleDriver->navi.requestRoute() request navi->routePlaner.freightInfo() "
            "request routePlaner.calculateRoutes() request navi.extra() }\n"
            "scenario F { trigger routePlaner.calculateRoutes() forbid navi.extra() }\n"
        )
        result = run_test(compile_test(ROUTES_SCENARIO, BINDINGS), spec)
        assert result.verdict is Verdict.ERROR
        assert result.violations[0].kind is ViolationKind.CONTRADICTION

    def test_invalid_spec_is_error(self):
        spec = ScenarioSpec((), ROUTES_SPEC.scenarios * 2)
        result = run_test(compile_test(ROUTES_SCENARIO, BINDINGS), spec)
        assert (result.verdict, result.cause) == (Verdict.ERROR, "spec")

    def test_expectation_may_skip_interleaved_events(self):
        spec = parse_spec(
            "scenario R { trigger vehicleDriver->navi.requestRoute() request navi.noise() "
            "request navi->routePlaner.freightInfo() request navi.noise2() request routePlaner.calculateRoutes() }"
        )
        assert run_test(compile_test(ROUTES_SCENARIO, BINDINGS), spec).verdict is Verdict.PASS

    def test_expectation_order_matters(self):
        spec = parse_spec(
            "scenario R { trigger vehicleDriver->navi.requestRoute() "
            "request routePlaner.calculateRoutes() request navi->routePlaner.freightInfo() }"
        )
        result = run_test(compile_test(ROUTES_SCENARIO, BINDINGS), spec)
        assert result.verdict is Verdict.FAIL
        assert result.failed_expectation.step_text == "the route planning systems calculates different route options"

    def test_expect_cannot_match_before_its_injection(self):
        feature = parse_feature(
            "Feature: f\n Scenario: s\n  When first\n  And second\n  Then reply\n"
        )
        bindings = parse_bindings('"first" => u.a()\n"second" => u.b()\n"reply" => s.r()\n')
        spec = parse_spec("scenario A { trigger u.a() request s.r() }")
        result = run_test(compile_test(feature.usage_scenarios[0], bindings), spec)
        assert result.verdict is Verdict.FAIL


_events = st.sampled_from([Event("a", "a", m) for m in "xyz"])


@settings(max_examples=300)
@given(
    st.lists(_events, max_size=7),
    st.lists(st.tuples(_events, st.integers(0, 7)), max_size=4),
)
def test_expectation_matching_equals_brute_force(executed, raw):
    # regions are non-decreasing, as produced by a sequence of injections
    regions = list(itertools.accumulate(sorted(r for _, r in raw)))
    expectations = [(e, min(r, len(executed))) for (e, _), r in zip(raw, regions)]
    assert match_expectations(executed, expectations) == first_unmatched(executed, expectations)


class TestSuite:
    def test_single_passing(self):
        suite = run_suite([FEATURE], ROUTES_SPEC, BINDINGS)
        assert suite.counts == {"pass": 1, "fail": 0, "error": 0}

    def test_routes_against_empty_spec(self):
        suite = run_suite([FEATURE], ScenarioSpec(), BINDINGS)
        assert (suite.passed, suite.failed, suite.errors) == (0, 1, 0)

    def test_unbound_step_isolated(self):
        other = parse_feature("Feature: other\n Scenario: lost\n  When nobody knows this\n", "b.feature")
        suite = run_suite([other, FEATURE], ROUTES_SPEC, BINDINGS)
        assert [(r.feature.source_path, r.result.verdict) for r in suite.results] == [
            ("b.feature", Verdict.ERROR),
            ("calculate_routes.feature", Verdict.PASS),
        ]
        assert suite.results[0].result.cause == "compile"

    def test_permutation_keeps_verdicts(self):
        features = [
            FEATURE,
            parse_feature("Feature: a\n Scenario: x\n  When nobody knows this\n", "a.feature"),
            parse_feature(
                "Feature: z\n Scenario: y\n  When the vehicle driver request routes with the navigation "
                "system of the vehicle\n", "z.feature"
            ),
        ]
        baseline = {
            (r.feature.source_path, r.index): r.result.verdict
            for r in run_suite(features, ROUTES_SPEC, BINDINGS).results
        }
        for perm in itertools.permutations(features):
            suite = run_suite(list(perm), ROUTES_SPEC, BINDINGS)
            assert {(r.feature.source_path, r.index): r.result.verdict for r in suite.results} == baseline
            assert [r.feature.source_path for r in suite.results] == sorted(k[0] for k in baseline)

    def test_adding_requesting_scenario_never_breaks_a_pass(self):
        extra = parse_spec(
            "scenario Extra { trigger navi->routePlaner.freightInfo() request routePlaner->navi.ack() }"
        )
        before = run_suite([FEATURE], ROUTES_SPEC, BINDINGS)
        after = run_suite([FEATURE], ROUTES_SPEC.merged(extra), BINDINGS)
        assert before.passed == after.passed == 1

    def test_pass_implies_no_fatal_violations(self):
        suite = run_suite([FEATURE], ROUTES_SPEC, BINDINGS, EngineConfig(5))
        for r in suite.results:
            if r.result.verdict is Verdict.PASS:
                assert not [v for v in r.result.violations if v.kind is not ViolationKind.OUT_OF_ORDER]

    def test_counts_sum(self):
        suite = SuiteResult.of([])
        assert suite.counts == {"pass": 0, "fail": 0, "error": 0}


class TestJUnit:
    def test_failure_message_is_step_text(self):
        suite = run_suite([FEATURE], ScenarioSpec(), BINDINGS)
        root = ET.fromstring(to_junit_xml(suite))
        assert root.get("tests") == "1" and root.get("failures") == "1"
        (ts,) = root.findall("testsuite")
        assert ts.get("name") == FEATURE.name
        (case,) = ts.findall("testcase")
        assert case.get("name") == ROUTES_SCENARIO.name
        assert case.find("failure").get("message") == THEN_STEP

    def test_pass_and_error(self):
        other = parse_feature("Feature: other\n Scenario: lost\n  When nobody knows this\n", "b.feature")
        root = ET.fromstring(to_junit_xml(run_suite([FEATURE, other], ROUTES_SPEC, BINDINGS)))
        suites = {ts.get("name"): ts for ts in root.findall("testsuite")}
        assert suites[FEATURE.name].find("testcase").find("failure") is None
        err = suites["other"].find("testcase").find("error")
        assert err.get("type") == "compile"
        assert root.get("errors") == "1"
