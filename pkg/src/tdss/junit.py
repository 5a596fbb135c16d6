"""JUnit-style XML for CI servers: one testsuite per feature, one testcase per usage scenario."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

from tdss.runner import SuiteResult, Verdict


def to_junit_xml(suite: SuiteResult) -> bytes:
    root = ET.Element("testsuites")
    groups: dict[str, list] = {}
    for r in suite.results:
        groups.setdefault(r.feature.source_path, []).append(r)
    total = {"tests": 0, "failures": 0, "errors": 0}
    for path, results in groups.items():
        feature = results[0].feature
        failures = sum(r.result.verdict is Verdict.FAIL for r in results)
        errors = sum(r.result.verdict is Verdict.ERROR for r in results)
        ts = ET.SubElement(
            root,
            "testsuite",
            name=feature.name,
            file=path,
            tests=str(len(results)),
            failures=str(failures),
            errors=str(errors),
        )
        total["tests"] += len(results)
        total["failures"] += failures
        total["errors"] += errors
        for r in results:
            tc = ET.SubElement(ts, "testcase", name=r.scenario.name, classname=feature.name)
            result = r.result
            if result.verdict is Verdict.FAIL:
                failed = result.failed_expectation
                node = ET.SubElement(tc, "failure", message=failed.step_text, type="ExpectationFailed")
                node.text = f"expected event {failed.expected.render()} was not executed"
            elif result.verdict is Verdict.ERROR:
                node = ET.SubElement(tc, "error", message=result.error or "", type=result.cause or "error")
                node.text = result.error or ""
    for key, value in total.items():
        root.set(key, str(value))
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


def write_junit_xml(suite: SuiteResult, path: Path) -> None:
    Path(path).write_bytes(to_junit_xml(suite))
