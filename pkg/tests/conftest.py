import re

CRITERIA = {
    1: "eigenvalue certification",
    2: "backend agreement",
    3: "invariance",
    4: "zero existence",
    5: "regularity",
    6: "minimality cross-check",
    7: "critical-point-free scan",
    8: "appendix determinants",
    9: "sphere and CP^n examples",
    10: "structure suite",
}

_results = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        props = dict(report.user_properties)
        _results[num] = (report.outcome == "passed", props.get("summary", ""))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        if num not in _results:
            continue
        ok, summary = _results[num]
        terminalreporter.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {CRITERIA[num]}: {summary}")
