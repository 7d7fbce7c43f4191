"""Pytest hooks: one printed PASS/FAIL line per acceptance criterion."""

import re

_ACCEPTANCE_ID = re.compile(r"test_acceptance\.py::test_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    match = _ACCEPTANCE_ID.search(report.nodeid)
    if match is None:
        return
    number, slug = match.groups()
    if report.passed:
        verdict = "PASS"
    elif report.skipped:
        verdict = "SKIP"
    else:
        verdict = "FAIL"
    line = f"ACCEPTANCE {number} ({slug.replace('_', ' ')}): {verdict}"
    detail = dict(report.user_properties).get("detail")
    if detail:
        line += f" [{detail}]"
    print(f"\n{line}")
