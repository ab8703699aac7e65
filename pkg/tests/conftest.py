"""Prints one verdict line per acceptance criterion test."""

import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.name.startswith("test_criterion_"):
        number = item.name.split("_")[2]
        verdict = "PASS" if report.passed else "FAIL"
        print(f"\ncriterion {number}: {verdict}", flush=True)
