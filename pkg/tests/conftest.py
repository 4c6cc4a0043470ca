"""Shared test configuration.

Prints one PASS/FAIL line per acceptance criterion at the end of the run,
derived from the outcome of the test_criterion_* functions.
"""
import re

_CRITERION = re.compile(r"test_acceptance\.py::(test_criterion_\d+[a-z0-9_]*)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            m = _CRITERION.search(rep.nodeid)
            if not m:
                continue
            name = m.group(1)[len("test_"):]
            num = name.split("_")[1]
            slug = "_".join(name.split("_")[2:])
            verdict = "PASS" if status == "passed" else "FAIL"
            lines[int(num)] = f"criterion {num} {slug}: {verdict}"
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for num in sorted(lines):
            terminalreporter.write_line(lines[num])
