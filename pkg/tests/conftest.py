"""Shared pytest wiring.

The acceptance module registers one line per criterion; the hook below prints
them in the terminal summary so the pass/fail table is visible even when
stdout capture hides in-test prints.
"""

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
