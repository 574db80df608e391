"""Collects the one-line acceptance verdicts and prints them after the run."""

ACCEPTANCE: dict[int, str] = {}
ACCEPTANCE_COUNT = 8


def pytest_terminal_summary(terminalreporter):
    ran = getattr(terminalreporter.config, "_acceptance_ran", False)
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, ACCEPTANCE_COUNT + 1):
        terminalreporter.write_line(ACCEPTANCE.get(n, f"criterion {n}: FAIL (did not complete)"))


def pytest_collection_modifyitems(config, items):
    config._acceptance_ran = any(item.module.__name__.endswith("test_acceptance") for item in items)
