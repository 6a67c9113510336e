"""Shared pytest plumbing: the acceptance-criterion verdict table."""

ACCEPTANCE_RESULTS: list[tuple[int, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num, verdict, label in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {num:02d} {verdict}  {label}")
