import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance verdict line; printed again in the terminal summary."""

    def _report(criterion: int, title: str, ok: bool | str | None, detail: str = "") -> None:
        if isinstance(ok, str):
            verdict = ok
        else:
            verdict = "DECLARED" if ok is None else ("PASS" if ok else "FAIL")
        line = f"[acceptance {criterion}] {verdict}: {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
