import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def record(request):
    """record(number, title, ok, detail): one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash.setdefault(_LINES, [])

    def _record(number: int, title: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}" + (f" ({detail})" if detail else "")
        lines.append((number, line))
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
