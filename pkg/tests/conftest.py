import pytest

_LINES: list[str] = []


class Verdict:
    """Collects named sub-checks for one acceptance criterion and reports a single PASS/FAIL line."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.checks: list[tuple[str, bool, str]] = []

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append((name, bool(ok), detail))
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def line(self) -> str:
        failed = [f"{n} ({d})" if d else n for n, ok, d in self.checks if not ok]
        summary = "; ".join(f"{n}: {d}" for n, _, d in self.checks if d)
        head = f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'} {self.title}"
        if failed:
            return f"{head} | failed: {', '.join(failed)}"
        return f"{head} | {summary}" if summary else head

    def finish(self) -> None:
        text = self.line()
        _LINES.append(text)
        print(text)
        assert self.passed, text


@pytest.fixture
def verdict():
    made = []

    def make(number: int, title: str) -> Verdict:
        v = Verdict(number, title)
        made.append(v)
        return v

    return make


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
