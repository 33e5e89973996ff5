import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; mark it failed unless ``ok(...)`` is called."""

    class Line:
        def __init__(self):
            self.name = request.node.name
            self.passed = False
            self.detail = ""

        def ok(self, detail=""):
            self.passed = True
            self.detail = detail

        def note(self, detail):
            self.detail = detail

    line = Line()
    _criteria.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for line in _criteria:
        mark = "PASS" if line.passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {line.name}: {line.detail}")
